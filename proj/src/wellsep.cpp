#include "rmatch/wellsep.hpp"

#include "rmatch/offline_opt.hpp"

namespace rmatch {

WellSepFrame::WellSepFrame(Rational delta, Rational eps, Rational offset)
    : delta_(std::move(delta)), eps_(std::move(eps)), offset_(std::move(offset)) {
    if (delta_ <= Rational(0)) throw std::invalid_argument("frame width must be positive (got " + delta_.str() + ")");
    if (eps_ <= Rational(0) || Rational(1, 8) < eps_) {
        throw std::invalid_argument("eps must lie in (0, 1/8] (got " + eps_.str() + ")");
    }
}

bool is_well_separated(const std::vector<Rational>& servers, const std::vector<Rational>& requests,
                       const WellSepFrame& frame) {
    for (const auto& s : servers) {
        const Rational x = frame.local(s);
        if (!frame.left().closure_contains(x) && !frame.right().closure_contains(x)) return false;
    }
    for (const auto& r : requests) {
        if (!frame.all().closure_contains(frame.local(r))) return false;
    }
    return true;
}

const char* to_string(EdgeClass c) {
    switch (c) {
        case EdgeClass::Close: return "close";
        case EdgeClass::Far: return "far";
        case EdgeClass::Med: return "med";
    }
    return "?";
}

std::vector<Edge> ClassifiedMatching::edges_of(const LineMatchingInstance& inst, EdgeClass c) const {
    std::vector<Edge> out;
    for (std::size_t k = 0; k < tags.size(); ++k) {
        if (tags[k] == c) out.push_back(inst.matching[k]);
    }
    return out;
}

ClassifiedMatching classify_edges(const LineMatchingInstance& inst, const WellSepFrame& frame) {
    ClassifiedMatching cm;
    const Region ln = frame.left_near();
    const Region rn = frame.right_near();
    for (const Edge& e : inst.matching) {
        const Rational s = frame.local(inst.servers[e.server]);
        const Rational r = frame.local(inst.requests[e.request]);
        const Rational len = abs(s - r);
        if ((ln.closure_contains(s) && ln.closure_contains(r)) || (rn.closure_contains(s) && rn.closure_contains(r))) {
            cm.tags.push_back(EdgeClass::Close);
            cm.w_close += len;
        } else if ((ln.closure_contains(s) && rn.closure_contains(r)) ||
                   (rn.closure_contains(s) && ln.closure_contains(r))) {
            cm.tags.push_back(EdgeClass::Far);
            cm.w_far += len;
        } else if (frame.center().closure_contains(r) &&
                   (frame.left().closure_contains(s) || frame.right().closure_contains(s))) {
            cm.tags.push_back(EdgeClass::Med);
            cm.w_med += len;
        } else {
            throw std::invalid_argument("edge (server " + inst.servers[e.server].str() + ", request " +
                                        inst.requests[e.request].str() + ") fits no class in this frame");
        }
    }
    return cm;
}

bool is_well_aligned(const LineMatchingInstance& inst, const ClassifiedMatching& cm, const WellSepFrame& frame) {
    const Region ln = frame.left_near();
    const Region rn = frame.right_near();
    for (std::size_t k = 0; k < cm.tags.size(); ++k) {
        if (cm.tags[k] != EdgeClass::Close) continue;
        const Edge& e = inst.matching[k];
        const Rational s = frame.local(inst.servers[e.server]);
        const Rational r = frame.local(inst.requests[e.request]);
        if (rn.closure_contains(s) && rn.closure_contains(r) && s < r) return false;
        if (ln.closure_contains(s) && ln.closure_contains(r) && r < s) return false;
    }
    return true;
}

namespace {

Rational opt_of(const LineMatchingInstance& inst, const std::vector<Edge>& edges) {
    std::vector<Rational> s, r;
    for (const Edge& e : edges) {
        s.push_back(inst.servers[e.server]);
        r.push_back(inst.requests[e.request]);
    }
    return line_matching_cost(s, r);
}

Inequality at_most(Rational lhs, Rational rhs) {
    const bool ok = lhs <= rhs;
    return {std::move(lhs), std::move(rhs), ok};
}

}  // namespace

WspcReport check_wspc(const LineMatchingInstance& inst, const ClassifiedMatching& cm, const WellSepFrame& frame,
                      const Rational& opt_cost) {
    if (!is_well_separated(inst.servers, inst.requests, frame)) {
        throw std::invalid_argument("check_wspc: input is not well-separated in this frame");
    }
    if (!is_well_aligned(inst, cm, frame)) {
        throw std::invalid_argument("check_wspc: matching is not well-aligned");
    }
    const Rational& eps = frame.eps();
    const Rational one(1);

    const auto close = cm.edges_of(inst, EdgeClass::Close);
    auto close_far = close;
    const auto far = cm.edges_of(inst, EdgeClass::Far);
    close_far.insert(close_far.end(), far.begin(), far.end());
    const Rational opt_close = opt_of(inst, close);
    const Rational opt_cf = opt_of(inst, close_far);

    WspcReport rep;
    rep.main = at_most(cm.w_close + cm.w_med,
                       (Rational(2) / eps + Rational(3)) * opt_cost +
                           (Rational(4) * eps / (one - Rational(2) * eps)) * cm.w_far);
    rep.close_is_optimal = {cm.w_close, opt_close, cm.w_close == opt_close};
    rep.med_bound = at_most(cm.w_med, opt_cost / eps);
    rep.cf_bound = at_most(opt_cf, (one / eps + Rational(3)) * opt_cost);
    rep.close_vs_cf = at_most(opt_close - Rational(4) * eps * frame.delta() * Rational(static_cast<long>(far.size())),
                              opt_cf);
    return rep;
}

std::vector<ExtractedInstance> extract_level_instances(const LevelKStructure& structure,
                                                       const RunTrace<Rational>& trace,
                                                       const RegionGenealogy& genealogy,
                                                       std::optional<Rational> eps) {
    std::vector<ExtractedInstance> out;
    if (structure.level < 1) return out;
    const Rational e = eps ? *eps : Rational(1) / (Rational(32) * trace.t);
    const auto& S = trace.instance.servers();
    const auto& R = trace.instance.requests();
    for (const auto& mi : structure.intervals) {
        if (mi.edges.empty()) continue;
        const Region& minimal = genealogy.nodes[mi.chain.front()].extent;
        ExtractedInstance x{mi.node, mi.chain.front(), WellSepFrame(minimal.length(), e, minimal.low), {}, {},
                            false, false, std::nullopt, {}, false};
        for (int i : mi.edges) {
            const auto& ph = trace.phases[i];
            x.points.matching.push_back({static_cast<int>(x.points.servers.size()),
                                         static_cast<int>(x.points.requests.size())});
            x.points.servers.push_back(S[ph.server]);
            x.points.requests.push_back(R[ph.request]);
            x.phases.push_back(i);
        }
        x.well_separated = is_well_separated(x.points.servers, x.points.requests, x.frame);
        if (x.well_separated) {
            x.classes = classify_edges(x.points, x.frame);
            x.well_aligned = is_well_aligned(x.points, *x.classes, x.frame);
            x.far_check_applies = trace.t == Rational(3);
            if (x.far_check_applies) {
                for (std::size_t k = 0; k < x.phases.size(); ++k) {
                    if (x.classes->tags[k] == EdgeClass::Far && trace.phases[x.phases[k]].kind == PathClass::Short) {
                        x.short_far_phases.push_back(x.phases[k]);
                    }
                }
            }
        }
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace rmatch
