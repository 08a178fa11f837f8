#include "rmatch/line_analysis.hpp"

#include <algorithm>
#include <cmath>

namespace rmatch {

namespace {

void require_line_snapshots(const RunTrace<Rational>& trace, int phase) {
    if (!trace.instance.is_line()) throw std::invalid_argument("line analysis needs a line-metric trace");
    if (!trace.has_snapshots) throw std::invalid_argument("line analysis needs a trace recorded with snapshots");
    if (phase < 0 || phase >= trace.size()) {
        throw std::out_of_range("phase " + std::to_string(phase) + " out of range");
    }
}

std::vector<Region> tree_spans(const RunTrace<Rational>& trace, int phase) {
    std::vector<Region> spans;
    for (int r : trace.phases[phase].tree.requests) spans.push_back(span(trace, r, phase));
    std::sort(spans.begin(), spans.end(), [](const Region& a, const Region& b) { return a.low < b.low; });
    return spans;
}

}  // namespace

std::string to_string(const Region& r) { return "(" + r.low.str() + ", " + r.high.str() + ")"; }

bool regions_merge(const Region& a, const Region& b, MergePolicy policy) {
    if (policy == MergePolicy::Closed) return a.closures_intersect(b);
    if (a.interiors_intersect(b)) return true;
    if (a.is_point() && b.is_point()) return a.low == b.low;
    if (a.is_point()) return b.interior_contains(a.low);
    if (b.is_point()) return a.interior_contains(b.low);
    return false;
}

Region span(const RunTrace<Rational>& trace, RequestIndex r, int phase) {
    require_line_snapshots(trace, phase);
    if (r < 0 || r >= trace.instance.size()) throw std::out_of_range("request index out of range");
    if (r > phase) {
        throw std::invalid_argument("request " + std::to_string(r) + " has not arrived by phase " +
                                    std::to_string(phase));
    }
    const Rational half = trace.phases[phase].y_max_after[r] / trace.t;
    const Rational& at = trace.instance.requests()[r];
    return {at - half, at + half};
}

bool search_spans_connected(const RunTrace<Rational>& trace, int phase) {
    const auto spans = tree_spans(trace, phase);
    if (spans.empty()) return false;
    Rational reach = spans.front().high;
    for (std::size_t k = 1; k < spans.size(); ++k) {
        if (reach < spans[k].low) return false;
        reach = max(reach, spans[k].high);
    }
    return true;
}

Region search_interval(const RunTrace<Rational>& trace, int phase) {
    const auto spans = tree_spans(trace, phase);
    if (spans.empty()) throw AnalysisError("phase " + std::to_string(phase) + " has no tree requests");
    Region hull = spans.front();
    for (std::size_t k = 1; k < spans.size(); ++k) {
        if (hull.high < spans[k].low) {
            throw AnalysisError("closed spans of phase " + std::to_string(phase) + " leave a gap between " +
                                hull.high.str() + " and " + spans[k].low.str());
        }
        hull = Region::hull(hull, spans[k]);
    }
    return hull;
}

RegionGenealogy build_genealogy(const RunTrace<Rational>& trace, MergePolicy policy) {
    RegionGenealogy g;
    g.policy = policy;
    std::vector<int> current;
    for (int i = 0; i < trace.size(); ++i) {
        const Region sr = search_interval(trace, i);
        GenealogyNode node;
        node.id = i;
        node.birth = i;
        node.extent = sr;
        std::vector<int> next;
        for (int id : current) {
            if (regions_merge(g.nodes[id].extent, sr, policy)) {
                node.predecessors.push_back(id);
                node.extent = Region::hull(node.extent, g.nodes[id].extent);
            } else {
                next.push_back(id);
            }
        }
        for (int id : node.predecessors) {
            g.nodes[id].death = i;
            g.nodes[id].successor = i;
        }
        g.nodes.push_back(std::move(node));
        next.push_back(i);
        std::sort(next.begin(), next.end(), [&](int a, int b) {
            const auto& ea = g.nodes[a].extent;
            const auto& eb = g.nodes[b].extent;
            return ea.low != eb.low ? ea.low < eb.low : ea.high < eb.high;
        });
        g.sigma.push_back(next);
        current = std::move(next);
    }
    return g;
}

std::vector<Region> cumulative_search_region(const RunTrace<Rational>& trace, int phase, MergePolicy policy) {
    require_line_snapshots(trace, phase);
    const auto g = build_genealogy(trace, policy);
    std::vector<Region> out;
    for (int id : g.sigma[phase]) out.push_back(g.nodes[id].extent);
    return out;
}

// ------------------------------------------------------------------- levels

LevelScale::LevelScale(Rational w_opt, int n, Rational t) {
    if (w_opt <= Rational(0)) throw std::invalid_argument("levels need a positive optimal cost");
    if (n < 1) throw std::invalid_argument("levels need n >= 1");
    if (t <= Rational(1)) throw std::invalid_argument("levels need t > 1");
    base_ = w_opt / Rational(n);
    q_ = Rational(1) + Rational(1) / (Rational(32) * t);
    log_q_ = std::log1p((Rational(1) / (Rational(32) * t)).to_double());
    powers_.push_back(Rational(1));
}

const Rational& LevelScale::power(int k) const {
    while (static_cast<int>(powers_.size()) <= k) powers_.push_back(powers_.back() * q_);
    return powers_[k];
}

Rational LevelScale::threshold(int k) const { return base_ * power(k); }

int LevelScale::level(const Rational& length) const {
    if (length < base_) return 0;
    const double ratio = (length / base_).to_double();
    int k = std::isfinite(ratio) ? std::max(0, static_cast<int>(std::floor(std::log(ratio) / log_q_))) : 0;
    while (k > 0 && length < threshold(k)) --k;
    while (threshold(k + 1) <= length) ++k;
    return k;
}

int level_of_interval(const Rational& length, const Rational& w_opt, int n, const Rational& t) {
    return LevelScale(w_opt, n, t).level(length);
}

int LevelAssignment::max_level() const {
    int m = 0;
    for (int k : edge_level) m = std::max(m, k);
    return m;
}

LevelAssignment assign_edge_levels(const RunTrace<Rational>& trace, const RegionGenealogy& genealogy,
                                   const Rational& w_opt) {
    LevelScale scale(w_opt, trace.instance.size(), trace.t);
    LevelAssignment out;
    out.w_opt = w_opt;
    out.n = trace.instance.size();
    out.t = trace.t;
    for (const auto& node : genealogy.nodes) out.node_level.push_back(scale.level(node.extent.length()));

    const auto& S = trace.instance.servers();
    const auto& R = trace.instance.requests();
    for (int i = 0; i < trace.size(); ++i) {
        const Rational& s = S[trace.phases[i].server];
        const Rational& r = R[trace.phases[i].request];
        int found = -1;
        for (int id : genealogy.sigma[i]) {
            const Region& e = genealogy.nodes[id].extent;
            if (e.closure_contains(s) && e.closure_contains(r) && (found < 0 || id == i)) found = id;
        }
        if (found < 0) {
            throw AnalysisError("online edge of phase " + std::to_string(i) +
                                " lies in no interval of the cumulative search region");
        }
        out.edge_node.push_back(found);
        out.edge_level.push_back(out.node_level[found]);
    }
    return out;
}

std::vector<int> online_edges_inside(const RunTrace<Rational>& trace, const Region& extent, int phase_end) {
    const auto& S = trace.instance.servers();
    const auto& R = trace.instance.requests();
    std::vector<int> out;
    for (int i = 0; i < phase_end && i < trace.size(); ++i) {
        if (extent.closure_contains(S[trace.phases[i].server]) && extent.closure_contains(R[trace.phases[i].request])) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<Edge> offline_edges_inside(const RunTrace<Rational>& trace, const Region& extent, int phase) {
    const auto& S = trace.instance.servers();
    const auto& R = trace.instance.requests();
    const auto& mates = trace.phases[phase].offline_after;
    std::vector<Edge> out;
    for (int s = 0; s < static_cast<int>(mates.size()); ++s) {
        const int r = mates[s];
        if (r == kUnmatched) continue;
        if (extent.closure_contains(S[s]) && extent.closure_contains(R[r])) out.push_back({s, r});
    }
    return out;
}

std::vector<int> subtree_phases(const RegionGenealogy& genealogy, int node) {
    std::vector<int> out;
    std::vector<int> stack{node};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        out.push_back(genealogy.nodes[id].birth);
        for (int p : genealogy.nodes[id].predecessors) stack.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

LevelKStructure level_k_structure(const RegionGenealogy& genealogy,
                                  const LevelAssignment& levels, int k) {
    LevelKStructure out;
    out.level = k;
    for (const auto& node : genealogy.nodes) {
        if (levels.node_level[node.id] != k) continue;
        const bool maximal = node.alive_at_end() || levels.node_level[node.successor] > k;
        if (!maximal) continue;

        MaximalInterval mi;
        mi.node = node.id;
        int cur = node.id;
        while (true) {
            mi.chain.push_back(cur);
            int same = -1;
            for (int p : genealogy.nodes[cur].predecessors) {
                if (levels.node_level[p] == k) {
                    if (same >= 0) {
                        throw AnalysisError("interval " + to_string(genealogy.nodes[cur].extent) +
                                            " has two level-" + std::to_string(k) + " predecessors");
                    }
                    same = p;
                } else {
                    mi.comp.push_back(p);
                }
            }
            if (same < 0) break;
            cur = same;
        }
        std::reverse(mi.chain.begin(), mi.chain.end());
        std::sort(mi.comp.begin(), mi.comp.end());

        mi.all_edges = subtree_phases(genealogy, node.id);
        for (int i : mi.all_edges) {
            if (levels.edge_level[i] == k) mi.edges.push_back(i);
        }
        out.intervals.push_back(std::move(mi));
    }
    std::sort(out.intervals.begin(), out.intervals.end(), [&](const MaximalInterval& a, const MaximalInterval& b) {
        const auto& ea = genealogy.nodes[a.node].extent;
        const auto& eb = genealogy.nodes[b.node].extent;
        return ea.low != eb.low ? ea.low < eb.low : a.node < b.node;
    });
    return out;
}

std::vector<int> edge_levels_present(const LevelAssignment& levels) {
    std::vector<int> ks = levels.edge_level;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

nlohmann::json analysis_summary_json(const RunTrace<Rational>& trace, const RegionGenealogy& genealogy,
                                     const LevelAssignment* levels, const std::vector<std::string>& violations) {
    nlohmann::json j;
    j["phases"] = trace.size();
    j["merge_policy"] = genealogy.policy == MergePolicy::Closed ? "closed" : "open";

    nlohmann::json gen;
    gen["nodes"] = genealogy.nodes.size();
    int roots = 0;
    std::size_t widest = 0;
    for (const auto& node : genealogy.nodes) {
        if (node.predecessors.empty()) ++roots;
        widest = std::max(widest, node.predecessors.size());
    }
    gen["roots"] = roots;
    gen["max_predecessors"] = widest;
    auto final_regions = nlohmann::json::array();
    if (!genealogy.sigma.empty()) {
        for (int id : genealogy.sigma.back()) final_regions.push_back(to_string(genealogy.nodes[id].extent));
    }
    gen["final_region"] = std::move(final_regions);
    j["genealogy"] = std::move(gen);

    if (levels != nullptr) {
        nlohmann::json lv;
        lv["w_opt"] = levels->w_opt.str();
        lv["base"] = (levels->w_opt / Rational(levels->n)).str();
        lv["max_level"] = levels->max_level();
        std::map<int, std::pair<int, Rational>> per;
        std::map<int, int> shorts;
        for (int i = 0; i < trace.size(); ++i) {
            auto& slot = per[levels->edge_level[i]];
            ++slot.first;
            slot.second += distance(trace.instance, trace.phases[i].server, trace.phases[i].request);
            if (trace.phases[i].kind == PathClass::Short) ++shorts[levels->edge_level[i]];
        }
        auto rows = nlohmann::json::array();
        for (const auto& [k, v] : per) {
            rows.push_back({{"level", k}, {"edges", v.first}, {"short_edges", shorts[k]}, {"cost", v.second.str()}});
        }
        lv["per_level"] = std::move(rows);
        j["levels"] = std::move(lv);
    } else {
        j["levels"] = nullptr;
    }
    j["violations"] = violations;
    return j;
}

}  // namespace rmatch
