#include "rmatch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "rmatch/offline_opt.hpp"
#include "rmatch/wellsep.hpp"

namespace rmatch {

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Skipped: return "skipped";
    }
    return "?";
}

bool VerificationReport::passed() const {
    return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

const CheckResult* VerificationReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::vector<std::string> VerificationReport::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
        if (c.status != CheckStatus::Fail) continue;
        std::string line = c.name;
        if (c.witness) {
            if (c.witness->phase >= 0) line += " @phase " + std::to_string(c.witness->phase);
            if (!c.witness->interval.empty()) line += " in " + c.witness->interval;
            if (!c.witness->lhs.empty()) line += ": " + c.witness->lhs + " vs " + c.witness->rhs;
            if (!c.witness->detail.empty()) line += " (" + c.witness->detail + ")";
        }
        out.push_back(std::move(line));
    }
    return out;
}

void VerificationReport::append(VerificationReport other) {
    for (auto& c : other.checks) checks.push_back(std::move(c));
}

nlohmann::json VerificationReport::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json j;
        j["name"] = c.name;
        j["statement"] = c.statement;
        j["status"] = to_string(c.status);
        j["evaluated"] = c.evaluated;
        if (c.witness) {
            j["witness"] = {{"lhs", c.witness->lhs},
                            {"rhs", c.witness->rhs},
                            {"phase", c.witness->phase},
                            {"interval", c.witness->interval},
                            {"detail", c.witness->detail}};
        } else {
            j["witness"] = nullptr;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

namespace {

class Check {
public:
    Check(std::string name, std::string statement) {
        result_.name = std::move(name);
        result_.statement = std::move(statement);
    }

    void expect(bool ok, const std::function<Witness()>& witness) {
        ++result_.evaluated;
        if (ok) return;
        result_.status = CheckStatus::Fail;
        if (!result_.witness) result_.witness = witness();
    }

    void skip(std::string why) {
        if (result_.status == CheckStatus::Fail) return;
        result_.status = CheckStatus::Skipped;
        result_.witness = Witness{"", "", -1, "", std::move(why)};
    }

    CheckResult take() && { return std::move(result_); }

private:
    CheckResult result_;
};

Witness compare(const Rational& lhs, const Rational& rhs, int phase = -1, std::string detail = {},
                std::string interval = {}) {
    return {lhs.str(), rhs.str(), phase, std::move(interval), std::move(detail)};
}

Witness note(std::string detail, int phase = -1, std::string interval = {}) {
    return {"", "", phase, std::move(interval), std::move(detail)};
}

std::string pair_name(int s, int r) { return "server " + std::to_string(s) + ", request " + std::to_string(r); }

// n x n distances, server-major.
std::vector<Rational> distance_table(const Instance& inst) {
    const int n = inst.size();
    std::vector<Rational> d;
    d.reserve(static_cast<std::size_t>(n) * n);
    for (int s = 0; s < n; ++s) {
        for (int r = 0; r < n; ++r) d.push_back(distance(inst, s, r));
    }
    return d;
}

std::vector<int> mates_before(const RunTrace<Rational>& trace, int phase) {
    if (phase == 0) return std::vector<int>(trace.instance.size(), kUnmatched);
    return trace.phases[phase - 1].offline_after;
}

// Servers not yet used by the online matching when `phase` starts.
std::vector<int> free_at(const RunTrace<Rational>& trace, int phase) {
    std::vector<char> used(trace.instance.size(), 0);
    for (int i = 0; i < phase; ++i) used[trace.phases[i].server] = 1;
    std::vector<int> out;
    for (int s = 0; s < trace.instance.size(); ++s) {
        if (!used[s]) out.push_back(s);
    }
    return out;
}

void add(VerificationReport& rep, Check&& c) { rep.checks.push_back(std::move(c).take()); }

}  // namespace

// -------------------------------------------------------------- brute force

AugmentingPath<Rational> brute_force_min_path(const Instance& instance, const std::vector<int>& server_mate,
                                              RequestIndex r, const Rational& t) {
    const int n = instance.size();
    if (2 * n > 16) throw std::invalid_argument("brute-force path search is limited to 16 points");
    std::vector<int> request_mate(n, kUnmatched);
    for (int s = 0; s < n; ++s) {
        if (server_mate[s] != kUnmatched) request_mate[server_mate[s]] = s;
    }
    if (request_mate[r] != kUnmatched) throw std::invalid_argument("request is already matched");

    std::optional<AugmentingPath<Rational>> best;
    std::vector<PathEdge> stack;
    std::vector<char> used_s(n, 0), used_r(n, 0);
    std::function<void(int, const Rational&, const Rational&)> go = [&](int req, const Rational& phi,
                                                                        const Rational& len) {
        used_r[req] = 1;
        for (int s = 0; s < n; ++s) {
            if (used_s[s] || request_mate[req] == s) continue;
            const Rational d = distance(instance, s, req);
            const Rational p = phi + t * d;
            const Rational l = len + d;
            stack.push_back({{s, req}, false});
            if (server_mate[s] == kUnmatched) {
                const int edges = static_cast<int>(stack.size());
                const bool better = !best || p < best->net_cost ||
                                    (p == best->net_cost && edges < best->edge_count()) ||
                                    (p == best->net_cost && edges == best->edge_count() && s < best->terminal);
                if (better) best = AugmentingPath<Rational>{r, s, stack, p, l};
            } else {
                const int next = server_mate[s];
                if (!used_r[next]) {
                    used_s[s] = 1;
                    const Rational dm = distance(instance, s, next);
                    stack.push_back({{s, next}, true});
                    go(next, p - dm, l + dm);
                    stack.pop_back();
                    used_s[s] = 0;
                }
            }
            stack.pop_back();
        }
        used_r[req] = 0;
    };
    go(r, Rational(0), Rational(0));
    if (!best) throw std::logic_error("no free server reachable");
    return *best;
}

VerificationReport check_oracle_replay(const RunTrace<Rational>& trace) {
    VerificationReport rep;
    Check c("oracle_min_path",
            "each phase's path has the minimum t-net-cost over all alternating paths and the fewest edges among "
            "minima (exhaustive enumeration)");
    if (trace.instance.size() > 7) {
        c.skip("exhaustive enumeration is limited to n <= 7");
    } else if (!trace.has_snapshots) {
        c.skip("trace has no offline-matching snapshots");
    } else {
        for (int i = 0; i < trace.size(); ++i) {
            const auto& ph = trace.phases[i];
            const auto want = brute_force_min_path(trace.instance, mates_before(trace, i), ph.request, trace.t);
            c.expect(ph.path.net_cost == want.net_cost && ph.path.edge_count() == want.edge_count(), [&] {
                return compare(ph.path.net_cost, want.net_cost, i,
                               "edges " + std::to_string(ph.path.edge_count()) + " vs " +
                                   std::to_string(want.edge_count()));
            });
        }
    }
    add(rep, std::move(c));
    return rep;
}

// --------------------------------------------------------------- invariants

VerificationReport check_invariants(const RunTrace<Rational>& trace) {
    VerificationReport rep;
    const Instance& inst = trace.instance;
    const int n = inst.size();
    const Rational& t = trace.t;

    Check i1("I1_feasibility",
             "y(s)+y(r) <= t d(s,r) for every pair and y(s)+y(r) = d(s,r) on offline edges, after both steps of "
             "every phase");
    Check i2("I2_signs",
             "server duals are <= 0 and 0 when free; request duals are >= 0 and 0 before arrival, after both steps");
    Check i3("I3_root_dual", "after the search step the arriving request's dual equals the path's t-net-cost");
    Check elig("path_eligible",
               "each path starts at the arriving request, alternates with the offline matching, uses only eligible "
               "edges and ends at its online partner, a free server");
    Check cls("classification", "a path is short exactly when (t-1) times its length is at most 4 times its t-net-cost");
    Check same("matched_server_sets", "online and offline matchings use the same servers after every phase");
    Check cost("online_cost_identity",
               "w(M) equals the sum of d(s_i, r_i) and is at most the total length of all augmenting paths");

    if (!trace.has_snapshots) {
        for (Check* c : {&i1, &i2, &i3, &elig, &same}) c->skip("trace has no dual snapshots");
    } else {
        const auto d = distance_table(inst);
        std::vector<Rational> td;
        td.reserve(d.size());
        for (const auto& x : d) td.push_back(t * x);
        std::vector<char> online_used(n, 0);

        for (int i = 0; i < trace.size(); ++i) {
            const auto& ph = trace.phases[i];
            const auto prev = mates_before(trace, i);
            const auto& next = ph.offline_after;
            const std::pair<const DualSnapshot<Rational>*, const std::vector<int>*> snaps[2] = {
                {&ph.after_search, &prev}, {&ph.after_augment, &next}};
            for (int step = 0; step < 2; ++step) {
                const auto& y = *snaps[step].first;
                const auto& mates = *snaps[step].second;
                const std::string when = step == 0 ? "after search" : "after augmentation";
                bool pairs_ok = true;
                int bad_s = -1, bad_r = -1;
                for (int s = 0; s < n && pairs_ok; ++s) {
                    for (int r = 0; r < n; ++r) {
                        const std::size_t k = static_cast<std::size_t>(s) * n + r;
                        const Rational sum = y.servers[s] + y.requests[r];
                        const bool ok = mates[s] == r ? sum == d[k] : sum <= td[k];
                        if (!ok) {
                            pairs_ok = false;
                            bad_s = s;
                            bad_r = r;
                            break;
                        }
                    }
                }
                i1.expect(pairs_ok, [&] {
                    const std::size_t k = static_cast<std::size_t>(bad_s) * n + bad_r;
                    const bool matched = mates[bad_s] == bad_r;
                    return compare(y.servers[bad_s] + y.requests[bad_r], matched ? d[k] : td[k], i,
                                   pair_name(bad_s, bad_r) + (matched ? " (offline edge) " : " ") + when);
                });
                for (int s = 0; s < n; ++s) {
                    const bool free = mates[s] == kUnmatched;
                    const bool ok = y.servers[s] <= Rational(0) && (!free || y.servers[s].is_zero());
                    i2.expect(ok, [&] {
                        return compare(y.servers[s], Rational(0), i,
                                       (free ? "free server " : "server ") + std::to_string(s) + " " + when);
                    });
                }
                for (int r = 0; r < n; ++r) {
                    const bool arrived = r <= i;
                    const bool ok = arrived ? y.requests[r] >= Rational(0) : y.requests[r].is_zero();
                    i2.expect(ok, [&] {
                        return compare(y.requests[r], Rational(0), i,
                                       (arrived ? "request " : "unarrived request ") + std::to_string(r) + " " + when);
                    });
                }
            }

            std::vector<Edge> edges;
            for (const auto& pe : ph.path.edges) edges.push_back(pe.edge);
            Matching prev_m;
            for (int s = 0; s < n; ++s) {
                if (prev[s] != kUnmatched) prev_m.add({s, prev[s]});
            }
            std::optional<Rational> phi;
            std::string phi_error;
            try {
                phi = t_net_cost(inst, edges, prev_m, t);
            } catch (const std::invalid_argument& e) {
                phi_error = e.what();
            }
            i3.expect(phi && *phi == ph.after_search.requests[ph.request] && *phi == ph.path.net_cost, [&] {
                if (!phi) return note("path is not alternating: " + phi_error, i);
                return compare(ph.after_search.requests[ph.request], *phi, i, "root dual vs recomputed t-net-cost");
            });

            bool path_ok = !ph.path.edges.empty() && ph.path.edges.front().edge.request == ph.request &&
                           ph.path.edges.back().edge.server == ph.server && prev[ph.server] == kUnmatched;
            std::string why = path_ok ? "" : "path endpoints do not match the phase";
            for (std::size_t k = 0; k < ph.path.edges.size() && path_ok; ++k) {
                const auto& pe = ph.path.edges[k];
                const auto [s, r] = pe.edge;
                const bool in_prev = prev[s] == r;
                const bool expect_matching = (k % 2 == 1);
                const Rational sum = ph.after_search.servers[s] + ph.after_search.requests[r];
                const std::size_t idx = static_cast<std::size_t>(s) * n + r;
                if (in_prev != expect_matching || pe.in_offline != in_prev) {
                    path_ok = false;
                    why = "edge " + std::to_string(k) + " breaks alternation";
                } else if (!(in_prev ? sum == d[idx] : sum == td[idx])) {
                    path_ok = false;
                    why = "edge " + std::to_string(k) + " (" + pair_name(s, r) + ") is not eligible";
                }
            }
            elig.expect(path_ok, [&] { return note(why, i); });

            online_used[ph.server] = 1;
            bool sets_equal = true;
            for (int s = 0; s < n; ++s) {
                if ((next[s] != kUnmatched) != static_cast<bool>(online_used[s])) sets_equal = false;
            }
            same.expect(sets_equal, [&] { return note("server sets differ", i); });
        }
    }

    const Rational t1 = t - Rational(1);
    Rational online, total_len;
    for (int i = 0; i < trace.size(); ++i) {
        const auto& ph = trace.phases[i];
        online += distance(inst, ph.server, ph.request);
        total_len += ph.path.length;
        const bool is_short = t1 * ph.path.length <= Rational(4) * ph.path.net_cost;
        cls.expect(is_short == (ph.kind == PathClass::Short), [&] {
            return compare(t1 * ph.path.length, Rational(4) * ph.path.net_cost, i,
                           std::string("recorded as ") + to_string(ph.kind));
        });
    }
    cost.expect(online == trace.online_cost && online == matching_cost(inst, trace.online),
                [&] { return compare(trace.online_cost, online, -1, "recorded vs recomputed online cost"); });
    cost.expect(online <= total_len, [&] { return compare(online, total_len, -1, "online cost vs total path length"); });

    for (Check* c : {&i1, &i2, &i3, &elig, &cls, &same, &cost}) add(rep, std::move(*c));
    return rep;
}

// ------------------------------------------------------------------ lemmas

namespace {

void general_lemmas(const RunTrace<Rational>& trace, VerificationReport& rep) {
    const Instance& inst = trace.instance;
    const Rational& t = trace.t;
    const Rational factor = Rational(4) + Rational(4) / (t - Rational(1));

    Check anfs("anfs", "every short edge is at most (4 + 4/(t-1)) times the distance to the nearest free server");
    Check near("phi_vs_nearest", "each path's t-net-cost is at most t times the distance to the nearest free server");
    Check shortcost("shortcost", "(4 + 4/(t-1)) w(M_short) >= w(M)");
    Check phi_len("phi_vs_length", "sum of t-net-costs >= (t-1)/2 times the sum of path lengths");
    Check hl("short_vs_long_phi", "sum of t-net-costs of short paths >= sum over long paths");

    Rational w_short, w_all, sum_phi, sum_len, phi_short, phi_long;
    for (int i = 0; i < trace.size(); ++i) {
        const auto& ph = trace.phases[i];
        std::optional<Rational> nearest;
        for (int s : free_at(trace, i)) {
            Rational x = distance(inst, s, ph.request);
            if (!nearest || x < *nearest) nearest = std::move(x);
        }
        const Rational edge = distance(inst, ph.server, ph.request);
        if (ph.kind == PathClass::Short) {
            anfs.expect(edge <= factor * *nearest, [&] { return compare(edge, factor * *nearest, i); });
            w_short += edge;
            phi_short += ph.path.net_cost;
        } else {
            phi_long += ph.path.net_cost;
        }
        near.expect(ph.path.net_cost <= t * *nearest, [&] { return compare(ph.path.net_cost, t * *nearest, i); });
        w_all += edge;
        sum_phi += ph.path.net_cost;
        sum_len += ph.path.length;
    }
    shortcost.expect(factor * w_short >= w_all, [&] { return compare(factor * w_short, w_all); });
    const Rational half = (t - Rational(1)) / Rational(2);
    phi_len.expect(sum_phi >= half * sum_len, [&] { return compare(sum_phi, half * sum_len); });
    hl.expect(phi_short >= phi_long, [&] { return compare(phi_short, phi_long); });

    for (Check* c : {&anfs, &near, &shortcost, &phi_len, &hl}) add(rep, std::move(*c));
}

struct LineChecks {
    Check emptyspan{"emptyspan", "no free server lies in the open span of any arrived request"};
    Check included{"included", "every eligible edge (s,r) after the search step has y_max(r) >= t|s-r|"};
    Check connected{"connected",
                    "closed spans of the tree requests form one interval whose interior holds no free server, which "
                    "contains every tree server-request pair, and whose boundary holds the chosen server"};
    Check csrprop{"csrprop",
                  "after each phase every online and offline edge lies in the closure of a region interval, no free "
                  "server lies in the open union of search intervals, and the chosen server is a region endpoint"};
    Check o1{"O1_nesting", "any region interval and any later one are interior-disjoint or nested"};
    Check onelevelk{"onelevelk", "a level k >= 1 interval has at most one level-k predecessor"};
    Check e1{"E1_chain_levels", "for k >= 1 each chain is all level k, starts at a minimal and ends at a maximal interval"};
    Check e2{"E2_chain_nested", "each chain is nested"};
    Check c1{"C1_comp_disjoint", "comp sets are interior-disjoint and inside their maximal interval"};
    Check c2{"C2_comp_covers",
             "every matched point of a maximal interval not matched at its level lies in some comp interval"};
    Check partition{"level_partition",
                    "for k >= 1 maximal level-k intervals are interior-disjoint and split the level-k online edges exactly"};
    Check costbnd_max{"costbnd_maximal", "offline edges inside the final region, and inside the maximal level-k intervals for each k >= 1, cost at most t w(OPT)"};
    Check costbnd_comp{"costbnd_comp", "offline edges inside the comp intervals of each level k >= 1 cost at most t w(OPT)"};
    Check optcost{"optcost", "for k >= 1 the optimal costs of the level-k point sets sum to at most 2t w(OPT)"};
    Check ws_sep{"wspconline_separated", "each extracted level k >= 1 point set is well-separated"};
    Check ws_align{"wspconline_aligned", "each extracted level k >= 1 matching is well-aligned"};
    Check ws_far{"wspconline_far_long", "each far edge of an extracted matching is a long online edge (t = 3)"};
    Check wspc{"wspc", "w(close) + w(med) <= (2/eps + 3) OPT + 4 eps/(1 - 2 eps) w(far) on each extracted matching"};
    Check wspc_i{"wspc_close_optimal", "close edges form an optimal matching of their endpoints"};
    Check wspc_ii{"wspc_med_bound", "w(med) <= OPT / eps"};
    Check wspc_iii{"wspc_cf_bound", "OPT of the close and far points <= (1/eps + 3) OPT"};
    Check wspc_iv{"wspc_close_vs_cf", "OPT(close points) - 4 eps D |far| <= OPT of the close and far points"};

    std::vector<Check*> all() {
        return {&emptyspan, &included,  &connected,   &csrprop,      &o1,     &onelevelk, &e1,     &e2,
                &c1,        &c2,        &partition,   &costbnd_max,  &costbnd_comp, &optcost, &ws_sep, &ws_align,
                &ws_far,    &wspc,      &wspc_i,      &wspc_ii,      &wspc_iii, &wspc_iv};
    }
    std::vector<Check*> after_genealogy() {
        auto v = all();
        return {v.begin() + 4, v.end()};
    }
    std::vector<Check*> after_levels() {
        auto v = all();
        return {v.begin() + 5, v.end()};
    }
};

Rational offline_cost_inside(const RunTrace<Rational>& trace, const GenealogyNode& node) {
    Rational w;
    for (const Edge& e : offline_edges_inside(trace, node.extent, node.birth)) {
        w += distance(trace.instance, e.server, e.request);
    }
    return w;
}

void line_lemmas(const RunTrace<Rational>& trace, const LemmaOptions& options, VerificationReport& rep) {
    LineChecks L;
    const Instance& inst = trace.instance;
    const int n = inst.size();
    const Rational& t = trace.t;
    const auto& S = inst.servers();
    const auto& R = inst.requests();

    if (!inst.is_line()) {
        for (Check* c : L.all()) c->skip("line metric only");
        for (Check* c : L.all()) add(rep, std::move(*c));
        return;
    }
    if (!trace.has_snapshots) {
        for (Check* c : L.all()) c->skip("trace has no dual snapshots");
        for (Check* c : L.all()) add(rep, std::move(*c));
        return;
    }

    const auto d = distance_table(inst);
    std::vector<std::optional<Region>> sr(trace.size());
    bool all_connected = true;

    for (int i = 0; i < trace.size(); ++i) {
        const auto& ph = trace.phases[i];
        const auto free = free_at(trace, i);
        std::vector<Region> spans;
        for (int r = 0; r <= i; ++r) spans.push_back(span(trace, r, i));

        for (int r = 0; r <= i; ++r) {
            for (int s : free) {
                L.emptyspan.expect(!spans[r].interior_contains(S[s]), [&] {
                    return note(pair_name(s, r) + " at " + S[s].str(), i, to_string(spans[r]));
                });
            }
        }

        const auto prev = mates_before(trace, i);
        for (int r = 0; r <= i; ++r) {
            for (int s = 0; s < n; ++s) {
                const std::size_t k = static_cast<std::size_t>(s) * n + r;
                const bool eligible = prev[s] == r ||
                                      ph.after_search.servers[s] + ph.after_search.requests[r] == t * d[k];
                if (!eligible) continue;
                L.included.expect(ph.y_max_after[r] >= t * d[k], [&] {
                    return compare(ph.y_max_after[r], t * d[k], i, pair_name(s, r));
                });
            }
        }

        const bool conn = search_spans_connected(trace, i);
        L.connected.expect(conn, [&] { return note("closed spans of the tree requests are disconnected", i); });
        if (!conn) {
            all_connected = false;
            continue;
        }
        sr[i] = search_interval(trace, i);
        const Region& box = *sr[i];
        for (int s : ph.tree.servers) {
            for (int r : ph.tree.requests) {
                L.connected.expect(box.closure_contains(S[s]) && box.closure_contains(R[r]), [&] {
                    return note("tree pair " + pair_name(s, r) + " leaves the search interval", i, to_string(box));
                });
            }
        }
        for (int s : free) {
            L.connected.expect(!box.interior_contains(S[s]), [&] {
                return note("free server " + std::to_string(s) + " inside the search interval", i, to_string(box));
            });
        }
        const Rational& si = S[ph.server];
        L.connected.expect(si == box.low || si == box.high, [&] {
            return note("chosen server at " + si.str() + " is not on the boundary", i, to_string(box));
        });
    }

    if (!all_connected) {
        for (Check* c : L.all()) {
            if (c != &L.emptyspan && c != &L.included && c != &L.connected) c->skip("a search interval is disconnected");
        }
        for (Check* c : L.all()) add(rep, std::move(*c));
        return;
    }

    const RegionGenealogy g = build_genealogy(trace, options.policy);

    // csrprop
    for (int i = 0; i < trace.size(); ++i) {
        const auto& ph = trace.phases[i];
        const auto& sigma = g.sigma[i];
        auto inside_some = [&](const Rational& a, const Rational& b) {
            return std::any_of(sigma.begin(), sigma.end(), [&](int id) {
                return g.nodes[id].extent.closure_contains(a) && g.nodes[id].extent.closure_contains(b);
            });
        };
        for (int j = 0; j <= i; ++j) {
            const auto& e = trace.phases[j];
            L.csrprop.expect(inside_some(S[e.server], R[e.request]), [&] {
                return note("online edge of phase " + std::to_string(j) + " lies in no region interval", i);
            });
        }
        for (int s = 0; s < n; ++s) {
            const int r = ph.offline_after[s];
            if (r == kUnmatched) continue;
            L.csrprop.expect(inside_some(S[s], R[r]),
                             [&] { return note("offline edge " + pair_name(s, r) + " lies in no region interval", i); });
        }
        for (int s : free_at(trace, i)) {
            for (int j = 0; j <= i; ++j) {
                L.csrprop.expect(!sr[j]->interior_contains(S[s]), [&] {
                    return note("free server " + std::to_string(s) + " inside the search interval of phase " +
                                    std::to_string(j),
                                i, to_string(*sr[j]));
                });
            }
        }
        const Rational& si = S[ph.server];
        L.csrprop.expect(std::any_of(sigma.begin(), sigma.end(),
                                     [&](int id) { return g.nodes[id].extent.low == si || g.nodes[id].extent.high == si; }),
                         [&] { return note("chosen server at " + si.str() + " is no region endpoint", i); });
    }

    // O1
    for (const auto& a : g.nodes) {
        for (const auto& b : g.nodes) {
            if (a.id == b.id || a.birth >= b.end(n)) continue;
            const bool ok = !a.extent.interiors_intersect(b.extent) || b.extent.closure_contains(a.extent);
            L.o1.expect(ok, [&] {
                return note("earlier " + to_string(a.extent) + " vs later " + to_string(b.extent), b.birth);
            });
        }
    }

    const Rational w_opt = optimal_cost(inst);
    if (w_opt.is_zero()) {
        for (Check* c : L.after_levels()) c->skip("optimal cost is 0; levels are undefined");
        for (Check* c : L.all()) add(rep, std::move(*c));
        return;
    }
    LevelAssignment levels;
    try {
        levels = assign_edge_levels(trace, g, w_opt);
    } catch (const AnalysisError& e) {
        for (Check* c : L.after_levels()) c->skip(std::string("levels unavailable: ") + e.what());
        for (Check* c : L.all()) add(rep, std::move(*c));
        return;
    }

    for (const auto& node : g.nodes) {
        const int k = levels.node_level[node.id];
        if (k < 1) continue;
        const auto same = std::count_if(node.predecessors.begin(), node.predecessors.end(),
                                        [&](int p) { return levels.node_level[p] == k; });
        L.onelevelk.expect(same <= 1, [&] {
            return note(std::to_string(same) + " level-" + std::to_string(k) + " predecessors", node.birth,
                        to_string(node.extent));
        });
    }

    const Rational two_t_opt = Rational(2) * t * w_opt;
    const Rational t_opt = t * w_opt;
    {
        // The final region is itself an interior-disjoint family.
        Rational w_final;
        for (int id : g.sigma.back()) w_final += offline_cost_inside(trace, g.nodes[id]);
        L.costbnd_max.expect(w_final <= t_opt, [&] { return compare(w_final, t_opt, -1, "final region"); });
    }
    for (int k : edge_levels_present(levels)) {
        if (k < 1) continue;
        LevelKStructure st;
        try {
            st = level_k_structure(g, levels, k);
        } catch (const AnalysisError& e) {
            L.e1.expect(false, [&] { return note(e.what()); });
            continue;
        }

        std::vector<int> owner(trace.size(), 0);
        for (std::size_t a = 0; a < st.intervals.size(); ++a) {
            const auto& mi = st.intervals[a];
            const auto& C = g.nodes[mi.node];
            const std::string where = "level " + std::to_string(k);
            for (int p : mi.edges) ++owner[p];
            for (std::size_t b = a + 1; b < st.intervals.size(); ++b) {
                const auto& D = g.nodes[st.intervals[b].node];
                L.partition.expect(!C.extent.interiors_intersect(D.extent), [&] {
                    return note(where + ": maximal intervals overlap " + to_string(D.extent), -1, to_string(C.extent));
                });
            }

            // E1 / E2
            bool levels_ok = std::all_of(mi.chain.begin(), mi.chain.end(),
                                         [&](int id) { return levels.node_level[id] == k; });
            const auto& first = g.nodes[mi.chain.front()];
            const bool minimal = std::none_of(first.predecessors.begin(), first.predecessors.end(),
                                              [&](int p) { return levels.node_level[p] == k; });
            const bool maximal = mi.chain.back() == mi.node &&
                                 (C.alive_at_end() || levels.node_level[C.successor] > k);
            L.e1.expect(levels_ok && minimal && maximal, [&] { return note(where, -1, to_string(C.extent)); });
            for (std::size_t j = 0; j + 1 < mi.chain.size(); ++j) {
                const auto& lo = g.nodes[mi.chain[j]].extent;
                const auto& hi = g.nodes[mi.chain[j + 1]].extent;
                L.e2.expect(hi.closure_contains(lo), [&] {
                    return note(where + ": " + to_string(lo) + " not inside " + to_string(hi), -1, to_string(C.extent));
                });
            }

            // C1 / C2
            for (std::size_t x = 0; x < mi.comp.size(); ++x) {
                const auto& cx = g.nodes[mi.comp[x]].extent;
                L.c1.expect(C.extent.closure_contains(cx), [&] {
                    return note(where + ": comp " + to_string(cx) + " outside", -1, to_string(C.extent));
                });
                for (std::size_t y = x + 1; y < mi.comp.size(); ++y) {
                    const auto& cy = g.nodes[mi.comp[y]].extent;
                    L.c1.expect(!cx.interiors_intersect(cy), [&] {
                        return note(where + ": comp " + to_string(cx) + " overlaps " + to_string(cy), -1,
                                    to_string(C.extent));
                    });
                }
            }
            std::set<int> own(mi.edges.begin(), mi.edges.end());
            auto covered = [&](const Rational& x) {
                return std::any_of(mi.comp.begin(), mi.comp.end(),
                                   [&](int id) { return g.nodes[id].extent.closure_contains(x); });
            };
            for (int p : mi.all_edges) {
                if (own.count(p)) continue;
                const Rational& s = S[trace.phases[p].server];
                const Rational& r = R[trace.phases[p].request];
                L.c2.expect(covered(s) && covered(r), [&] {
                    return note(where + ": edge of phase " + std::to_string(p) + " outside every comp interval", p,
                                to_string(C.extent));
                });
            }
        }
        for (int p = 0; p < trace.size(); ++p) {
            if (levels.edge_level[p] != k) continue;
            L.partition.expect(owner[p] == 1, [&] {
                return note("level-" + std::to_string(k) + " edge covered " + std::to_string(owner[p]) + " times", p);
            });
        }

        // costbnd on the two disjoint families
        Rational w_max, w_comp;
        for (const auto& mi : st.intervals) {
            w_max += offline_cost_inside(trace, g.nodes[mi.node]);
            for (int c : mi.comp) w_comp += offline_cost_inside(trace, g.nodes[c]);
        }
        L.costbnd_max.expect(w_max <= t_opt, [&] { return compare(w_max, t_opt, -1, "level " + std::to_string(k)); });
        L.costbnd_comp.expect(w_comp <= t_opt, [&] { return compare(w_comp, t_opt, -1, "level " + std::to_string(k)); });

        Rational sum_opt;
        for (const auto& mi : st.intervals) {
            std::vector<Rational> ss, rr;
            for (int p : mi.edges) {
                ss.push_back(S[trace.phases[p].server]);
                rr.push_back(R[trace.phases[p].request]);
            }
            sum_opt += line_matching_cost(ss, rr);
        }
        L.optcost.expect(sum_opt <= two_t_opt, [&] { return compare(sum_opt, two_t_opt, -1, "level " + std::to_string(k)); });

        for (const auto& x : extract_level_instances(st, trace, g)) {
            const std::string where = "level " + std::to_string(k);
            const std::string box = to_string(g.nodes[x.maximal_node].extent);
            L.ws_sep.expect(x.well_separated, [&] {
                return note(where + ", frame from " + to_string(g.nodes[x.minimal_node].extent), -1, box);
            });
            if (!x.well_separated) continue;
            L.ws_align.expect(x.well_aligned, [&] { return note(where, -1, box); });
            if (x.far_check_applies) {
                L.ws_far.expect(x.short_far_phases.empty(), [&] {
                    return note(where + ": short far edge", x.short_far_phases.front(), box);
                });
            }
            if (!x.well_aligned) continue;
            const Rational opt_here = line_matching_cost(x.points.servers, x.points.requests);
            const WspcReport w = check_wspc(x.points, *x.classes, x.frame, opt_here);
            auto put = [&](Check& c, const Inequality& q) {
                c.expect(q.holds, [&] { return compare(q.lhs, q.rhs, -1, where, box); });
            };
            put(L.wspc, w.main);
            put(L.wspc_i, w.close_is_optimal);
            put(L.wspc_ii, w.med_bound);
            put(L.wspc_iii, w.cf_bound);
            put(L.wspc_iv, w.close_vs_cf);
        }
    }
    if (t != Rational(3)) L.ws_far.skip("far-edge claim is stated for t = 3");

    for (Check* c : L.all()) add(rep, std::move(*c));
}

}  // namespace

VerificationReport check_all_lemmas(const RunTrace<Rational>& trace, const LemmaOptions& options) {
    VerificationReport rep;
    general_lemmas(trace, rep);
    line_lemmas(trace, options, rep);
    return rep;
}

Rational optimal_cost(const Instance& instance) {
    if (instance.is_line()) return line_matching_cost(instance.servers(), instance.requests());
    return matching_cost(instance, exact_min_cost_matching(instance));
}

RatioResult final_ratio_check(const RunTrace<Rational>& trace) {
    RatioResult out;
    out.w_online = trace.online_cost;
    out.w_opt = optimal_cost(trace.instance);
    if (out.w_opt.is_zero()) {
        if (!out.w_online.is_zero()) throw std::domain_error("optimal cost is 0 but the online cost is not");
        out.ratio = Rational(1);
    } else {
        out.ratio = out.w_online / out.w_opt;
    }
    out.normalized = out.ratio.to_double() / (1.0 + std::log2(static_cast<double>(trace.instance.size())));
    return out;
}

VerificationReport verify_trace(const RunTrace<Rational>& trace, const VerifyOptions& options) {
    VerificationReport rep = check_invariants(trace);
    rep.append(check_all_lemmas(trace, options.lemmas));
    if (options.oracle_replay) rep.append(check_oracle_replay(trace));
    return rep;
}

nlohmann::json verification_document(const RunTrace<Rational>& trace, const VerificationReport& report,
                                     const LemmaOptions& options) {
    nlohmann::json j;
    const Instance& inst = trace.instance;
    j["instance"] = {{"n", inst.size()}, {"t", inst.t().str()}, {"metric", inst.is_line() ? "line" : "table"}};
    const RatioResult ratio = final_ratio_check(trace);
    j["w_online"] = ratio.w_online.str();
    j["w_opt"] = ratio.w_opt.str();
    j["ratio"] = ratio.ratio.str();
    j["ratio_normalized"] = ratio.normalized;
    j["passed"] = report.passed();
    j["checks"] = report.to_json();

    if (inst.is_line() && trace.has_snapshots) {
        bool connected = true;
        for (int i = 0; i < trace.size() && connected; ++i) connected = search_spans_connected(trace, i);
        if (connected) {
            const RegionGenealogy g = build_genealogy(trace, options.policy);
            std::optional<LevelAssignment> levels;
            if (!ratio.w_opt.is_zero()) {
                try {
                    levels = assign_edge_levels(trace, g, ratio.w_opt);
                } catch (const AnalysisError&) {
                }
            }
            j["analysis"] = analysis_summary_json(trace, g, levels ? &*levels : nullptr, report.failures());
            j["max_level"] = levels ? levels->max_level() : 0;
        } else {
            j["analysis"] = nullptr;
        }
    } else {
        j["analysis"] = nullptr;
    }
    return j;
}

}  // namespace rmatch
