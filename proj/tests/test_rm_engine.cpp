#include <gtest/gtest.h>

#include <functional>
#include <optional>
#include <random>

#include "rmatch/offline_opt.hpp"
#include "rmatch/rm_engine.hpp"
#include "test_util.hpp"

using namespace rmatch;
using rmatch::testing::line;
using rmatch::testing::Q;

namespace {

struct Candidate {
    Rational phi;
    int edges = 0;
    int terminal = 0;
};

// Exhaustive search over simple alternating paths from r; written against
// the instance directly, without the engine's distance oracle or duals.
Candidate enumerate_best_path(const Instance& inst, const std::vector<int>& server_mate, int r, const Rational& t) {
    const int n = inst.size();
    std::vector<int> request_mate(n, kUnmatched);
    for (int s = 0; s < n; ++s) {
        if (server_mate[s] != kUnmatched) request_mate[server_mate[s]] = s;
    }
    std::optional<Candidate> best;
    std::vector<char> used_s(n, 0), used_r(n, 0);
    std::function<void(int, Rational, int)> go = [&](int req, Rational phi, int edges) {
        used_r[req] = 1;
        for (int s = 0; s < n; ++s) {
            if (used_s[s] || request_mate[req] == s) continue;
            Rational p = phi + t * distance(inst, s, req);
            if (server_mate[s] == kUnmatched) {
                Candidate c{p, edges + 1, s};
                if (!best || c.phi < best->phi || (c.phi == best->phi && c.edges < best->edges) ||
                    (c.phi == best->phi && c.edges == best->edges && c.terminal < best->terminal)) {
                    best = c;
                }
                continue;
            }
            const int next = server_mate[s];
            if (used_r[next]) continue;
            used_s[s] = 1;
            go(next, p - distance(inst, s, next), edges + 2);
            used_s[s] = 0;
        }
        used_r[req] = 0;
    };
    go(r, Rational(0), 0);
    return *best;
}

}  // namespace

TEST(Search, W1FirstPhase) {
    auto inst = line({"0", "10"}, {"1", "2"});
    DualState<Rational> st(2);
    DistanceOracle<Rational> d(inst);
    SearchTree tree;
    auto p = min_tnet_cost_path(st, d, 0, Rational(3), &tree);
    EXPECT_EQ(p.terminal, 0);
    EXPECT_EQ(p.net_cost, Rational(3));
    EXPECT_EQ(p.length, Rational(1));
    EXPECT_EQ(p.edge_count(), 1);
    EXPECT_EQ(st.y_request[0], Rational(3));
    EXPECT_EQ(st.y_server[0], Rational(0));
    EXPECT_EQ(tree.requests, std::vector<int>({0}));
    EXPECT_EQ(tree.servers, std::vector<int>({0}));
}

TEST(Search, W1SecondPhaseDuals) {
    auto inst = line({"0", "10"}, {"1", "2"});
    auto trace = run_online<Rational>(inst);
    ASSERT_EQ(trace.size(), 2);
    const auto& ph = trace.phases[1];
    EXPECT_EQ(ph.server, 1);
    EXPECT_EQ(ph.path.net_cost, Rational(24));
    EXPECT_EQ(ph.path.length, Rational(8));
    EXPECT_EQ(ph.path.edge_count(), 1);
    EXPECT_EQ(ph.after_search.servers[0], Rational(-18));
    EXPECT_EQ(ph.after_search.requests[0], Rational(19));
    EXPECT_EQ(ph.after_search.requests[1], Rational(24));
    EXPECT_EQ(ph.after_augment.requests[1], Rational(8));
    EXPECT_EQ(ph.y_max_after[0], Rational(19));
    EXPECT_EQ(ph.y_max_after[1], Rational(24));
    EXPECT_EQ(ph.tree.requests, std::vector<int>({0, 1}));
    EXPECT_EQ(ph.kind, PathClass::Short);
    EXPECT_EQ(trace.online_cost, Rational(9));
    EXPECT_EQ(trace.phases[0].after_augment.requests[0], Rational(1));
    EXPECT_EQ(trace.phases[0].y_max_after[0], Rational(3));
}

TEST(Search, W2ThreeEdgePath) {
    auto inst = line({"0", "100"}, {"1", "1/2"});
    auto trace = run_online<Rational>(inst);
    const auto& ph = trace.phases[1];
    EXPECT_EQ(ph.path.net_cost, Q("595/2"));
    EXPECT_EQ(ph.path.length, Q("201/2"));
    EXPECT_EQ(ph.path.edge_count(), 3);
    ASSERT_EQ(ph.path.edges.size(), 3u);
    EXPECT_EQ(ph.path.edges[0], (PathEdge{{0, 1}, false}));
    EXPECT_EQ(ph.path.edges[1], (PathEdge{{0, 0}, true}));
    EXPECT_EQ(ph.path.edges[2], (PathEdge{{1, 0}, false}));
    EXPECT_EQ(ph.kind, PathClass::Short);
    EXPECT_EQ(trace.offline, Matching({{0, 1}, {1, 0}}));
    EXPECT_EQ(trace.online_cost, Q("201/2"));
    EXPECT_EQ(trace.online, Matching({{0, 0}, {1, 1}}));
}

TEST(Augment, SingleEdge) {
    auto inst = line({"0", "10"}, {"1", "2"});
    DualState<Rational> st(2);
    DistanceOracle<Rational> d(inst);
    auto p = min_tnet_cost_path(st, d, 0, Rational(3));
    augment(st, d, p, Rational(3));
    EXPECT_EQ(st.y_request[0], Rational(1));
    EXPECT_EQ(st.y_server[0], Rational(0));
    EXPECT_EQ(st.offline_matching(), Matching({{0, 0}}));
}

TEST(Augment, ZeroLengthEdgeLeavesDual) {
    auto inst = line({"5"}, {"5"});
    auto trace = run_online<Rational>(inst);
    EXPECT_EQ(trace.phases[0].after_search.requests[0], Rational(0));
    EXPECT_EQ(trace.phases[0].after_augment.requests[0], Rational(0));
    EXPECT_EQ(trace.online_cost, Rational(0));
}

TEST(Classify, Boundaries) {
    EXPECT_EQ(classify_edge(Rational(3), Rational(10), Rational(3)), PathClass::Long);
    EXPECT_EQ(classify_edge(Rational(3), Rational(6), Rational(3)), PathClass::Short);
    EXPECT_EQ(classify_edge(Q("595/2"), Q("201/2"), Rational(3)), PathClass::Short);
    EXPECT_EQ(classify_edge(3.0, 6.0, 3.0), PathClass::Short);
    EXPECT_EQ(classify_edge(3.0, 6.5, 3.0), PathClass::Long);
}

TEST(TNetCost, Formula) {
    auto inst = line({"0", "2", "4"}, {"2", "0", "6"});
    // single non-matching edge of length 2
    EXPECT_EQ(t_net_cost(inst, std::vector<Edge>{{0, 0}}, Matching{}, 3), Rational(6));
    Matching off({{0, 1}});
    std::vector<Edge> p{{0, 0}, {0, 1}, {1, 1}};  // lengths 2, 0, 2
    EXPECT_EQ(t_net_cost(inst, p, off, 3), Rational(12));
    auto w2 = line({"0", "100"}, {"1", "1/2"});
    std::vector<Edge> q{{0, 1}, {0, 0}, {1, 0}};
    EXPECT_EQ(t_net_cost(w2, q, Matching({{0, 0}}), 3), Q("595/2"));
    std::vector<Edge> broken{{0, 1}, {1, 0}};
    EXPECT_THROW(t_net_cost(w2, broken, Matching({{0, 0}}), 3), std::invalid_argument);
}

TEST(TNetCost, MixedPath) {
    // non-matching lengths 2 and 4, matching length 1
    auto inst = line({"2", "7"}, {"0", "3"});
    std::vector<Edge> p{{0, 0}, {0, 1}, {1, 1}};
    EXPECT_EQ(t_net_cost(inst, p, Matching({{0, 1}}), 3), Rational(17));
}

TEST(Engine, OnlineCostIsSumOfEdges) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 50; ++k) {
        auto inst = rmatch::testing::random_line(rng, 1 + static_cast<int>(rng() % 10));
        auto trace = run_online<Rational>(inst);
        EXPECT_EQ(trace.online_cost, matching_cost(inst, trace.online));
        EXPECT_EQ(static_cast<int>(trace.online.size()), inst.size());
        Rational total_len;
        for (const auto& ph : trace.phases) total_len += ph.path.length;
        EXPECT_LE(trace.online_cost, total_len);
    }
}

TEST(Engine, MatchesExhaustiveSearchEveryPhase) {
    std::mt19937_64 rng(42);
    for (int k = 0; k < 150; ++k) {
        const int n = 1 + static_cast<int>(rng() % 6);
        const Rational t = (k % 3 == 0) ? Q("3/2") : Rational(3);
        auto inst = rmatch::testing::random_line(rng, n, 1 + static_cast<int>(rng() % 20), t);
        RmEngine<Rational> engine(inst, {.record_snapshots = true, .full_self_check = true});
        while (!engine.finished()) {
            const int r = engine.next_request();
            const auto mates = engine.state().server_mate;
            const Candidate want = enumerate_best_path(inst, mates, r, t);
            const auto& ph = engine.process_next();
            ASSERT_EQ(ph.path.net_cost, want.phi) << "k=" << k << " r=" << r;
            ASSERT_EQ(ph.path.edge_count(), want.edges) << "k=" << k << " r=" << r;
            ASSERT_EQ(ph.server, want.terminal) << "k=" << k << " r=" << r;
        }
    }
}

TEST(Engine, InvariantsHoldAfterEveryPhase) {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 60; ++k) {
        auto inst = rmatch::testing::random_line(rng, 2 + static_cast<int>(rng() % 14), 30);
        RmEngine<Rational> engine(inst);
        DistanceOracle<Rational> d(inst);
        while (!engine.finished()) {
            const auto& ph = engine.process_next();
            EXPECT_EQ(feasibility_violation(engine.state(), d, Rational(3)), "");
            // y(r_i) after the search equals the path's t-net-cost
            EXPECT_EQ(ph.after_search.requests[ph.request], ph.path.net_cost);
            EXPECT_GE(ph.path.net_cost, Rational(0));
        }
        // M and M* cover the same servers
        auto st = engine.state();
        auto trace = std::move(engine).take_trace();
        std::vector<char> online(inst.size(), 0);
        for (const auto& e : trace.online) online[e.server] = 1;
        for (int s = 0; s < inst.size(); ++s) EXPECT_EQ(online[s], st.is_free(s) ? 0 : 1);
    }
}

TEST(Engine, CoincidentRequestTakesZeroPath) {
    auto inst = line({"0", "4", "9"}, {"4", "4", "0"});
    auto trace = run_online<Rational>(inst);
    EXPECT_EQ(trace.phases[0].server, 1);
    EXPECT_EQ(trace.phases[0].path.net_cost, Rational(0));
}

TEST(Engine, TieGoesToSmallerServerIndex) {
    auto inst = line({"2", "0"}, {"1", "5"});
    auto trace = run_online<Rational>(inst);
    EXPECT_EQ(trace.phases[0].server, 0);
}

TEST(Engine, FloatModeAgreesWithExact) {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 30; ++k) {
        auto inst = rmatch::testing::random_line(rng, 2 + static_cast<int>(rng() % 20), 1000);
        auto exact = run_online<Rational>(inst, {.record_snapshots = false});
        auto approx = run_online<double>(inst, {.record_snapshots = false});
        const double e = exact.online_cost.to_double();
        EXPECT_LE(std::fabs(approx.online_cost - e), 1e-6 * std::max(1.0, e));
    }
}

TEST(Engine, TableMetric) {
    std::vector<std::vector<Rational>> d(3, std::vector<Rational>(3));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) d[i][j] = Rational(std::abs(i - j));
    }
    auto inst = Instance::table(d, {1, 1, 0}, 3);
    auto trace = run_online<Rational>(inst, {.record_snapshots = true, .full_self_check = true});
    EXPECT_EQ(trace.phases[0].server, 1);
    EXPECT_EQ(static_cast<int>(trace.online.size()), 3);
}

TEST(Engine, ErrorsOnMisuse) {
    auto inst = line({"0"}, {"1"});
    RmEngine<Rational> engine(inst);
    engine.process_next();
    EXPECT_THROW(engine.process_next(), std::logic_error);
    DualState<Rational> st(1);
    DistanceOracle<Rational> d(inst);
    EXPECT_THROW(min_tnet_cost_path(st, d, 3, Rational(3)), std::out_of_range);
}
