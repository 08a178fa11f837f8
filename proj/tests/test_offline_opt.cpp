#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "rmatch/offline_opt.hpp"
#include "test_util.hpp"

using namespace rmatch;
using rmatch::testing::line;
using rmatch::testing::Q;

namespace {

// Independent oracle: minimum over all n! assignments.
Rational enumerate_min_cost(const Instance& inst) {
    std::vector<int> perm(inst.size());
    std::iota(perm.begin(), perm.end(), 0);
    bool first = true;
    Rational best;
    do {
        Rational c;
        for (int s = 0; s < inst.size(); ++s) c += distance(inst, s, perm[s]);
        if (first || c < best) {
            best = c;
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

bool is_perfect(const Matching& m, int n) {
    std::vector<char> s(n, 0), r(n, 0);
    for (const auto& e : m) {
        if (e.server < 0 || e.server >= n || e.request < 0 || e.request >= n) return false;
        s[e.server] = r[e.request] = 1;
    }
    return static_cast<int>(m.size()) == n && std::count(s.begin(), s.end(), 1) == n &&
           std::count(r.begin(), r.end(), 1) == n;
}

}  // namespace

TEST(OptimalLineMatching, Examples) {
    auto a = line({"5"}, {"5"});
    EXPECT_EQ(optimal_line_matching(a), Matching({{0, 0}}));
    EXPECT_EQ(matching_cost(a, optimal_line_matching(a)), Rational(0));

    auto b = line({"0", "4"}, {"1", "2"});
    EXPECT_EQ(optimal_line_matching(b), Matching({{0, 0}, {1, 1}}));
    EXPECT_EQ(matching_cost(b, optimal_line_matching(b)), Rational(3));

    auto c = line({"0", "10"}, {"1", "2"});
    EXPECT_EQ(matching_cost(c, optimal_line_matching(c)), Rational(9));
}

TEST(OptimalLineMatching, TiesBrokenByIndexAnyTieSameCost) {
    auto inst = line({"1", "1", "0"}, {"1", "2", "1"});
    auto m = optimal_line_matching(inst);
    // sorted servers: 2(0), 0(1), 1(1); sorted requests: 0(1), 2(1), 1(2)
    EXPECT_EQ(m, Matching({{2, 0}, {0, 2}, {1, 1}}));
    // Swapping the tied servers keeps the cost.
    Matching swapped({{2, 0}, {1, 2}, {0, 1}});
    EXPECT_EQ(matching_cost(inst, m), matching_cost(inst, swapped));
}

TEST(OptimalLineMatching, RejectsTable) {
    auto inst = Instance::table({{0, 1}, {1, 0}}, {0, 1}, 3);
    EXPECT_THROW(optimal_line_matching(inst), std::invalid_argument);
    EXPECT_THROW(interval_decomposition_cost(inst), std::invalid_argument);
    EXPECT_THROW(check_opt_property(Matching{}, inst), std::invalid_argument);
}

TEST(IntervalDecomposition, W1Sweep) {
    auto d = interval_decomposition_cost(line({"0", "10"}, {"1", "2"}));
    EXPECT_EQ(d.cost, Rational(9));
    ASSERT_EQ(d.intervals.size(), 3u);
    EXPECT_EQ(d.intervals[0].imbalance, 1);
    EXPECT_EQ(d.intervals[1].imbalance, 0);
    EXPECT_EQ(d.intervals[2].imbalance, 1);
    EXPECT_EQ(d.intervals[0].length, Rational(1));
    EXPECT_EQ(d.intervals[1].length, Rational(1));
    EXPECT_EQ(d.intervals[2].length, Rational(8));
    EXPECT_EQ(d.intervals[2].low, Rational(2));
    EXPECT_EQ(d.intervals[2].high, Rational(10));
}

TEST(IntervalDecomposition, SmallCases) {
    EXPECT_EQ(interval_decomposition_cost(line({"0"}, {"7"})).cost, Rational(7));
    EXPECT_EQ(interval_decomposition_cost(line({"3", "1/2", "9"}, {"9", "3", "1/2"})).cost, Rational(0));
}

TEST(IntervalDecomposition, TilesTheHull) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        auto inst = rmatch::testing::random_line(rng, 6);
        auto d = interval_decomposition_cost(inst);
        ASSERT_EQ(d.intervals.size(), 11u);
        for (std::size_t j = 1; j < d.intervals.size(); ++j) {
            EXPECT_EQ(d.intervals[j].low, d.intervals[j - 1].high);
        }
        Rational lo = inst.servers()[0], hi = lo;
        for (const auto& x : inst.servers()) lo = min(lo, x), hi = max(hi, x);
        for (const auto& x : inst.requests()) lo = min(lo, x), hi = max(hi, x);
        EXPECT_EQ(d.intervals.front().low, lo);
        EXPECT_EQ(d.intervals.back().high, hi);
    }
}

TEST(ExactMinCost, Examples) {
    auto a = line({"3"}, {"8"});
    EXPECT_EQ(matching_cost(a, exact_min_cost_matching(a)), Rational(5));
    auto b = line({"0", "4"}, {"1", "2"});
    EXPECT_EQ(matching_cost(b, exact_min_cost_matching(b)), Rational(3));
    auto c = line({"0", "10"}, {"1", "2"});
    EXPECT_EQ(matching_cost(c, exact_min_cost_matching(c)), Rational(9));
}

TEST(ExactMinCost, TableMetric) {
    // Path metric 0-1-2-3 with unit steps; requests sit on sites 3,2,1,0.
    std::vector<std::vector<Rational>> d(4, std::vector<Rational>(4));
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) d[i][j] = Rational(std::abs(i - j));
    }
    auto inst = Instance::table(d, {3, 2, 1, 0}, 3);
    auto m = exact_min_cost_matching(inst);
    EXPECT_TRUE(is_perfect(m, 4));
    EXPECT_EQ(matching_cost(inst, m), Rational(0));
}

TEST(OracleAgreement, ThreeWaysAndBruteForce) {
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 200; ++k) {
        const int n = 1 + static_cast<int>(rng() % 7);
        auto inst = rmatch::testing::random_line(rng, n, 1 + static_cast<int>(rng() % 40));
        auto sorted = optimal_line_matching(inst);
        auto hung = exact_min_cost_matching(inst);
        ASSERT_TRUE(is_perfect(sorted, n));
        ASSERT_TRUE(is_perfect(hung, n));
        const Rational c1 = matching_cost(inst, sorted);
        EXPECT_EQ(c1, interval_decomposition_cost(inst).cost);
        EXPECT_EQ(c1, matching_cost(inst, hung));
        EXPECT_EQ(c1, enumerate_min_cost(inst));
        EXPECT_TRUE(check_opt_property(sorted, inst));
    }
}

TEST(OracleAgreement, LargerInstances) {
    std::mt19937_64 rng(77);
    for (int k = 0; k < 20; ++k) {
        const int n = 8 + static_cast<int>(rng() % 40);
        auto inst = rmatch::testing::random_line(rng, n, 1000);
        const Rational c1 = matching_cost(inst, optimal_line_matching(inst));
        EXPECT_EQ(c1, interval_decomposition_cost(inst).cost);
        EXPECT_EQ(c1, matching_cost(inst, exact_min_cost_matching(inst)));
    }
}

TEST(CheckOptProperty, Examples) {
    auto w1 = line({"0", "10"}, {"1", "2"});
    EXPECT_TRUE(check_opt_property(Matching({{0, 0}, {1, 1}}), w1));
    auto b = line({"0", "4"}, {"1", "2"});
    EXPECT_FALSE(check_opt_property(Matching({{0, 1}, {1, 0}}), b));
    EXPECT_TRUE(check_opt_property(Matching{}, b));
}

TEST(CheckOptProperty, TrueImpliesOptimal) {
    std::mt19937_64 rng(9);
    int certified = 0;
    for (int k = 0; k < 300; ++k) {
        const int n = 1 + static_cast<int>(rng() % 6);
        auto inst = rmatch::testing::random_line(rng, n, 10);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Edge> edges;
        for (int s = 0; s < n; ++s) edges.push_back({s, perm[s]});
        Matching m(edges);
        if (check_opt_property(m, inst)) {
            ++certified;
            EXPECT_EQ(matching_cost(inst, m), enumerate_min_cost(inst));
        }
    }
    EXPECT_GT(certified, 0);
}
