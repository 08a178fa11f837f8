#include <gtest/gtest.h>

#include <random>

#include "rmatch/instance.hpp"
#include "rmatch/instance_io.hpp"
#include "test_util.hpp"

using namespace rmatch;
using rmatch::testing::line;
using rmatch::testing::Q;

TEST(Rational, ParsesIntegersAndFractions) {
    EXPECT_EQ(Q("3"), Rational(3));
    EXPECT_EQ(Q("-7"), Rational(-7));
    EXPECT_EQ(Q("2/4"), Rational(1, 2));
    EXPECT_EQ(Q("2/4").str(), "1/2");
    EXPECT_EQ(Q("-6/3").str(), "-2");
    EXPECT_EQ(Rational(3, -6).str(), "-1/2");
}

TEST(Rational, RejectsMalformedText) {
    for (const char* bad : {"", "1.5", "1/0", "a", "1/", "/2", "1/2/3", "+-1", "1e3"}) {
        EXPECT_THROW(Rational::parse(bad), std::invalid_argument) << bad;
    }
}

TEST(Rational, LowestTermsPositiveDenominator) {
    Rational x = Rational(6, -4);
    EXPECT_EQ(x.numerator().get_str(), "-3");
    EXPECT_EQ(x.denominator().get_str(), "2");
}

TEST(Rational, ArithmeticIsExact) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> num(-1000000, 1000000), den(1, 1000000);
    for (int k = 0; k < 500; ++k) {
        Rational a(num(rng), den(rng));
        Rational b(num(rng), den(rng));
        EXPECT_EQ((a + b) - b, a);
        if (!b.is_zero()) EXPECT_EQ((a / b) * b, a);
        EXPECT_EQ(a - a, Rational(0));
    }
    EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
}

TEST(Rational, Ordering) {
    EXPECT_LT(Q("1/3"), Q("1/2"));
    EXPECT_GT(Q("-1/3"), Q("-1/2"));
    EXPECT_EQ(min(Q("1/3"), Q("1/2")), Q("1/3"));
    EXPECT_EQ(abs(Q("-5/2")), Q("5/2"));
}

TEST(Distance, LineExamples) {
    auto a = line({"0", "5", "1/2"}, {"1", "5", "100"});
    EXPECT_EQ(distance(a, 0, 0), Rational(1));
    EXPECT_EQ(distance(a, 1, 1), Rational(0));
    EXPECT_EQ(distance(a, 2, 2), Q("199/2"));
    EXPECT_THROW(distance(a, 3, 0), std::out_of_range);
    EXPECT_THROW(distance(a, 0, -1), std::out_of_range);
}

TEST(Distance, LineMetricAxioms) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        auto inst = rmatch::testing::random_line(rng, 5);
        for (int s = 0; s < 5; ++s) {
            for (int r = 0; r < 5; ++r) {
                EXPECT_GE(distance(inst, s, r), Rational(0));
                EXPECT_EQ(distance(inst, s, r), abs(inst.servers()[s] - inst.requests()[r]));
            }
        }
    }
}

TEST(Distance, TableLookupUsesRequestSite) {
    auto inst = Instance::table({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}, {2, 0, 1}, 3);
    EXPECT_EQ(distance(inst, 0, 0), Rational(2));
    EXPECT_EQ(distance(inst, 0, 1), Rational(0));
    EXPECT_EQ(distance(inst, 2, 2), Rational(1));
}

TEST(MatchingCost, Examples) {
    auto w1 = line({"0", "10"}, {"1", "2"});
    EXPECT_EQ(matching_cost(w1, Matching{}), Rational(0));
    EXPECT_EQ(matching_cost(w1, Matching({{0, 0}})), Rational(1));
    EXPECT_EQ(matching_cost(w1, Matching({{0, 0}, {1, 1}})), Rational(9));
}

TEST(Matching, RejectsRepeatedVertices) {
    EXPECT_THROW(Matching({{0, 0}, {0, 1}}), std::invalid_argument);
    EXPECT_THROW(Matching({{0, 1}, {1, 1}}), std::invalid_argument);
    Matching m;
    m.add({0, 0});
    EXPECT_THROW(m.add({1, 0}), std::invalid_argument);
    EXPECT_TRUE(m.contains({0, 0}));
    EXPECT_FALSE(m.contains({0, 1}));
}

TEST(ValidateInstance, AcceptsWellFormed) {
    RawInstance raw;
    raw.servers = {"0", "10"};
    raw.requests = {"1", "2"};
    auto inst = validate_instance(raw);
    EXPECT_EQ(inst.size(), 2);
    EXPECT_EQ(inst.t(), Rational(3));
    EXPECT_TRUE(inst.is_line());
}

static std::vector<std::string> problems_of(const RawInstance& raw) {
    try {
        validate_instance(raw);
    } catch (const InstanceError& e) {
        return e.problems();
    }
    return {};
}

static bool mentions(const std::vector<std::string>& ps, const std::string& needle) {
    for (const auto& p : ps) {
        if (p.find(needle) != std::string::npos) return true;
    }
    return false;
}

TEST(ValidateInstance, SizeMismatch) {
    RawInstance raw;
    raw.servers = {"0"};
    raw.requests = {"1", "2"};
    EXPECT_TRUE(mentions(problems_of(raw), "size mismatch"));
}

TEST(ValidateInstance, TMustExceedOne) {
    RawInstance raw;
    raw.servers = {"0"};
    raw.requests = {"1"};
    raw.t = "1";
    EXPECT_TRUE(mentions(problems_of(raw), "t must exceed 1"));
    raw.t = "1/2";
    EXPECT_TRUE(mentions(problems_of(raw), "t must exceed 1"));
}

TEST(ValidateInstance, ListsEveryProblem) {
    RawInstance raw;
    raw.servers = {"0", "x"};
    raw.requests = {"1"};
    raw.t = "1";
    auto ps = problems_of(raw);
    EXPECT_TRUE(mentions(ps, "size mismatch"));
    EXPECT_TRUE(mentions(ps, "t must exceed 1"));
    EXPECT_GE(ps.size(), 3u);
}

TEST(ValidateInstance, TableChecks) {
    RawInstance raw;
    raw.metric = "table";
    raw.requests = {"0", "1"};
    raw.distance_table = {{"0", "1"}, {"2", "0"}};
    EXPECT_TRUE(mentions(problems_of(raw), "symmetric"));
    raw.distance_table = {{"0", "-1"}, {"-1", "0"}};
    EXPECT_TRUE(mentions(problems_of(raw), "negative"));
    raw.distance_table = {{"0", "1", "5"}, {"1", "0", "1"}, {"5", "1", "0"}};
    raw.requests = {"0", "1", "2"};
    EXPECT_TRUE(mentions(problems_of(raw), "triangle"));
    raw.distance_table = {{"0", "1", "2"}, {"1", "0", "1"}, {"2", "1", "0"}};
    EXPECT_TRUE(problems_of(raw).empty());
    raw.requests = {"0", "1", "3"};
    EXPECT_FALSE(problems_of(raw).empty());
}

TEST(InstanceJson, RoundTripLine) {
    auto inst = line({"0", "1/2", "-3"}, {"7/3", "0", "2"}, "5/2");
    auto back = validate_instance(raw_instance_from_json(instance_to_json(inst)));
    EXPECT_EQ(back.servers(), inst.servers());
    EXPECT_EQ(back.requests(), inst.requests());
    EXPECT_EQ(back.t(), inst.t());
}

TEST(InstanceJson, RoundTripTable) {
    auto inst = Instance::table({{0, 1}, {1, 0}}, {1, 1}, 3);
    auto back = validate_instance(raw_instance_from_json(instance_to_json(inst)));
    EXPECT_FALSE(back.is_line());
    EXPECT_EQ(back.distance_table(), inst.distance_table());
    EXPECT_EQ(back.request_sites(), inst.request_sites());
}

TEST(InstanceJson, AcceptsIntegerScalars) {
    auto j = nlohmann::json::parse(R"({"t":3,"metric":"line","servers":[0,10],"requests":["1","2"]})");
    auto inst = validate_instance(raw_instance_from_json(j));
    EXPECT_EQ(inst.servers()[1], Rational(10));
}

TEST(InstanceJson, ReportsStructuralProblems) {
    auto j = nlohmann::json::parse(R"({"servers":[0.5],"requests":"x"})");
    EXPECT_THROW(raw_instance_from_json(j), InstanceError);
}
