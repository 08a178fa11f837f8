#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rmatch/instance.hpp"

namespace rmatch {

enum class GeneratorKind { Uniform, PerturbedPermutation, ClusterGap };

const char* to_string(GeneratorKind kind);
/// Accepts "uniform", "perturbed-permutation" and "cluster-gap". Throws
/// std::invalid_argument otherwise.
GeneratorKind parse_generator_kind(std::string_view name);

/// Deterministic line instance for (kind, n, seed). All coordinates are
/// dyadic rationals.
///
/// uniform: servers and requests i.i.d. on [0, 1) at 2^-32 granularity.
///
/// perturbed-permutation: servers at 0..n-1, request i at i + d_i with d_i
/// uniform in (-1/2, 1/2); requests arrive in a random order.
///
/// cluster-gap: a left and a right cluster of width 1 separated by a gap of
/// about n. Between them sit a server s_a and a request r_1 at distance 1/4
/// with D = n/2 from r_1 to the left cluster's right end and from s_a to the
/// right cluster's left end. r_1 arrives first, then a request on s_a, then
/// the cluster requests in random order. The left cluster has one spare
/// server. Nearest-server assignment sends the second request to the right
/// cluster and later pays a crossing of the gap; a 3-edge augmenting path
/// reaches the spare instead. Needs n >= 3; smaller n give one co-located
/// pair per cluster.
///
/// Throws std::invalid_argument for n < 1.
Instance generate(GeneratorKind kind, int n, std::uint64_t seed, const Rational& t = Rational(3));

/// Each arriving request takes the nearest free server, ties to the smaller
/// index. Edges are listed in arrival order.
Matching greedy_online(const Instance& instance);

enum class ArithMode { Exact, Float };

const char* to_string(ArithMode mode);
/// "exact" or "float"; throws std::invalid_argument otherwise.
ArithMode parse_arith_mode(std::string_view name);

struct ExperimentConfig {
    std::vector<GeneratorKind> kinds;
    std::vector<int> ns;
    int seeds = 1;            // seeds 0..seeds-1 per (kind, n)
    Rational t = Rational(3);
    ArithMode mode = ArithMode::Exact;
    /// Sizes above this run in floating point even in exact mode.
    std::optional<int> float_above;
    bool verify = false;      // full check suite on exact runs
    std::string output;

    /// Throws std::invalid_argument on empty kinds/ns, n < 1, seeds < 1 or t <= 1.
    void validate() const;
};

/// Fields: kinds (names), n (list), seeds, t ("p/q" string or integer),
/// arith, float_above, verify, output. Missing fields keep their defaults;
/// kinds and n are required.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

/// Applies RM_ARITH (exact|float) from the environment when set.
void apply_environment(ExperimentConfig& config);

struct ResultRow {
    std::string id;
    GeneratorKind kind = GeneratorKind::Uniform;
    int n = 0;
    std::uint64_t seed = 0;
    bool exact = true;
    double w_online = 0;
    double w_opt = 0;
    double ratio = 0;
    double ratio_norm = 0;
    std::optional<int> max_level;      // exact runs only
    double short_cost_frac = 0;        // w(M_short) / w(M), 0 when w(M) = 0
    double greedy_cost = 0;
    std::optional<bool> checks_passed; // set when the run was verified
};

/// One row per (kind, n, seed), sorted by (kind, n, seed).
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

/// Single run used by run_experiment.
ResultRow run_one(GeneratorKind kind, int n, std::uint64_t seed, const ExperimentConfig& config);

inline constexpr const char* kCsvHeader =
    "id,kind,n,seed,w_online,w_opt,ratio,ratio_norm,max_level,short_cost_frac,greedy_cost,checks_passed";

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);

}  // namespace rmatch
