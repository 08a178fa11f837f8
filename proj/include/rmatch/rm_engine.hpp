#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmatch/instance.hpp"

namespace rmatch {

/// Arithmetic policy for the engine. Rational is exact; double compares with
/// a relative tolerance of 1e-9 and exists only for large experiments.
template <class Num>
struct NumTraits;

template <>
struct NumTraits<Rational> {
    static constexpr bool exact = true;
    static Rational from(const Rational& x) { return x; }
    static bool less(const Rational& a, const Rational& b) { return a < b; }
    static bool equal(const Rational& a, const Rational& b) { return a == b; }
    static double to_double(const Rational& x) { return x.to_double(); }
};

template <>
struct NumTraits<double> {
    static constexpr bool exact = false;
    static constexpr double tolerance = 1e-9;
    static double from(const Rational& x) { return x.to_double(); }
    static double scale(double a, double b) { return std::max({1.0, std::fabs(a), std::fabs(b)}); }
    static bool less(double a, double b) { return a < b - tolerance * scale(a, b); }
    static bool equal(double a, double b) { return std::fabs(a - b) <= tolerance * scale(a, b); }
    static double to_double(double x) { return x; }
};

/// d(s, r) for an instance, converted once into the engine's arithmetic.
template <class Num>
class DistanceOracle {
public:
    explicit DistanceOracle(const Instance& instance);

    Num operator()(ServerIndex s, RequestIndex r) const;
    int size() const { return n_; }

private:
    int n_ = 0;
    bool line_ = true;
    std::vector<Num> servers_;
    std::vector<Num> requests_;
    std::vector<Num> table_;  // row-major server x request, table mode only
};

/// Offline matching M* with dual weights. Invariants maintained by the
/// engine after every phase:
///   y(s) + y(r) <= t d(s,r) for all pairs, with equality at d(s,r) on M*;
///   y(s) <= 0, and 0 for free servers; y(r) >= 0, and 0 before arrival.
template <class Num>
struct DualState {
    explicit DualState(int n = 0);

    std::vector<int> server_mate;   // request index or kUnmatched
    std::vector<int> request_mate;  // server index or kUnmatched
    std::vector<Num> y_server;
    std::vector<Num> y_request;
    std::vector<Num> y_max;  // largest dual each request has held so far
    std::vector<char> arrived;

    int size() const { return static_cast<int>(server_mate.size()); }
    bool is_free(ServerIndex s) const { return server_mate[s] == kUnmatched; }
    Matching offline_matching() const;
    std::vector<ServerIndex> free_servers() const;
};

/// One edge of an alternating path, tagged with its membership in M* at the
/// time the path was found.
struct PathEdge {
    Edge edge;
    bool in_offline = false;

    friend bool operator==(const PathEdge&, const PathEdge&) = default;
};

template <class Num>
struct AugmentingPath {
    RequestIndex request = 0;
    ServerIndex terminal = 0;
    std::vector<PathEdge> edges;  // starts at `request`, ends at free `terminal`
    Num net_cost{};               // t * (non-matching length) - (matching length)
    Num length{};                 // total length of all edges

    int edge_count() const { return static_cast<int>(edges.size()); }
};

/// Alternating-tree membership of one search.
struct SearchTree {
    std::vector<ServerIndex> servers;
    std::vector<RequestIndex> requests;
};

enum class PathClass { Short, Long };

inline const char* to_string(PathClass c) { return c == PathClass::Short ? "short" : "long"; }

template <class Num>
struct DualSnapshot {
    std::vector<Num> servers;
    std::vector<Num> requests;
};

template <class Num>
struct PhaseTrace {
    int phase = 0;  // 0-based; phase i serves request i
    RequestIndex request = 0;
    ServerIndex server = 0;  // terminal of the path, the online partner
    AugmentingPath<Num> path;
    SearchTree tree;
    PathClass kind = PathClass::Short;
    Num nearest_free_distance{};  // min over free servers at phase start

    // Filled only when EngineOptions::record_snapshots is set.
    std::vector<ServerIndex> free_before;
    DualSnapshot<Num> after_search;
    DualSnapshot<Num> after_augment;
    std::vector<Num> y_max_after;
    std::vector<int> offline_after;  // server -> request of M* after this phase
};

template <class Num>
struct RunTrace {
    Instance instance;
    Num t{};
    std::vector<PhaseTrace<Num>> phases;
    Matching online;
    Matching offline;
    Num online_cost{};
    bool has_snapshots = false;

    int size() const { return static_cast<int>(phases.size()); }
};

struct EngineOptions {
    bool record_snapshots = true;
    /// Re-check feasibility on all n^2 pairs after each phase.
    bool full_self_check = false;
};

/// Raised when the dual state stops being feasible; always an engine bug.
class EngineInvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Hungarian-style search from an unmatched request. Runs Dijkstra over the
/// residual graph (reduced cost t d(s,r) - y(s) - y(r) on non-matching
/// request->server arcs, 0 on matching server->request arcs) with
/// lexicographic (distance, hop count) labels, then raises tree request duals
/// and lowers tree server duals by (terminal label - own label). Ties between
/// equally good free servers go to the smaller index. Throws
/// std::logic_error if no server is free.
template <class Num>
AugmentingPath<Num> min_tnet_cost_path(DualState<Num>& state, const DistanceOracle<Num>& d, RequestIndex r,
                                       const Num& t, SearchTree* tree = nullptr);

/// M* <- M* xor path; each request on the path loses (t-1) d(s,r) for its new
/// partner s. Throws EngineInvariantError if the result is infeasible.
template <class Num>
void augment(DualState<Num>& state, const DistanceOracle<Num>& d, const AugmentingPath<Num>& path,
             const Num& t);

template <class Num>
PathClass classify_edge(const Num& net_cost, const Num& length, const Num& t);

template <class Num>
PathClass classify_edge(const PhaseTrace<Num>& phase, const Num& t) {
    return classify_edge(phase.path.net_cost, phase.path.length, t);
}

/// One full phase: search, augment, record.
template <class Num>
PhaseTrace<Num> process_request(DualState<Num>& state, const DistanceOracle<Num>& d, RequestIndex r, const Num& t,
                                const EngineOptions& options = {});

/// Checks both feasibility conditions on every pair and the sign conditions.
/// Returns an empty string when feasible, otherwise a description.
template <class Num>
std::string feasibility_violation(const DualState<Num>& state, const DistanceOracle<Num>& d, const Num& t);

/// Processes requests one at a time in arrival order.
template <class Num>
class RmEngine {
public:
    explicit RmEngine(const Instance& instance, EngineOptions options = {});

    bool finished() const { return next_ >= instance_.size(); }
    RequestIndex next_request() const { return next_; }
    const PhaseTrace<Num>& process_next();
    const DualState<Num>& state() const { return state_; }
    const Num& t() const { return t_; }

    RunTrace<Num> take_trace() &&;

private:
    Instance instance_;
    EngineOptions options_;
    DistanceOracle<Num> distances_;
    Num t_;
    DualState<Num> state_;
    RequestIndex next_ = 0;
    std::vector<PhaseTrace<Num>> phases_;
    Matching online_;
    Num online_cost_{};
};

template <class Num>
RunTrace<Num> run_online(const Instance& instance, EngineOptions options = {});

/// t * (non-matching length) - (matching length) of an edge sequence that
/// starts at a request and alternates with respect to `offline`, starting
/// with a non-matching edge. Throws std::invalid_argument otherwise.
Rational t_net_cost(const Instance& instance, std::span<const Edge> path, const Matching& offline,
                    const Rational& t);

extern template class DistanceOracle<Rational>;
extern template class DistanceOracle<double>;
extern template struct DualState<Rational>;
extern template struct DualState<double>;
extern template class RmEngine<Rational>;
extern template class RmEngine<double>;

}  // namespace rmatch
