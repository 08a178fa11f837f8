#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmatch/rm_engine.hpp"

namespace rmatch {

/// An interval with open interior (low, high) and closure [low, high].
/// low == high is a degenerate point region with empty interior.
struct Region {
    Rational low;
    Rational high;

    Rational length() const { return high - low; }
    bool is_point() const { return low == high; }
    bool interior_contains(const Rational& x) const { return low < x && x < high; }
    bool closure_contains(const Rational& x) const { return low <= x && x <= high; }
    bool closure_contains(const Region& o) const { return low <= o.low && o.high <= high; }
    bool closures_intersect(const Region& o) const { return !(high < o.low || o.high < low); }
    bool interiors_intersect(const Region& o) const { return max(low, o.low) < min(high, o.high); }

    static Region hull(const Region& a, const Region& b) { return {min(a.low, b.low), max(a.high, b.high)}; }

    friend bool operator==(const Region&, const Region&) = default;
};

std::string to_string(const Region& r);

/// How search intervals merge into the cumulative search region when they
/// only touch. Closed merges intervals whose closures meet; Open merges only
/// on overlapping interiors (a point region merges only with an interval
/// whose interior holds it, or with the same point).
enum class MergePolicy { Closed, Open };

bool regions_merge(const Region& a, const Region& b, MergePolicy policy);

/// Raised when a trace contradicts a structural property the analysis relies
/// on (for example a disconnected search interval).
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// (r - y/t, r + y/t) with y the largest dual r has held through `phase`.
/// Needs a line trace with snapshots; throws std::invalid_argument if r has
/// not arrived by `phase`.
Region span(const RunTrace<Rational>& trace, RequestIndex r, int phase);

/// Hull of the closed spans of the phase's tree requests. Throws
/// AnalysisError if the closed spans do not form one interval.
Region search_interval(const RunTrace<Rational>& trace, int phase);

/// True iff the closed spans of the phase's tree requests form one interval.
bool search_spans_connected(const RunTrace<Rational>& trace, int phase);

struct GenealogyNode {
    int id = 0;  // equals the birth phase: every phase creates exactly one node
    Region extent;
    int birth = 0;
    int death = -1;  // -1 while alive in the final region
    std::vector<int> predecessors;
    int successor = -1;

    bool alive_at_end() const { return death < 0; }
    /// One past the last phase after which this node is in the region.
    int end(int n) const { return death < 0 ? n : death; }
};

/// Every interval that ever appears in a cumulative search region, with its
/// birth/death phases and merge links. sigma[i] lists the node ids forming
/// the region after phase i, left to right.
struct RegionGenealogy {
    MergePolicy policy = MergePolicy::Open;
    std::vector<GenealogyNode> nodes;
    std::vector<std::vector<int>> sigma;

    int phases() const { return static_cast<int>(sigma.size()); }
};

RegionGenealogy build_genealogy(const RunTrace<Rational>& trace, MergePolicy policy = MergePolicy::Open);

/// Extents of the region after `phase`, left to right.
std::vector<Region> cumulative_search_region(const RunTrace<Rational>& trace, int phase,
                                             MergePolicy policy = MergePolicy::Open);

/// Level brackets base * q^k with base = w_opt / n and q = 1 + 1/(32t).
/// Level 0 holds every length below base; otherwise the level is the largest
/// k with base * q^k <= length. Powers are cached.
class LevelScale {
public:
    /// Throws std::invalid_argument unless w_opt > 0, n >= 1 and t > 1.
    LevelScale(Rational w_opt, int n, Rational t);

    int level(const Rational& length) const;
    /// base * q^k
    Rational threshold(int k) const;

    const Rational& base() const { return base_; }
    const Rational& ratio() const { return q_; }

private:
    const Rational& power(int k) const;

    Rational base_;
    Rational q_;
    double log_q_;
    mutable std::vector<Rational> powers_;
};

int level_of_interval(const Rational& length, const Rational& w_opt, int n, const Rational& t);

struct LevelAssignment {
    Rational w_opt;
    int n = 0;
    Rational t;
    std::vector<int> node_level;  // by node id
    std::vector<int> edge_level;  // by phase
    std::vector<int> edge_node;   // region node containing the phase's online edge

    int max_level() const;
};

/// Levels for every genealogy node and every online edge. An edge takes the
/// level of the interval of the region after its phase whose closure holds
/// both endpoints. Throws AnalysisError if no such interval exists and
/// std::invalid_argument if w_opt <= 0.
LevelAssignment assign_edge_levels(const RunTrace<Rational>& trace, const RegionGenealogy& genealogy,
                                   const Rational& w_opt);

struct MaximalInterval {
    int node = 0;
    std::vector<int> chain;          // E_C: nested level-k nodes, minimal first, this node last
    std::vector<int> comp;           // lower-level intervals absorbed along the chain
    std::vector<int> edges;          // phases of level-k online edges of the node
    std::vector<int> all_edges;      // phases of every online edge of the node
};

struct LevelKStructure {
    int level = 0;
    std::vector<MaximalInterval> intervals;  // sorted by position
};

/// Maximal level-k intervals with their chains, comp sets and edge sets.
/// Throws AnalysisError if some level-k node has two level-k predecessors.
LevelKStructure level_k_structure(const RegionGenealogy& genealogy,
                                  const LevelAssignment& levels, int k);

/// Birth phases of the node and all its transitive predecessors, ascending.
/// These are the online edges the node accumulated: each merge keeps the
/// edges of its predecessors and adds the edge of its birth phase.
std::vector<int> subtree_phases(const RegionGenealogy& genealogy, int node);

/// Levels that carry at least one online edge, ascending.
std::vector<int> edge_levels_present(const LevelAssignment& levels);

/// Online edge indices (phases) whose endpoints both lie in the closure of
/// `extent` among the first `phase_end` phases.
std::vector<int> online_edges_inside(const RunTrace<Rational>& trace, const Region& extent, int phase_end);

/// Offline edges present after `phase` with both endpoints in the closure of
/// `extent`.
std::vector<Edge> offline_edges_inside(const RunTrace<Rational>& trace, const Region& extent, int phase);

/// Per-level edge counts and costs, a genealogy summary and the supplied
/// violation list.
nlohmann::json analysis_summary_json(const RunTrace<Rational>& trace, const RegionGenealogy& genealogy,
                                     const LevelAssignment* levels, const std::vector<std::string>& violations);

}  // namespace rmatch
