#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmatch/line_analysis.hpp"

namespace rmatch {

/// Frame of an eps-well-separated input after translating by -offset:
///   I_M = [0, D], I_L = [-eD, 0], I_R = [D, (1+e)D], I_A = [-eD, (1+e)D],
///   I_L' = [-eD, eD], I_R' = [(1-e)D, (1+e)D].
/// Every containment test is closed.
class WellSepFrame {
public:
    /// Throws std::invalid_argument unless delta > 0 and 0 < eps <= 1/8.
    WellSepFrame(Rational delta, Rational eps, Rational offset = Rational(0));

    const Rational& delta() const { return delta_; }
    const Rational& eps() const { return eps_; }
    const Rational& offset() const { return offset_; }

    Rational local(const Rational& x) const { return x - offset_; }

    Region middle() const { return {Rational(0), delta_}; }
    Region left() const { return {-eps_ * delta_, Rational(0)}; }
    Region right() const { return {delta_, (Rational(1) + eps_) * delta_}; }
    Region all() const { return {-eps_ * delta_, (Rational(1) + eps_) * delta_}; }
    Region left_near() const { return {-eps_ * delta_, eps_ * delta_}; }
    Region right_near() const { return {(Rational(1) - eps_) * delta_, (Rational(1) + eps_) * delta_}; }
    Region center() const { return {eps_ * delta_, (Rational(1) - eps_) * delta_}; }

private:
    Rational delta_;
    Rational eps_;
    Rational offset_;
};

/// Servers, requests and a matching between them, by index into the two
/// coordinate lists.
struct LineMatchingInstance {
    std::vector<Rational> servers;
    std::vector<Rational> requests;
    std::vector<Edge> matching;
};

bool is_well_separated(const std::vector<Rational>& servers, const std::vector<Rational>& requests,
                       const WellSepFrame& frame);

enum class EdgeClass { Close, Far, Med };

const char* to_string(EdgeClass c);

struct ClassifiedMatching {
    std::vector<EdgeClass> tags;  // parallel to the matching
    Rational w_close;
    Rational w_far;
    Rational w_med;

    std::vector<Edge> edges_of(const LineMatchingInstance& inst, EdgeClass c) const;
};

/// Tags every edge. Close wins over far, far over med when a boundary point
/// qualifies for several. Throws std::invalid_argument for an edge that fits
/// none (the input was not well-separated under this frame).
ClassifiedMatching classify_edges(const LineMatchingInstance& inst, const WellSepFrame& frame);

/// Close edges inside I_R' must have the server at or right of the request;
/// close edges inside I_L' at or left of it.
bool is_well_aligned(const LineMatchingInstance& inst, const ClassifiedMatching& cm, const WellSepFrame& frame);

struct Inequality {
    Rational lhs;
    Rational rhs;
    bool holds = false;
};

struct WspcReport {
    Inequality main;  // w(close) + w(med) <= (2/e + 3) opt + 4e/(1-2e) w(far)
    Inequality close_is_optimal;   // w(close) == OPT(close points), stored as lhs/rhs
    Inequality med_bound;          // w(med) <= opt / e
    Inequality cf_bound;           // OPT(close+far points) <= (1/e + 3) opt
    Inequality close_vs_cf;        // OPT(close) - 4 e D |far| <= OPT(close+far points)

    bool all_hold() const {
        return main.holds && close_is_optimal.holds && med_bound.holds && cf_bound.holds && close_vs_cf.holds;
    }
};

/// Evaluates the well-aligned cost bound and its four intermediate claims.
/// `opt_cost` is the optimal matching cost of the whole point set. Throws
/// std::invalid_argument if the input is not well-separated or the matching
/// not well-aligned.
WspcReport check_wspc(const LineMatchingInstance& inst, const ClassifiedMatching& cm, const WellSepFrame& frame,
                      const Rational& opt_cost);

struct ExtractedInstance {
    int maximal_node = 0;
    int minimal_node = 0;
    WellSepFrame frame;
    LineMatchingInstance points;       // coordinates in the original (untranslated) line
    std::vector<int> phases;           // online phase of each matching edge
    bool well_separated = false;
    bool well_aligned = false;
    std::optional<ClassifiedMatching> classes;  // present iff well-separated
    /// Far edges that were short online edges (should be empty). Only
    /// evaluated when t = 3.
    std::vector<int> short_far_phases;
    bool far_check_applies = false;
};

/// One instance per maximal interval of a level k >= 1 structure. The frame
/// comes from the chain's minimal interval: delta is its length, the offset
/// its left end, eps = 1/(32t) unless overridden.
std::vector<ExtractedInstance> extract_level_instances(const LevelKStructure& structure,
                                                       const RunTrace<Rational>& trace,
                                                       const RegionGenealogy& genealogy,
                                                       std::optional<Rational> eps = std::nullopt);

}  // namespace rmatch
