#pragma once

#include <span>
#include <vector>

#include "rmatch/instance.hpp"

namespace rmatch {

/// One gap between consecutive sorted points together with the
/// server/request imbalance of everything to its left.
struct DecompositionInterval {
    Rational low;
    Rational high;
    Rational length;
    int imbalance = 0;
};

struct IntervalDecomposition {
    Rational cost;
    std::vector<DecompositionInterval> intervals;
};

/// Pairs the i-th smallest server with the i-th smallest request. Equal
/// coordinates are ordered by input index. Throws std::invalid_argument for
/// table instances.
Matching optimal_line_matching(const Instance& instance);

/// Sum over consecutive sorted points of imbalance * gap length, which is the
/// optimal matching cost on the line.
IntervalDecomposition interval_decomposition_cost(const Instance& instance);

/// Same sweep over arbitrary point multisets of equal size.
Rational line_matching_cost(std::span<const Rational> servers, std::span<const Rational> requests);

/// Min-cost perfect matching by the O(n^3) Hungarian method with exact
/// potentials. Works for either metric mode.
Matching exact_min_cost_matching(const Instance& instance);

/// True iff for every gap between consecutive sorted points, the edges of `m`
/// covering it all point the same way (server left of request, or right).
/// Zero-length gaps are skipped. Such a matching is optimal.
bool check_opt_property(const Matching& m, const Instance& instance);

}  // namespace rmatch
