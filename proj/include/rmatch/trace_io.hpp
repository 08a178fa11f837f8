#pragma once

#include <json.hpp>

#include "rmatch/rm_engine.hpp"

namespace rmatch {

/// Per-phase record of a run: request, chosen server, path edges with their
/// offline flags, t-net-cost, length, class, tree vertices, and the final
/// matchings. Rationals are "p/q" strings. With `with_duals`, each phase also
/// carries both dual snapshots, y_max and the offline matching after it.
nlohmann::json trace_to_json(const RunTrace<Rational>& trace, bool with_duals = false);

}  // namespace rmatch
