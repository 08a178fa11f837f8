#include "rmatch/trace_io.hpp"

#include "rmatch/instance_io.hpp"

namespace rmatch {

namespace {

nlohmann::json strings(const std::vector<Rational>& xs) {
    auto a = nlohmann::json::array();
    for (const auto& x : xs) a.push_back(x.str());
    return a;
}

nlohmann::json edges(const Matching& m) {
    auto a = nlohmann::json::array();
    for (const Edge& e : m) a.push_back({{"server", e.server}, {"request", e.request}});
    return a;
}

}  // namespace

nlohmann::json trace_to_json(const RunTrace<Rational>& trace, bool with_duals) {
    nlohmann::json j;
    j["instance"] = instance_to_json(trace.instance);
    j["t"] = trace.t.str();
    auto phases = nlohmann::json::array();
    for (const auto& ph : trace.phases) {
        nlohmann::json p;
        p["phase"] = ph.phase;
        p["request"] = ph.request;
        p["server"] = ph.server;
        auto path = nlohmann::json::array();
        for (const auto& pe : ph.path.edges) {
            path.push_back({{"server", pe.edge.server}, {"request", pe.edge.request}, {"offline", pe.in_offline}});
        }
        p["path"] = std::move(path);
        p["net_cost"] = ph.path.net_cost.str();
        p["length"] = ph.path.length.str();
        p["class"] = to_string(ph.kind);
        p["tree"] = {{"servers", ph.tree.servers}, {"requests", ph.tree.requests}};
        p["nearest_free_distance"] = ph.nearest_free_distance.str();
        if (with_duals && trace.has_snapshots) {
            p["duals_after_search"] = {{"servers", strings(ph.after_search.servers)},
                                       {"requests", strings(ph.after_search.requests)}};
            p["duals_after_augment"] = {{"servers", strings(ph.after_augment.servers)},
                                        {"requests", strings(ph.after_augment.requests)}};
            p["y_max"] = strings(ph.y_max_after);
            p["offline_after"] = ph.offline_after;
        }
        phases.push_back(std::move(p));
    }
    j["phases"] = std::move(phases);
    j["online"] = edges(trace.online);
    j["offline"] = edges(trace.offline);
    j["online_cost"] = trace.online_cost.str();
    return j;
}

}  // namespace rmatch
