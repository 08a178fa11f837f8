#include "rmatch/instance_io.hpp"

#include <fstream>

namespace rmatch {

namespace {

// Rationals may be written either as strings ("3", "1/2") or as JSON integers.
bool scalar_text(const nlohmann::json& v, std::string& out) {
    if (v.is_string()) {
        out = v.get<std::string>();
        return true;
    }
    if (v.is_number_integer()) {
        out = std::to_string(v.get<long long>());
        return true;
    }
    return false;
}

std::vector<std::string> scalar_list(const nlohmann::json& j, const char* key,
                                     std::vector<std::string>& problems) {
    std::vector<std::string> out;
    if (!j.contains(key)) {
        problems.push_back(std::string("missing \"") + key + "\"");
        return out;
    }
    const auto& arr = j.at(key);
    if (!arr.is_array()) {
        problems.push_back(std::string("\"") + key + "\" must be an array");
        return out;
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
        std::string text;
        if (!scalar_text(arr[i], text)) {
            problems.push_back(std::string(key) + "[" + std::to_string(i) +
                               "] must be an integer or a \"p/q\" string");
            continue;
        }
        out.push_back(std::move(text));
    }
    return out;
}

}  // namespace

RawInstance raw_instance_from_json(const nlohmann::json& j) {
    std::vector<std::string> problems;
    RawInstance raw;
    if (!j.is_object()) throw InstanceError({"instance record must be a JSON object"});

    if (j.contains("t")) {
        if (!scalar_text(j.at("t"), raw.t)) problems.push_back("\"t\" must be an integer or a \"p/q\" string");
    }
    if (j.contains("metric")) {
        if (j.at("metric").is_string()) {
            raw.metric = j.at("metric").get<std::string>();
        } else {
            problems.push_back("\"metric\" must be a string");
        }
    }

    if (raw.metric == "table") {
        if (!j.contains("distance_table") || !j.at("distance_table").is_array()) {
            problems.push_back("missing or malformed \"distance_table\"");
        } else {
            const auto& rows = j.at("distance_table");
            for (std::size_t i = 0; i < rows.size(); ++i) {
                std::vector<std::string> row;
                if (!rows[i].is_array()) {
                    problems.push_back("distance_table[" + std::to_string(i) + "] must be an array");
                } else {
                    for (std::size_t k = 0; k < rows[i].size(); ++k) {
                        std::string text;
                        if (!scalar_text(rows[i][k], text)) {
                            problems.push_back("distance_table[" + std::to_string(i) + "][" +
                                               std::to_string(k) + "] must be an integer or a \"p/q\" string");
                        }
                        row.push_back(std::move(text));
                    }
                }
                raw.distance_table.push_back(std::move(row));
            }
        }
        raw.requests = scalar_list(j, "requests", problems);
    } else {
        raw.servers = scalar_list(j, "servers", problems);
        raw.requests = scalar_list(j, "requests", problems);
    }

    if (!problems.empty()) throw InstanceError(std::move(problems));
    return raw;
}

nlohmann::json instance_to_json(const Instance& instance) {
    nlohmann::json j;
    j["t"] = instance.t().str();
    if (instance.is_line()) {
        j["metric"] = "line";
        auto servers = nlohmann::json::array();
        for (const auto& s : instance.servers()) servers.push_back(s.str());
        auto requests = nlohmann::json::array();
        for (const auto& r : instance.requests()) requests.push_back(r.str());
        j["servers"] = std::move(servers);
        j["requests"] = std::move(requests);
    } else {
        j["metric"] = "table";
        auto table = nlohmann::json::array();
        for (const auto& row : instance.distance_table()) {
            auto jr = nlohmann::json::array();
            for (const auto& d : row) jr.push_back(d.str());
            table.push_back(std::move(jr));
        }
        j["distance_table"] = std::move(table);
        j["requests"] = instance.request_sites();
    }
    return j;
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("instance file " + path.string() + " is not valid JSON: " + e.what());
    }
    return validate_instance(raw_instance_from_json(j));
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file " + path.string());
    out << instance_to_json(instance).dump(2) << '\n';
}

}  // namespace rmatch
