#include "rmatch/instance.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>

namespace rmatch {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string out = "invalid instance";
    for (const auto& p : problems) out += "; " + p;
    return out;
}

void check_t(const Rational& t, std::vector<std::string>& problems) {
    if (t <= Rational(1)) problems.push_back("t must exceed 1 (got " + t.str() + ")");
}

void check_table(const std::vector<std::vector<Rational>>& d, std::vector<std::string>& problems) {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i].size() != n) {
            problems.push_back("distance table is not square: row " + std::to_string(i) + " has " +
                               std::to_string(d[i].size()) + " entries, expected " + std::to_string(n));
        }
    }
    if (!problems.empty()) return;

    bool asym = false, neg = false, diag = false, tri = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (!diag && !d[i][i].is_zero()) {
            problems.push_back("nonzero diagonal entry at (" + std::to_string(i) + "," + std::to_string(i) + ")");
            diag = true;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!neg && d[i][j].sign() < 0) {
                problems.push_back("negative distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                neg = true;
            }
            if (!asym && d[i][j] != d[j][i]) {
                problems.push_back("distance table is asymmetric at (" + std::to_string(i) + "," +
                                   std::to_string(j) + ")");
                asym = true;
            }
        }
    }
    for (std::size_t i = 0; i < n && !tri; ++i) {
        for (std::size_t j = 0; j < n && !tri; ++j) {
            for (std::size_t k = 0; k < n && !tri; ++k) {
                if (d[i][k] > d[i][j] + d[j][k]) {
                    problems.push_back("triangle inequality violated: d(" + std::to_string(i) + "," +
                                       std::to_string(k) + ") > d(" + std::to_string(i) + "," +
                                       std::to_string(j) + ") + d(" + std::to_string(j) + "," +
                                       std::to_string(k) + ")");
                    tri = true;
                }
            }
        }
    }
}

std::optional<Rational> parse_field(const std::string& text, const std::string& what,
                                    std::vector<std::string>& problems) {
    try {
        return Rational::parse(text);
    } catch (const std::invalid_argument&) {
        problems.push_back(what + " is not a rational: \"" + text + "\"");
        return std::nullopt;
    }
}

}  // namespace

Matching::Matching(std::vector<Edge> edges) {
    edges_.reserve(edges.size());
    for (const Edge& e : edges) add(e);
}

void Matching::add(Edge e) {
    for (const Edge& f : edges_) {
        if (f.server == e.server) {
            throw std::invalid_argument("server " + std::to_string(e.server) + " matched twice");
        }
        if (f.request == e.request) {
            throw std::invalid_argument("request " + std::to_string(e.request) + " matched twice");
        }
    }
    edges_.push_back(e);
}

bool Matching::contains(Edge e) const {
    return std::find(edges_.begin(), edges_.end(), e) != edges_.end();
}

InstanceError::InstanceError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

Instance Instance::line(std::vector<Rational> servers, std::vector<Rational> requests, Rational t) {
    std::vector<std::string> problems;
    if (servers.size() != requests.size()) {
        problems.push_back("size mismatch: " + std::to_string(servers.size()) + " servers vs " +
                           std::to_string(requests.size()) + " requests");
    }
    if (servers.empty()) problems.push_back("instance must contain at least one server");
    check_t(t, problems);
    if (!problems.empty()) throw InstanceError(std::move(problems));

    Instance inst;
    inst.metric_ = MetricKind::Line;
    inst.n_ = static_cast<int>(servers.size());
    inst.t_ = std::move(t);
    inst.servers_ = std::move(servers);
    inst.requests_ = std::move(requests);
    return inst;
}

Instance Instance::table(std::vector<std::vector<Rational>> distances, std::vector<int> request_sites,
                         Rational t) {
    std::vector<std::string> problems;
    if (distances.size() != request_sites.size()) {
        problems.push_back("size mismatch: " + std::to_string(distances.size()) + " servers vs " +
                           std::to_string(request_sites.size()) + " requests");
    }
    if (distances.empty()) problems.push_back("instance must contain at least one server");
    check_t(t, problems);
    check_table(distances, problems);
    for (std::size_t j = 0; j < request_sites.size(); ++j) {
        const int site = request_sites[j];
        if (site < 0 || site >= static_cast<int>(distances.size())) {
            problems.push_back("request " + std::to_string(j) + " names location " + std::to_string(site) +
                               " outside the distance table");
        }
    }
    if (!problems.empty()) throw InstanceError(std::move(problems));

    Instance inst;
    inst.metric_ = MetricKind::Table;
    inst.n_ = static_cast<int>(distances.size());
    inst.t_ = std::move(t);
    inst.table_ = std::move(distances);
    inst.request_sites_ = std::move(request_sites);
    return inst;
}

Instance Instance::with_t(Rational t) const {
    std::vector<std::string> problems;
    check_t(t, problems);
    if (!problems.empty()) throw InstanceError(std::move(problems));
    Instance copy = *this;
    copy.t_ = std::move(t);
    return copy;
}

Instance validate_instance(const RawInstance& raw) {
    std::vector<std::string> problems;
    const auto t = parse_field(raw.t, "t", problems);

    if (raw.metric == "line") {
        std::vector<Rational> servers, requests;
        for (std::size_t i = 0; i < raw.servers.size(); ++i) {
            if (auto v = parse_field(raw.servers[i], "server " + std::to_string(i), problems)) {
                servers.push_back(*v);
            }
        }
        for (std::size_t i = 0; i < raw.requests.size(); ++i) {
            if (auto v = parse_field(raw.requests[i], "request " + std::to_string(i), problems)) {
                requests.push_back(*v);
            }
        }
        if (raw.servers.size() != raw.requests.size()) {
            problems.push_back("size mismatch: " + std::to_string(raw.servers.size()) + " servers vs " +
                               std::to_string(raw.requests.size()) + " requests");
        }
        if (raw.servers.empty()) problems.push_back("instance must contain at least one server");
        if (t) check_t(*t, problems);
        if (!problems.empty()) throw InstanceError(std::move(problems));
        return Instance::line(std::move(servers), std::move(requests), *t);
    }

    if (raw.metric == "table") {
        std::vector<std::vector<Rational>> table;
        for (std::size_t i = 0; i < raw.distance_table.size(); ++i) {
            std::vector<Rational> row;
            for (std::size_t j = 0; j < raw.distance_table[i].size(); ++j) {
                const auto what = "distance_table[" + std::to_string(i) + "][" + std::to_string(j) + "]";
                if (auto v = parse_field(raw.distance_table[i][j], what, problems)) row.push_back(*v);
            }
            table.push_back(std::move(row));
        }
        std::vector<int> sites;
        for (std::size_t j = 0; j < raw.requests.size(); ++j) {
            try {
                std::size_t used = 0;
                const int site = std::stoi(raw.requests[j], &used);
                if (used != raw.requests[j].size()) throw std::invalid_argument("trailing");
                sites.push_back(site);
            } catch (const std::exception&) {
                problems.push_back("request " + std::to_string(j) + " is not a location index: \"" +
                                   raw.requests[j] + "\"");
            }
        }
        if (!problems.empty()) {
            if (t) check_t(*t, problems);
            throw InstanceError(std::move(problems));
        }
        try {
            return Instance::table(std::move(table), std::move(sites), *t);
        } catch (const InstanceError& e) {
            throw InstanceError(e.problems());
        }
    }

    problems.push_back("unknown metric \"" + raw.metric + "\" (expected \"line\" or \"table\")");
    throw InstanceError(std::move(problems));
}

Rational distance(const Instance& instance, ServerIndex s, RequestIndex r) {
    const int n = instance.size();
    if (s < 0 || s >= n) throw std::out_of_range("server index " + std::to_string(s) + " out of range");
    if (r < 0 || r >= n) throw std::out_of_range("request index " + std::to_string(r) + " out of range");
    if (instance.is_line()) return abs(instance.servers()[s] - instance.requests()[r]);
    return instance.distance_table()[s][instance.request_sites()[r]];
}

Rational matching_cost(const Instance& instance, const Matching& m) {
    Rational total;
    for (const Edge& e : m) total += distance(instance, e.server, e.request);
    return total;
}

}  // namespace rmatch
