#pragma once

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmatch/rational.hpp"

namespace rmatch {

using ServerIndex = int;
using RequestIndex = int;

inline constexpr int kUnmatched = -1;

enum class MetricKind { Line, Table };

/// A server/request pair. On the line its cost is |server - request|.
struct Edge {
    ServerIndex server = 0;
    RequestIndex request = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// A set of vertex-disjoint server/request pairs, kept in insertion order.
class Matching {
public:
    Matching() = default;
    /// Throws std::invalid_argument if a server or request index repeats.
    explicit Matching(std::vector<Edge> edges);

    void add(Edge e);
    bool contains(Edge e) const;

    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t size() const { return edges_.size(); }
    bool empty() const { return edges_.empty(); }

    auto begin() const { return edges_.begin(); }
    auto end() const { return edges_.end(); }

    friend bool operator==(const Matching&, const Matching&) = default;

private:
    std::vector<Edge> edges_;
};

/// Servers, requests in arrival order, and the parameter t > 1.
///
/// Line mode stores coordinates. Table mode stores an n x n metric over the
/// server locations; request j sits on location `request_sites()[j]`.
class Instance {
public:
    static Instance line(std::vector<Rational> servers, std::vector<Rational> requests, Rational t);
    static Instance table(std::vector<std::vector<Rational>> distances, std::vector<int> request_sites,
                          Rational t);

    MetricKind metric() const { return metric_; }
    bool is_line() const { return metric_ == MetricKind::Line; }
    int size() const { return n_; }
    const Rational& t() const { return t_; }

    const std::vector<Rational>& servers() const { return servers_; }
    const std::vector<Rational>& requests() const { return requests_; }
    const std::vector<std::vector<Rational>>& distance_table() const { return table_; }
    const std::vector<int>& request_sites() const { return request_sites_; }

    /// Copy with a different t (validated).
    Instance with_t(Rational t) const;

private:
    Instance() = default;

    MetricKind metric_ = MetricKind::Line;
    int n_ = 0;
    Rational t_{3};
    std::vector<Rational> servers_;
    std::vector<Rational> requests_;
    std::vector<std::vector<Rational>> table_;
    std::vector<int> request_sites_;
};

/// Every violated invariant of a candidate instance, one message each.
class InstanceError : public std::runtime_error {
public:
    explicit InstanceError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Unvalidated instance fields as they appear in an external record.
struct RawInstance {
    std::string t = "3";
    std::string metric = "line";
    std::vector<std::string> servers;
    std::vector<std::string> requests;
    std::vector<std::vector<std::string>> distance_table;
};

Instance validate_instance(const RawInstance& raw);

/// Throws std::out_of_range for a bad index.
Rational distance(const Instance& instance, ServerIndex s, RequestIndex r);

Rational matching_cost(const Instance& instance, const Matching& m);

}  // namespace rmatch
