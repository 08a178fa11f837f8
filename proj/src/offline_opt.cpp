#include "rmatch/offline_opt.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rmatch {

namespace {

std::vector<int> stable_order(const std::vector<Rational>& xs) {
    std::vector<int> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return xs[a] < xs[b]; });
    return order;
}

void require_line(const Instance& instance, const char* what) {
    if (!instance.is_line()) {
        throw std::invalid_argument(std::string(what) + " needs a line-metric instance; use exact_min_cost_matching");
    }
}

struct SweepPoint {
    Rational x;
    bool is_server;
};

IntervalDecomposition sweep(std::span<const Rational> servers, std::span<const Rational> requests) {
    std::vector<SweepPoint> pts;
    pts.reserve(servers.size() + requests.size());
    for (const auto& s : servers) pts.push_back({s, true});
    for (const auto& r : requests) pts.push_back({r, false});
    std::stable_sort(pts.begin(), pts.end(), [](const SweepPoint& a, const SweepPoint& b) { return a.x < b.x; });

    IntervalDecomposition out;
    int balance = 0;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        balance += pts[j].is_server ? 1 : -1;
        DecompositionInterval iv;
        iv.low = pts[j].x;
        iv.high = pts[j + 1].x;
        iv.length = iv.high - iv.low;
        iv.imbalance = std::abs(balance);
        if (iv.imbalance != 0 && !iv.length.is_zero()) out.cost += Rational(iv.imbalance) * iv.length;
        out.intervals.push_back(std::move(iv));
    }
    return out;
}

}  // namespace

Matching optimal_line_matching(const Instance& instance) {
    require_line(instance, "optimal_line_matching");
    const auto so = stable_order(instance.servers());
    const auto ro = stable_order(instance.requests());
    std::vector<Edge> edges;
    edges.reserve(so.size());
    for (std::size_t i = 0; i < so.size(); ++i) edges.push_back({so[i], ro[i]});
    return Matching(std::move(edges));
}

IntervalDecomposition interval_decomposition_cost(const Instance& instance) {
    require_line(instance, "interval_decomposition_cost");
    return sweep(instance.servers(), instance.requests());
}

Rational line_matching_cost(std::span<const Rational> servers, std::span<const Rational> requests) {
    if (servers.size() != requests.size()) {
        throw std::invalid_argument("line_matching_cost: point sets differ in size");
    }
    return sweep(servers, requests).cost;
}

Matching exact_min_cost_matching(const Instance& instance) {
    const int n = instance.size();
    std::vector<std::vector<Rational>> cost(n + 1, std::vector<Rational>(n + 1));
    for (int s = 0; s < n; ++s) {
        for (int r = 0; r < n; ++r) cost[s + 1][r + 1] = distance(instance, s, r);
    }

    // Rows are servers, columns requests; index 0 is the virtual column.
    std::vector<Rational> u(n + 1), v(n + 1), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1), has_min(n + 1);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(used.begin(), used.end(), 0);
        std::fill(has_min.begin(), has_min.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            Rational delta;
            bool has_delta = false;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                Rational cur = cost[i0][j] - u[i0] - v[j];
                if (!has_min[j] || cur < minv[j]) {
                    minv[j] = std::move(cur);
                    has_min[j] = 1;
                    way[j] = j0;
                }
                if (!has_delta || minv[j] < delta) {
                    delta = minv[j];
                    has_delta = true;
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<Edge> edges;
    edges.reserve(n);
    for (int j = 1; j <= n; ++j) edges.push_back({p[j] - 1, j - 1});
    std::sort(edges.begin(), edges.end());
    return Matching(std::move(edges));
}

bool check_opt_property(const Matching& m, const Instance& instance) {
    require_line(instance, "check_opt_property");
    std::vector<Rational> pts;
    pts.reserve(2 * instance.size());
    for (const auto& s : instance.servers()) pts.push_back(s);
    for (const auto& r : instance.requests()) pts.push_back(r);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        const Rational& lo = pts[j];
        const Rational& hi = pts[j + 1];
        bool saw_left = false, saw_right = false;
        for (const Edge& e : m) {
            const Rational& s = instance.servers()[e.server];
            const Rational& r = instance.requests()[e.request];
            if (min(s, r) <= lo && hi <= max(s, r)) {
                (s < r ? saw_left : saw_right) = true;
            }
        }
        if (saw_left && saw_right) return false;
    }
    return true;
}

}  // namespace rmatch
