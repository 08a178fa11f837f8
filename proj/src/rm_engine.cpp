#include "rmatch/rm_engine.hpp"

#include <queue>
#include <sstream>

namespace rmatch {

namespace {

template <class Num>
struct Label {
    Num dist{};
    int hops = 0;
};

template <class Num>
struct HeapEntry {
    Num dist;
    int hops;
    int vertex;  // servers are [0, n), requests [n, 2n)

    // Inverted for std::priority_queue (min-heap on dist, hops, vertex).
    friend bool operator<(const HeapEntry& a, const HeapEntry& b) {
        if (a.dist != b.dist) return b.dist < a.dist;
        if (a.hops != b.hops) return a.hops > b.hops;
        return a.vertex > b.vertex;
    }
};

template <class Num>
bool better(const Num& d, int h, const Label<Num>& cur) {
    using T = NumTraits<Num>;
    return T::less(d, cur.dist) || (T::equal(d, cur.dist) && h < cur.hops);
}

template <class Num>
std::string describe(const Num& x) {
    if constexpr (std::is_same_v<Num, Rational>) {
        return x.str();
    } else {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    }
}

}  // namespace

// ---------------------------------------------------------------- distances

template <class Num>
DistanceOracle<Num>::DistanceOracle(const Instance& instance) : n_(instance.size()), line_(instance.is_line()) {
    using T = NumTraits<Num>;
    if (line_) {
        servers_.reserve(n_);
        requests_.reserve(n_);
        for (const auto& s : instance.servers()) servers_.push_back(T::from(s));
        for (const auto& r : instance.requests()) requests_.push_back(T::from(r));
    } else {
        table_.reserve(static_cast<std::size_t>(n_) * n_);
        for (int s = 0; s < n_; ++s) {
            for (int r = 0; r < n_; ++r) table_.push_back(T::from(distance(instance, s, r)));
        }
    }
}

template <class Num>
Num DistanceOracle<Num>::operator()(ServerIndex s, RequestIndex r) const {
    if (line_) {
        if constexpr (std::is_same_v<Num, Rational>) {
            return abs(servers_[s] - requests_[r]);
        } else {
            return std::fabs(servers_[s] - requests_[r]);
        }
    }
    return table_[static_cast<std::size_t>(s) * n_ + r];
}

// --------------------------------------------------------------- dual state

template <class Num>
DualState<Num>::DualState(int n)
    : server_mate(n, kUnmatched),
      request_mate(n, kUnmatched),
      y_server(n, Num{}),
      y_request(n, Num{}),
      y_max(n, Num{}),
      arrived(n, 0) {}

template <class Num>
Matching DualState<Num>::offline_matching() const {
    std::vector<Edge> edges;
    for (int s = 0; s < size(); ++s) {
        if (server_mate[s] != kUnmatched) edges.push_back({s, server_mate[s]});
    }
    return Matching(std::move(edges));
}

template <class Num>
std::vector<ServerIndex> DualState<Num>::free_servers() const {
    std::vector<ServerIndex> out;
    for (int s = 0; s < size(); ++s) {
        if (is_free(s)) out.push_back(s);
    }
    return out;
}

// ------------------------------------------------------------------- search

template <class Num>
AugmentingPath<Num> min_tnet_cost_path(DualState<Num>& state, const DistanceOracle<Num>& d, RequestIndex r,
                                       const Num& t, SearchTree* tree) {
    using T = NumTraits<Num>;
    const int n = state.size();
    if (r < 0 || r >= n) throw std::out_of_range("request index " + std::to_string(r) + " out of range");
    if (state.request_mate[r] != kUnmatched) {
        throw std::logic_error("request " + std::to_string(r) + " is already matched");
    }
    state.arrived[r] = 1;

    std::vector<Label<Num>> label(2 * n);
    std::vector<char> reached(2 * n, 0), done(2 * n, 0);
    std::vector<int> parent(2 * n, -1);
    std::vector<int> finalized;

    std::priority_queue<HeapEntry<Num>> heap;
    const int root = n + r;
    label[root] = {Num{}, 0};
    reached[root] = 1;
    heap.push({Num{}, 0, root});

    int terminal = -1;
    while (!heap.empty()) {
        HeapEntry<Num> top = heap.top();
        heap.pop();
        const int v = top.vertex;
        if (done[v] || top.hops != label[v].hops || !T::equal(top.dist, label[v].dist)) continue;
        done[v] = 1;
        finalized.push_back(v);

        if (v < n) {
            const int s = v;
            if (state.is_free(s)) {
                terminal = s;
                break;
            }
            const int mate = n + state.server_mate[s];
            if (!done[mate] && (!reached[mate] || better(label[v].dist, label[v].hops + 1, label[mate]))) {
                label[mate] = {label[v].dist, label[v].hops + 1};
                reached[mate] = 1;
                parent[mate] = v;
                heap.push({label[mate].dist, label[mate].hops, mate});
            }
        } else {
            const int req = v - n;
            for (int s = 0; s < n; ++s) {
                if (done[s] || state.request_mate[req] == s) continue;
                Num w = t * d(s, req) - state.y_server[s] - state.y_request[req];
                Num nd = label[v].dist + w;
                const int nh = label[v].hops + 1;
                if (!reached[s] || better(nd, nh, label[s])) {
                    label[s] = {std::move(nd), nh};
                    reached[s] = 1;
                    parent[s] = v;
                    heap.push({label[s].dist, nh, s});
                }
            }
        }
    }
    if (terminal < 0) throw std::logic_error("no free server reachable from request " + std::to_string(r));

    AugmentingPath<Num> path;
    path.request = r;
    path.terminal = terminal;
    std::vector<int> chain;
    for (int v = terminal; v != -1; v = parent[v]) chain.push_back(v);
    std::reverse(chain.begin(), chain.end());  // root request ... terminal server
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        const int a = chain[k];
        const int b = chain[k + 1];
        if (a >= n) {
            path.edges.push_back({{b, a - n}, false});
        } else {
            path.edges.push_back({{a, b - n}, true});
        }
    }
    Num unmatched_len{}, matched_len{};
    for (const auto& pe : path.edges) {
        const Num len = d(pe.edge.server, pe.edge.request);
        (pe.in_offline ? matched_len : unmatched_len) += len;
    }
    path.length = unmatched_len + matched_len;
    path.net_cost = t * unmatched_len - matched_len;

    // Dual adjustment: everything finalized strictly below the terminal label.
    const Num ell = label[terminal].dist;
    std::vector<char> on_path(2 * n, 0);
    for (int v : chain) on_path[v] = 1;
    if (tree != nullptr) {
        tree->servers.clear();
        tree->requests.clear();
    }
    for (int v : finalized) {
        const bool below = T::less(label[v].dist, ell);
        if (below) {
            Num delta = ell - label[v].dist;
            if (v < n) {
                state.y_server[v] -= delta;
            } else {
                state.y_request[v - n] += delta;
            }
        }
        if (tree != nullptr && (below || on_path[v])) {
            if (v < n) {
                tree->servers.push_back(v);
            } else {
                tree->requests.push_back(v - n);
            }
        }
    }
    if (tree != nullptr) {
        std::sort(tree->servers.begin(), tree->servers.end());
        std::sort(tree->requests.begin(), tree->requests.end());
    }
    for (int v : finalized) {
        if (v >= n) {
            const int q = v - n;
            if (state.y_max[q] < state.y_request[q]) state.y_max[q] = state.y_request[q];
        }
    }
    return path;
}

// ------------------------------------------------------------------ augment

template <class Num>
void augment(DualState<Num>& state, const DistanceOracle<Num>& d, const AugmentingPath<Num>& path,
             const Num& t) {
    using T = NumTraits<Num>;
    if (path.edges.empty()) throw std::invalid_argument("empty augmenting path");
    if (!state.is_free(path.terminal)) {
        throw std::invalid_argument("path terminal " + std::to_string(path.terminal) + " is not free");
    }
    for (const auto& pe : path.edges) {
        if (pe.in_offline) {
            state.server_mate[pe.edge.server] = kUnmatched;
            state.request_mate[pe.edge.request] = kUnmatched;
        }
    }
    const Num shrink = t - Num(1);
    for (const auto& pe : path.edges) {
        if (pe.in_offline) continue;
        const auto [s, r] = pe.edge;
        state.server_mate[s] = r;
        state.request_mate[r] = s;
        state.y_request[r] -= shrink * d(s, r);
    }
    for (const auto& pe : path.edges) {
        if (pe.in_offline) continue;
        const auto [s, r] = pe.edge;
        const Num sum = state.y_server[s] + state.y_request[r];
        if (!T::equal(sum, d(s, r))) {
            throw EngineInvariantError("matched edge (" + std::to_string(s) + "," + std::to_string(r) +
                                       ") not tight after augmentation: y(s)+y(r)=" + describe(sum) +
                                       ", d=" + describe(d(s, r)));
        }
        if (T::less(state.y_request[r], Num{})) {
            throw EngineInvariantError("request " + std::to_string(r) + " dual became negative: " +
                                       describe(state.y_request[r]));
        }
        if (T::less(Num{}, state.y_server[s])) {
            throw EngineInvariantError("server " + std::to_string(s) + " dual became positive");
        }
    }
}

template <class Num>
PathClass classify_edge(const Num& net_cost, const Num& length, const Num& t) {
    using T = NumTraits<Num>;
    // length <= 4/(t-1) * net_cost, multiplied through by t-1 > 0
    const Num lhs = (t - Num(1)) * length;
    const Num rhs = Num(4) * net_cost;
    return T::less(rhs, lhs) ? PathClass::Long : PathClass::Short;
}

template <class Num>
std::string feasibility_violation(const DualState<Num>& state, const DistanceOracle<Num>& d, const Num& t) {
    using T = NumTraits<Num>;
    const int n = state.size();
    for (int s = 0; s < n; ++s) {
        if (T::less(Num{}, state.y_server[s])) return "server " + std::to_string(s) + " has positive dual";
        if (state.is_free(s) && !T::equal(state.y_server[s], Num{})) {
            return "free server " + std::to_string(s) + " has nonzero dual";
        }
    }
    for (int r = 0; r < n; ++r) {
        if (T::less(state.y_request[r], Num{})) return "request " + std::to_string(r) + " has negative dual";
        if (!state.arrived[r] && !T::equal(state.y_request[r], Num{})) {
            return "unarrived request " + std::to_string(r) + " has nonzero dual";
        }
    }
    for (int s = 0; s < n; ++s) {
        for (int r = 0; r < n; ++r) {
            const Num sum = state.y_server[s] + state.y_request[r];
            const Num dist = d(s, r);
            if (T::less(t * dist, sum)) {
                return "pair (" + std::to_string(s) + "," + std::to_string(r) + ") exceeds t*d";
            }
            if (state.server_mate[s] == r && !T::equal(sum, dist)) {
                return "matched pair (" + std::to_string(s) + "," + std::to_string(r) + ") is not tight";
            }
        }
    }
    return {};
}

template <class Num>
PhaseTrace<Num> process_request(DualState<Num>& state, const DistanceOracle<Num>& d, RequestIndex r, const Num& t,
                                const EngineOptions& options) {
    using T = NumTraits<Num>;
    PhaseTrace<Num> trace;
    trace.phase = r;
    trace.request = r;

    bool have_nearest = false;
    for (int s = 0; s < state.size(); ++s) {
        if (!state.is_free(s)) continue;
        if (options.record_snapshots) trace.free_before.push_back(s);
        Num dist = d(s, r);
        if (!have_nearest || T::less(dist, trace.nearest_free_distance)) {
            trace.nearest_free_distance = std::move(dist);
            have_nearest = true;
        }
    }

    trace.path = min_tnet_cost_path(state, d, r, t, &trace.tree);
    trace.server = trace.path.terminal;
    trace.kind = classify_edge(trace.path.net_cost, trace.path.length, t);
    if (options.record_snapshots) trace.after_search = {state.y_server, state.y_request};

    augment(state, d, trace.path, t);

    if (options.record_snapshots) {
        trace.after_augment = {state.y_server, state.y_request};
        trace.y_max_after = state.y_max;
        trace.offline_after = state.server_mate;
    }
    if (options.full_self_check) {
        if (auto why = feasibility_violation(state, d, t); !why.empty()) {
            throw EngineInvariantError("after phase " + std::to_string(r) + ": " + why);
        }
    }
    return trace;
}

// ------------------------------------------------------------------- engine

template <class Num>
RmEngine<Num>::RmEngine(const Instance& instance, EngineOptions options)
    : instance_(instance),
      options_(options),
      distances_(instance),
      t_(NumTraits<Num>::from(instance.t())),
      state_(instance.size()) {}

template <class Num>
const PhaseTrace<Num>& RmEngine<Num>::process_next() {
    if (finished()) throw std::logic_error("all requests have been processed");
    phases_.push_back(process_request(state_, distances_, next_, t_, options_));
    const auto& ph = phases_.back();
    online_.add({ph.server, ph.request});
    online_cost_ += distances_(ph.server, ph.request);
    ++next_;
    return ph;
}

template <class Num>
RunTrace<Num> RmEngine<Num>::take_trace() && {
    RunTrace<Num> trace{instance_, t_, std::move(phases_), std::move(online_), state_.offline_matching(),
                        online_cost_, options_.record_snapshots};
    return trace;
}

template <class Num>
RunTrace<Num> run_online(const Instance& instance, EngineOptions options) {
    RmEngine<Num> engine(instance, options);
    while (!engine.finished()) engine.process_next();
    return std::move(engine).take_trace();
}

Rational t_net_cost(const Instance& instance, std::span<const Edge> path, const Matching& offline,
                    const Rational& t) {
    if (path.empty()) throw std::invalid_argument("empty path");
    Rational unmatched, matched;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const Edge& e = path[k];
        const bool want_offline = (k % 2 == 1);
        if (offline.contains(e) != want_offline) {
            throw std::invalid_argument("edge " + std::to_string(k) + " breaks alternation with the offline matching");
        }
        if (k > 0) {
            const Edge& prev = path[k - 1];
            const bool joined = want_offline ? prev.server == e.server : prev.request == e.request;
            if (!joined) throw std::invalid_argument("edges " + std::to_string(k - 1) + " and " + std::to_string(k) +
                                                     " do not share a vertex");
        }
        (want_offline ? matched : unmatched) += distance(instance, e.server, e.request);
    }
    return t * unmatched - matched;
}

#define RMATCH_INSTANTIATE(Num)                                                                                 \
    template class DistanceOracle<Num>;                                                                         \
    template struct DualState<Num>;                                                                             \
    template class RmEngine<Num>;                                                                               \
    template AugmentingPath<Num> min_tnet_cost_path(DualState<Num>&, const DistanceOracle<Num>&, RequestIndex,  \
                                                    const Num&, SearchTree*);                                   \
    template void augment(DualState<Num>&, const DistanceOracle<Num>&, const AugmentingPath<Num>&, const Num&); \
    template PathClass classify_edge(const Num&, const Num&, const Num&);                                       \
    template std::string feasibility_violation(const DualState<Num>&, const DistanceOracle<Num>&, const Num&);  \
    template PhaseTrace<Num> process_request(DualState<Num>&, const DistanceOracle<Num>&, RequestIndex,         \
                                             const Num&, const EngineOptions&);                                 \
    template RunTrace<Num> run_online(const Instance&, EngineOptions);

RMATCH_INSTANTIATE(Rational)
RMATCH_INSTANTIATE(double)

#undef RMATCH_INSTANTIATE

}  // namespace rmatch
