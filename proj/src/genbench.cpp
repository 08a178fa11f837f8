#include "rmatch/genbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <random>
#include <tuple>

#include "rmatch/line_analysis.hpp"
#include "rmatch/verify.hpp"

namespace rmatch {

const char* to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::Uniform: return "uniform";
        case GeneratorKind::PerturbedPermutation: return "perturbed-permutation";
        case GeneratorKind::ClusterGap: return "cluster-gap";
    }
    return "?";
}

GeneratorKind parse_generator_kind(std::string_view name) {
    for (auto k : {GeneratorKind::Uniform, GeneratorKind::PerturbedPermutation, GeneratorKind::ClusterGap}) {
        if (name == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown generator kind '" + std::string(name) + "'");
}

const char* to_string(ArithMode mode) { return mode == ArithMode::Exact ? "exact" : "float"; }

ArithMode parse_arith_mode(std::string_view name) {
    if (name == "exact") return ArithMode::Exact;
    if (name == "float") return ArithMode::Float;
    throw std::invalid_argument("unknown arithmetic mode '" + std::string(name) + "' (expected exact or float)");
}

namespace {

constexpr long kScaleBits = 32;

// Raw engine output only: std distributions differ between standard libraries.
class DyadicSource {
public:
    DyadicSource(GeneratorKind kind, int n, std::uint64_t seed) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(kind)};
        rng_.seed(seq);
    }

    std::uint64_t bits32() { return rng_() >> 32; }

    // k / 2^32 for k uniform in [0, 2^32)
    Rational unit() { return Rational(mpq_class(mpz_class(static_cast<unsigned long>(bits32())), denominator())); }

    std::size_t below(std::size_t bound) { return static_cast<std::size_t>(rng_() % bound); }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    static mpz_class denominator() {
        mpz_class d = 1;
        d <<= kScaleBits;
        return d;
    }

    std::mt19937_64 rng_;
};

Instance uniform(int n, DyadicSource& src, const Rational& t) {
    std::vector<Rational> s, r;
    for (int i = 0; i < n; ++i) s.push_back(src.unit());
    for (int i = 0; i < n; ++i) r.push_back(src.unit());
    return Instance::line(std::move(s), std::move(r), t);
}

Instance perturbed_permutation(int n, DyadicSource& src, const Rational& t) {
    std::vector<Rational> s, r;
    const Rational half(1, 2);
    for (int i = 0; i < n; ++i) {
        s.emplace_back(static_cast<long>(i));
        Rational d;
        do {
            d = src.unit();
        } while (d.is_zero());  // keeps the offset strictly inside (-1/2, 1/2)
        r.push_back(Rational(static_cast<long>(i)) + d - half);
    }
    src.shuffle(r);
    return Instance::line(std::move(s), std::move(r), t);
}

Instance cluster_gap(int n, DyadicSource& src, const Rational& t) {
    std::vector<Rational> s, r;
    if (n < 3) {
        for (int i = 0; i < n; ++i) {
            s.emplace_back(static_cast<long>(i * n));
            r.emplace_back(static_cast<long>(i * n));
        }
        return Instance::line(std::move(s), std::move(r), t);
    }
    const Rational D = Rational(n, 2);
    const Rational quarter(1, 4);
    const Rational spare(0);                 // right end of the left cluster
    const Rational bait_request = D;
    const Rational bait_server = D + quarter;
    const Rational right_edge = D + D + quarter;  // left end of the right cluster
    const int left_servers = (n - 1) / 2;
    const int right_servers = n - 1 - left_servers;

    s.push_back(bait_server);
    s.push_back(spare);
    for (int i = 1; i < left_servers; ++i) s.push_back(spare - Rational(1) + src.unit());
    s.push_back(right_edge);
    for (int i = 1; i < right_servers; ++i) {
        s.push_back(right_edge + Rational(1) - src.unit());
    }

    std::vector<Rational> later;
    for (int i = 1; i < left_servers; ++i) later.push_back(spare - Rational(1) + src.unit());
    for (int i = 0; i < right_servers; ++i) later.push_back(right_edge + src.unit());
    src.shuffle(later);
    r.push_back(bait_request);
    r.push_back(bait_server);
    r.insert(r.end(), later.begin(), later.end());
    return Instance::line(std::move(s), std::move(r), t);
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

}  // namespace

Instance generate(GeneratorKind kind, int n, std::uint64_t seed, const Rational& t) {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    DyadicSource src(kind, n, seed);
    switch (kind) {
        case GeneratorKind::Uniform: return uniform(n, src, t);
        case GeneratorKind::PerturbedPermutation: return perturbed_permutation(n, src, t);
        case GeneratorKind::ClusterGap: return cluster_gap(n, src, t);
    }
    throw std::invalid_argument("unknown generator kind");
}

Matching greedy_online(const Instance& instance) {
    const int n = instance.size();
    std::vector<char> used(n, 0);
    Matching m;
    for (int r = 0; r < n; ++r) {
        int best = -1;
        Rational best_d;
        for (int s = 0; s < n; ++s) {
            if (used[s]) continue;
            Rational d = distance(instance, s, r);
            if (best < 0 || d < best_d) {
                best = s;
                best_d = std::move(d);
            }
        }
        used[best] = 1;
        m.add({best, r});
    }
    return m;
}

void ExperimentConfig::validate() const {
    if (kinds.empty()) throw std::invalid_argument("experiment needs at least one generator kind");
    if (ns.empty()) throw std::invalid_argument("experiment needs at least one n");
    for (int n : ns) {
        if (n < 1) throw std::invalid_argument("n must be at least 1 (got " + std::to_string(n) + ")");
    }
    if (seeds < 1) throw std::invalid_argument("seeds must be at least 1");
    if (t <= Rational(1)) throw std::invalid_argument("t must exceed 1");
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
    if (!j.contains("kinds") || !j.contains("n")) throw std::invalid_argument("experiment config needs kinds and n");
    for (const auto& k : j.at("kinds")) c.kinds.push_back(parse_generator_kind(k.get<std::string>()));
    for (const auto& n : j.at("n")) c.ns.push_back(n.get<int>());
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<int>();
    if (j.contains("t")) {
        const auto& t = j.at("t");
        c.t = t.is_string() ? Rational::parse(t.get<std::string>()) : Rational(t.get<long>());
    }
    if (j.contains("arith")) c.mode = parse_arith_mode(j.at("arith").get<std::string>());
    if (j.contains("float_above") && !j.at("float_above").is_null()) c.float_above = j.at("float_above").get<int>();
    if (j.contains("verify")) c.verify = j.at("verify").get<bool>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    c.validate();
    return c;
}

void apply_environment(ExperimentConfig& config) {
    if (const char* v = std::getenv("RM_ARITH"); v != nullptr && *v != '\0') config.mode = parse_arith_mode(v);
}

ResultRow run_one(GeneratorKind kind, int n, std::uint64_t seed, const ExperimentConfig& config) {
    const Instance inst = generate(kind, n, seed, config.t);
    ResultRow row;
    row.id = std::string(to_string(kind)) + "-n" + std::to_string(n) + "-s" + std::to_string(seed);
    row.kind = kind;
    row.n = n;
    row.seed = seed;
    row.exact = config.mode == ArithMode::Exact && !(config.float_above && n > *config.float_above);

    const Rational w_opt = optimal_cost(inst);
    row.w_opt = w_opt.to_double();
    row.greedy_cost = matching_cost(inst, greedy_online(inst)).to_double();
    const double norm = 1.0 + std::log2(static_cast<double>(n));

    if (row.exact) {
        EngineOptions opts;
        opts.record_snapshots = true;
        const auto trace = run_online<Rational>(inst, opts);
        Rational w_short;
        for (const auto& ph : trace.phases) {
            if (ph.kind == PathClass::Short) w_short += distance(inst, ph.server, ph.request);
        }
        row.w_online = trace.online_cost.to_double();
        row.short_cost_frac = trace.online_cost.is_zero() ? 0.0 : (w_short / trace.online_cost).to_double();
        const RatioResult ratio = final_ratio_check(trace);
        row.ratio = ratio.ratio.to_double();
        row.ratio_norm = ratio.normalized;
        try {
            if (!w_opt.is_zero()) {
                const auto g = build_genealogy(trace);
                row.max_level = assign_edge_levels(trace, g, w_opt).max_level();
            } else {
                row.max_level = 0;
            }
        } catch (const AnalysisError&) {
        }
        if (config.verify) row.checks_passed = verify_trace(trace).passed();
    } else {
        EngineOptions opts;
        opts.record_snapshots = false;
        const auto trace = run_online<double>(inst, opts);
        double w_short = 0;
        for (const auto& ph : trace.phases) {
            if (ph.kind == PathClass::Short) w_short += distance(inst, ph.server, ph.request).to_double();
        }
        row.w_online = trace.online_cost;
        row.short_cost_frac = trace.online_cost > 0 ? w_short / trace.online_cost : 0.0;
        row.ratio = w_opt.is_zero() ? 1.0 : row.w_online / row.w_opt;
        row.ratio_norm = row.ratio / norm;
    }
    return row;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    config.validate();
    auto kinds = config.kinds;
    std::sort(kinds.begin(), kinds.end());
    kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
    auto ns = config.ns;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

    std::vector<ResultRow> rows;
    for (auto kind : kinds) {
        for (int n : ns) {
            for (int seed = 0; seed < config.seeds; ++seed) {
                rows.push_back(run_one(kind, n, static_cast<std::uint64_t>(seed), config));
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.kind, a.n, a.seed) < std::tie(b.kind, b.n, b.seed);
    });
    return rows;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.id << ',' << to_string(r.kind) << ',' << r.n << ',' << r.seed << ',' << format_double(r.w_online)
            << ',' << format_double(r.w_opt) << ',' << format_double(r.ratio) << ',' << format_double(r.ratio_norm)
            << ',' << (r.max_level ? std::to_string(*r.max_level) : "NA") << ','
            << format_double(r.short_cost_frac) << ',' << format_double(r.greedy_cost) << ','
            << (r.checks_passed ? (*r.checks_passed ? "true" : "false") : "NA") << '\n';
    }
}

}  // namespace rmatch
