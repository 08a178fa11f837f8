// Command-line front end: instance generation, single runs, verification and
// experiment sweeps.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmatch/genbench.hpp"
#include "rmatch/instance_io.hpp"
#include "rmatch/trace_io.hpp"
#include "rmatch/verify.hpp"

using namespace rmatch;

namespace {

void write_json(const nlohmann::json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

Instance load_with_t(const std::string& path, const std::string& t) {
    Instance inst = load_instance(path);
    if (!t.empty()) inst = inst.with_t(Rational::parse(t));
    return inst;
}

int cmd_gen(const std::string& kind, int n, std::uint64_t seed, const std::string& t, const std::string& out) {
    const Instance inst = generate(parse_generator_kind(kind), n, seed, Rational::parse(t));
    if (out.empty() || out == "-") {
        std::cout << instance_to_json(inst).dump(2) << '\n';
    } else {
        save_instance(inst, out);
    }
    return 0;
}

int cmd_run(const std::string& path, const std::string& t, const std::string& arith, const std::string& emit,
            bool with_duals) {
    const Instance inst = load_with_t(path, t);
    ArithMode mode = parse_arith_mode(arith);
    if (const char* v = std::getenv("RM_ARITH"); v != nullptr && *v != '\0') mode = parse_arith_mode(v);
    nlohmann::json summary;
    summary["n"] = inst.size();
    summary["t"] = inst.t().str();
    summary["arith"] = to_string(mode);
    const Rational w_opt = optimal_cost(inst);
    summary["w_opt"] = w_opt.str();
    summary["greedy_cost"] = matching_cost(inst, greedy_online(inst)).str();
    if (mode == ArithMode::Exact) {
        EngineOptions opts;
        opts.record_snapshots = !emit.empty() || with_duals;
        const auto trace = run_online<Rational>(inst, opts);
        const RatioResult ratio = final_ratio_check(trace);
        int short_paths = 0;
        for (const auto& ph : trace.phases) short_paths += ph.kind == PathClass::Short;
        summary["w_online"] = trace.online_cost.str();
        summary["ratio"] = ratio.ratio.str();
        summary["ratio_norm"] = ratio.normalized;
        summary["short_paths"] = short_paths;
        if (!emit.empty()) write_json(trace_to_json(trace, with_duals), emit);
    } else {
        if (!emit.empty()) throw std::invalid_argument("--emit-trace needs exact arithmetic");
        EngineOptions opts;
        opts.record_snapshots = false;
        const auto trace = run_online<double>(inst, opts);
        summary["w_online"] = trace.online_cost;
        summary["ratio"] = w_opt.is_zero() ? 1.0 : trace.online_cost / w_opt.to_double();
    }
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_verify(const std::string& path, const std::string& t, const std::string& merge, const std::string& out) {
    const Instance inst = load_with_t(path, t);
    VerifyOptions opts;
    if (merge == "closed") {
        opts.lemmas.policy = MergePolicy::Closed;
    } else if (merge != "open") {
        throw std::invalid_argument("--merge must be open or closed");
    }
    const auto trace = run_online<Rational>(inst);
    const auto report = verify_trace(trace, opts);
    write_json(verification_document(trace, report, opts.lemmas), out);
    for (const auto& f : report.failures()) std::cerr << "FAIL " << f << '\n';
    return report.passed() ? 0 : 1;
}

int cmd_experiment(const std::string& config_path, const std::string& out_override, std::optional<int> seeds,
                   bool verify) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot read " + config_path);
    ExperimentConfig config = experiment_config_from_json(nlohmann::json::parse(in));
    apply_environment(config);
    if (seeds) config.seeds = *seeds;
    if (verify) config.verify = true;
    if (!out_override.empty()) config.output = out_override;
    const auto rows = run_experiment(config);
    if (config.output.empty() || config.output == "-") {
        write_csv(rows, std::cout);
    } else {
        std::ofstream out(config.output);
        if (!out) throw std::runtime_error("cannot write " + config.output);
        write_csv(rows, out);
    }
    bool all_ok = true;
    for (const auto& r : rows) all_ok = all_ok && r.checks_passed.value_or(true);
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online metric bipartite matching with the RM algorithm"};
    app.require_subcommand(1);

    std::string kind = "uniform", gen_out, gen_t = "3";
    int n = 16;
    std::uint64_t seed = 0;
    auto* gen = app.add_subcommand("gen", "Generate a random instance");
    gen->add_option("--kind", kind, "uniform | perturbed-permutation | cluster-gap")->capture_default_str();
    gen->add_option("--n", n, "Number of servers (= requests)")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--seed", seed, "Random seed")->capture_default_str();
    gen->add_option("--t", gen_t, "Parameter t > 1 stored in the instance")->capture_default_str();
    gen->add_option("--out", gen_out, "Output file (stdout if omitted)");

    std::string run_instance, run_t, run_arith = "exact", run_emit;
    bool run_duals = false;
    auto* run = app.add_subcommand("run", "Run the online algorithm and print costs");
    run->add_option("--instance", run_instance, "Instance JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--t", run_t, "Override t");
    run->add_option("--arith", run_arith, "exact | float (RM_ARITH overrides)")->capture_default_str();
    run->add_option("--emit-trace", run_emit, "Write the per-phase trace as JSON");
    run->add_flag("--duals", run_duals, "Include dual snapshots in the trace");

    std::string ver_instance, ver_t, ver_merge = "open", ver_out;
    auto* ver = app.add_subcommand("verify", "Run the algorithm and check every invariant and lemma");
    ver->add_option("--instance", ver_instance, "Instance JSON file")->required()->check(CLI::ExistingFile);
    ver->add_option("--t", ver_t, "Override t");
    ver->add_option("--merge", ver_merge, "Region merge policy: open | closed")->capture_default_str();
    ver->add_option("--out", ver_out, "Report file (stdout if omitted)");

    std::string exp_config, exp_out;
    std::optional<int> exp_seeds;
    bool exp_verify = false;
    auto* exp = app.add_subcommand("experiment", "Run a benchmark sweep and write CSV");
    exp->add_option("--config", exp_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
    exp->add_option("--out", exp_out, "CSV output file (overrides the config)");
    exp->add_option("--seeds", exp_seeds, "Override seeds per n");
    exp->add_flag("--verify", exp_verify, "Verify every exact run");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(kind, n, seed, gen_t, gen_out);
        if (run->parsed()) return cmd_run(run_instance, run_t, run_arith, run_emit, run_duals);
        if (ver->parsed()) return cmd_verify(ver_instance, ver_t, ver_merge, ver_out);
        if (exp->parsed()) return cmd_experiment(exp_config, exp_out, exp_seeds, exp_verify);
    } catch (const InstanceError& e) {
        std::cerr << "invalid instance:\n";
        for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
