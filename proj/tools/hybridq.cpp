// hybridq: closed-form waits, single scenario simulation, and experiment presets.
//
// Exit codes: 0 ok, 1 I/O failure, 2 invalid input, 3 unstable or overloaded.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hybridq/analytic.hpp"
#include "hybridq/config_io.hpp"
#include "hybridq/errors.hpp"
#include "hybridq/presets.hpp"
#include "hybridq/version.hpp"

using namespace hybridq;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kIo = 1, kInvalid = 2, kUnstable = 3;

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("HYBRIDQ_SEED");
    if (!s || !*s) return std::nullopt;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != std::string(s).size()) throw ValidationError("");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("HYBRIDQ_SEED must be a non-negative integer");
    }
}

// --- analytic -----------------------------------------------------------------

struct AnalyticArgs {
    double lambda = 0.0, c = 1.0, alpha = 0.0;
    double s_alpha = 0.0, s_beta = 0.0, sigma_s_beta = 0.0, sigma_s_alpha = 0.0;
    double epsilon = 0.0;
    std::optional<double> sigma_s;
    bool no_epsilon = false;
    bool json_out = false;
};

std::string fmt(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

int cmd_analytic(const AnalyticArgs& a) {
    if (!(a.alpha >= 0.0 && a.alpha <= 1.0)) throw ValidationError("--alpha must be in [0, 1]");
    analytic::AnalyticInputs in;
    in.lambda_total = a.lambda;
    in.c_ratio = a.c;
    in.beta = 1.0 - a.alpha;
    in.s_alpha = a.s_alpha;
    in.s_beta = a.s_beta;
    in.sigma_s_beta = a.sigma_s_beta;
    in.sigma_s = a.sigma_s ? *a.sigma_s
                           : analytic::mixture_stddev(in.beta, a.s_beta, a.sigma_s_beta,
                                                      a.s_alpha, a.sigma_s_alpha);
    in.epsilon = a.epsilon;
    const auto eps = a.no_epsilon ? analytic::EpsilonTerm::omit : analytic::EpsilonTerm::include;
    const auto r = analytic::evaluate(in, eps);

    const bool within = !r.c_star || a.c <= *r.c_star;
    const bool stable = r.stable_pure && r.stable_hybrid;
    const bool improves = stable && *r.w_hybrid < *r.w_pure;

    if (a.json_out) {
        json j = io::to_json(r);
        j["sigma_s"] = in.sigma_s;
        j["c"] = a.c;
        j["within_bound"] = within;
        j["hybrid_waits_less"] = stable ? json(improves) : json(nullptr);
        std::cout << j.dump(2) << '\n';
    } else {
        auto line = [](const char* k, const std::string& v) {
            std::printf("%-16s %s\n", k, v.c_str());
        };
        line("s", fmt(r.s_mix));
        line("sigma_s", fmt(in.sigma_s));
        line("tau", fmt(r.tau));
        line("rho", fmt(r.rho));
        line("rho_hat", fmt(r.rho_hat));
        line("W_pure", r.stable_pure ? fmt(r.w_pure) : "unstable");
        line("W_hybrid", r.stable_hybrid ? fmt(r.w_hybrid) : "unstable");
        line("W_hybrid_hard", r.stable_hybrid ? fmt(r.w_hybrid_hard) : "unstable");
        line("c_star", r.c_star ? fmt(r.c_star) : "unbounded");
        line("c_within_bound", within ? "yes" : "no");
        line("hybrid_wins", stable ? (improves ? "yes" : "no") : "n/a");
    }
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    if (!stable) {
        std::cerr << "unstable\n";
        return kUnstable;
    }
    return kOk;
}

// --- simulate -----------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    int reps = 1;
    std::string trace;
};

int cmd_simulate(const SimulateArgs& a) {
    const json raw = io::load_file(a.config);
    SystemConfig cfg = io::system_config_from_json(raw);
    std::uint64_t seed = 0;
    if (a.seed) seed = *a.seed;
    else if (raw.contains("seed")) seed = cfg.seed;
    else if (auto e = env_seed()) seed = *e;
    cfg.seed = seed;
    if (a.reps < 1) throw ValidationError("--reps must be >= 1");
    if (!a.trace.empty() && a.reps != 1) throw ValidationError("--trace needs --reps 1");

    json out = {{"tool", kToolName},
                {"version", kVersion},
                {"config_hash", io::config_hash(io::to_json(cfg))},
                {"seed", seed},
                {"reps", a.reps}};
    bool unstable = false;
    if (a.reps == 1) {
        const RunResult r = run(cfg, seed, {.keep_trace = !a.trace.empty()});
        out["metrics"] = io::to_json(r.metrics);
        if (!a.trace.empty()) {
            std::ofstream f(a.trace, std::ios::binary);
            if (!f) throw IoError("cannot write " + a.trace);
            write_trace_csv(f, r.trace);
            if (!f) throw IoError("write failed for " + a.trace);
        }
    } else {
        const ReplicatedMetrics m = replicate(cfg, a.reps, seed);
        out["metrics"] = io::to_json(m);
        unstable = m.unstable;
    }
    std::cout << out.dump(2) << '\n';
    if (unstable) {
        std::cerr << "unstable: queue cap exceeded in at least one replication\n";
        return kUnstable;
    }
    return kOk;
}

// --- experiment ---------------------------------------------------------------

struct ExperimentArgs {
    std::string preset;
    std::string spec;
    std::string out = "results";
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<int> episodes;
    bool svg = false;
};

int cmd_experiment(const ExperimentArgs& a) {
    report::Output output;
    std::uint64_t seed = 0;
    if (!a.spec.empty()) {
        const json raw = io::load_file(a.spec);
        auto spec = io::sweep_spec_from_json(raw);
        if (a.seed) spec.seed = *a.seed;
        else if (!raw.contains("seed"))
            if (auto e = env_seed()) spec.seed = *e;
        if (a.reps) spec.reps = *a.reps;
        seed = spec.seed;
        output = presets::run_spec(spec, a.svg);
    } else {
        presets::PresetOptions o;
        if (a.seed) o.seed = *a.seed;
        else if (auto e = env_seed()) o.seed = *e;
        if (a.reps) o.reps = *a.reps;
        if (a.episodes) o.episodes = *a.episodes;
        o.charts = a.svg;
        seed = o.seed;
        output = presets::run(a.preset, o);
    }
    report::write_output(output, a.out, seed);
    std::cout << output.summary.dump(2) << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacity planning for hybrid human/agent service centers"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
    app.require_subcommand(1);

    AnalyticArgs aa;
    auto* an = app.add_subcommand("analytic", "closed-form waits and the client-ratio bound");
    an->add_option("--lambda", aa.lambda, "total question rate of the pure-human center (1/min)")
        ->required();
    an->add_option("--c", aa.c, "client ratio, hybrid / pure-human")->default_val(1.0);
    an->add_option("--alpha", aa.alpha, "fraction of questions the agent can answer")
        ->default_val(0.0);
    an->add_option("--s-alpha", aa.s_alpha, "mean human time for easy questions (min)")
        ->default_val(0.0);
    an->add_option("--s-beta", aa.s_beta, "mean human time for hard questions (min)")->required();
    an->add_option("--sigma-s-beta", aa.sigma_s_beta, "std. dev. of the hard service time")
        ->default_val(0.0);
    an->add_option("--sigma-s-alpha", aa.sigma_s_alpha, "std. dev. of the easy service time")
        ->default_val(0.0);
    an->add_option("--sigma-s", aa.sigma_s,
                   "std. dev. of the pure-human service time (default: from the mixture)");
    an->add_option("--epsilon", aa.epsilon, "mean agent time to reject a hard question (min)")
        ->default_val(0.0);
    an->add_flag("--no-epsilon", aa.no_epsilon, "drop epsilon from the hybrid wait");
    an->add_flag("--json", aa.json_out, "print JSON");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "simulate one scenario file");
    sim->add_option("config", sa.config, "scenario JSON")->required();
    sim->add_option("--seed", sa.seed, "master seed (default: config, then HYBRIDQ_SEED)");
    sim->add_option("--reps", sa.reps, "independent replications")->default_val(1);
    sim->add_option("--trace", sa.trace, "write the question trace CSV here (single run)");

    ExperimentArgs ea;
    auto* ex = app.add_subcommand("experiment", "run a preset or a sweep file");
    auto* preset = ex->add_option("--preset", ea.preset,
                                  "fig4a, fig4b, fig4c, fig5, fig6 or learning");
    auto* spec = ex->add_option("--spec", ea.spec, "sweep JSON");
    preset->excludes(spec);
    ex->add_option("--out", ea.out, "output directory")->default_val("results");
    ex->add_option("--seed", ea.seed, "master seed (default: HYBRIDQ_SEED, then 1)");
    ex->add_option("--reps", ea.reps, "replications per grid point");
    ex->add_option("--episodes", ea.episodes, "sessions pooled per replication (presets)");
    ex->add_flag("--svg", ea.svg, "also write SVG charts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        if (*an) return cmd_analytic(aa);
        if (*sim) return cmd_simulate(sa);
        if (ea.preset.empty() && ea.spec.empty())
            throw ValidationError("experiment needs --preset or --spec");
        return cmd_experiment(ea);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const UnstableError& e) {
        std::cerr << "unstable: " << e.what() << '\n';
        return kUnstable;
    } catch (const OverloadError& e) {
        std::cerr << "unstable: " << e.what() << '\n';
        return kUnstable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }
}
