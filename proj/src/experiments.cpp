#include "hybridq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hybridq/analytic.hpp"
#include "hybridq/errors.hpp"

namespace hybridq::experiments {

namespace {

Distribution with_location(const Distribution& d, double mean) {
    switch (d.kind()) {
        case Distribution::Kind::deterministic: return Distribution::deterministic(mean);
        case Distribution::Kind::exponential: return Distribution::exponential(mean);
        case Distribution::Kind::truncated_normal:
            return Distribution::truncated_normal(mean, d.stddev());
        case Distribution::Kind::empirical: {
            // Shift the observations so their mean lands on `mean`.
            std::vector<double> xs(d.samples().begin(), d.samples().end());
            const double shift = mean - d.mean();
            for (double& x : xs) x = std::max(0.0, x + shift);
            return Distribution::empirical(std::move(xs));
        }
    }
    return d;
}

template <class T>
std::vector<T> or_base(const std::vector<T>& grid, T base) {
    return grid.empty() ? std::vector<T>{base} : grid;
}

}  // namespace

void SweepSpec::validate() const {
    base.validate();
    if (reps < 2) throw ValidationError("sweep reps must be >= 2");
    if (!(sla > 0.0)) throw ValidationError("sla must be > 0");
    for (int n : n_clients)
        if (n < 1) throw ValidationError("swept n_clients must be >= 1");
    for (int k : n_operators)
        if (k < 1) throw ValidationError("swept n_operators must be >= 1");
    for (double a : alpha)
        if (a < 0.0 || a > 1.0) throw ValidationError("swept alpha must lie in [0, 1]");
    for (double s : s_beta_mean)
        if (!(s >= 0.0)) throw ValidationError("swept s_beta_mean must be >= 0");
    for (double c : c_ratio)
        if (!(c > 0.0)) throw ValidationError("swept c_ratio must be > 0");
}

bool is_unstable(const SystemConfig& cfg, const ReplicatedMetrics& metrics) {
    if (metrics.unstable) return true;
    if (cfg.client_model != ClientModel::open) return false;
    const double beta = 1.0 - cfg.alpha;
    double work = 0.0;  // mean operator minutes per question
    switch (cfg.mode) {
        case Mode::pure_human:
            work = analytic::mixture_mean(beta, cfg.s_beta.effective_mean(),
                                          cfg.s_alpha_human.effective_mean());
            break;
        case Mode::hybrid: work = beta * cfg.s_beta.effective_mean(); break;
        case Mode::hybrid_learning: return false;  // alpha drifts; no fixed load
    }
    return cfg.n_clients * cfg.lambda_bar * work >= cfg.n_operators;
}

std::vector<SweepPoint> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<SweepPoint> out;
    for (double c : or_base(spec.c_ratio, 1.0)) {
        for (int k : or_base(spec.n_operators, spec.base.n_operators)) {
            for (double sb : or_base(spec.s_beta_mean, spec.base.s_beta.mean())) {
                for (double a : or_base(spec.alpha, spec.base.alpha)) {
                    for (int n : or_base(spec.n_clients, spec.base.n_clients)) {
                        SystemConfig cfg = spec.base;
                        cfg.n_clients = std::max(1, static_cast<int>(std::lround(c * n)));
                        cfg.n_operators = k;
                        cfg.alpha = a;
                        cfg.s_beta = with_location(spec.base.s_beta, sb);
                        SweepPoint p;
                        p.n_clients = cfg.n_clients;
                        p.n_operators = k;
                        p.alpha = a;
                        p.s_beta_mean = sb;
                        p.c_ratio = c;
                        p.metrics = replicate(cfg, spec.reps, spec.seed);
                        p.unstable = is_unstable(cfg, p.metrics);
                        out.push_back(std::move(p));
                    }
                }
            }
        }
    }
    return out;
}

std::vector<WaitRow> sweep_wait_vs_n(const SweepSpec& spec, std::span<const Variant> variants) {
    spec.validate();
    std::vector<WaitRow> rows;
    for (const Variant& v : variants) {
        for (int n : or_base(spec.n_clients, spec.base.n_clients)) {
            SystemConfig cfg = spec.base;
            cfg.mode = v.mode;
            cfg.alpha = v.alpha;
            cfg.s_beta = v.s_beta;
            cfg.n_clients = n;
            const ReplicatedMetrics m = replicate(cfg, spec.reps, spec.seed);
            rows.push_back(WaitRow{n, v.name, m.mean_wait_hard, m.operator_utilization.mean,
                                   m.agent_share.mean, is_unstable(cfg, m)});
        }
    }
    return rows;
}

int sla_frontier(std::span<const WaitRow> rows, const std::string& variant, double sla) {
    std::vector<const WaitRow*> mine;
    for (const WaitRow& r : rows)
        if (r.variant == variant) mine.push_back(&r);
    std::sort(mine.begin(), mine.end(), [](auto* a, auto* b) { return a->n < b->n; });
    int best = 0;
    for (const WaitRow* r : mine) {
        // No hard question at all (alpha = 1) counts as meeting the SLA.
        const double w = std::isnan(r->wait_hard.mean) ? 0.0 : r->wait_hard.mean;
        if (r->unstable || w > sla) break;
        best = r->n;
    }
    return best;
}

BubbleGrid sweep_bubble_grid(const SystemConfig& base, std::span<const double> alphas,
                             std::span<const double> s_beta_means, int n, int reps,
                             std::uint64_t seed) {
    if (n < 1) throw ValidationError("bubble grid needs n >= 1");
    BubbleGrid g;
    g.alphas.assign(alphas.begin(), alphas.end());
    g.s_beta_means.assign(s_beta_means.begin(), s_beta_means.end());
    g.n = n;
    for (double a : alphas) {
        auto& row = g.wait_hard.emplace_back();
        for (double sb : s_beta_means) {
            SystemConfig cfg = base;
            cfg.mode = Mode::hybrid;
            cfg.alpha = a;
            cfg.n_clients = n;
            cfg.s_beta = with_location(base.s_beta, sb);
            row.push_back(replicate(cfg, reps, seed).mean_wait_hard);
        }
    }
    return g;
}

std::vector<WinWinResult> win_win_curve(const SystemConfig& base, const WinWinCondition& cond,
                                        std::span<const int> n_pure_range, int reps,
                                        std::uint64_t seed, Comparison cmp, int n_max) {
    SystemConfig pure = base;
    pure.mode = Mode::pure_human;
    pure.alpha = cond.alpha;
    pure.s_beta = cond.s_beta;
    SystemConfig hybrid = pure;
    hybrid.mode = Mode::hybrid;

    std::map<int, Estimate> hybrid_cache;
    auto hybrid_wait = [&](int n) -> const Estimate& {
        auto it = hybrid_cache.find(n);
        if (it == hybrid_cache.end()) {
            hybrid.n_clients = n;
            const ReplicatedMetrics m = replicate(hybrid, reps, seed);
            Estimate e = m.mean_wait_overall;
            if (is_unstable(hybrid, m)) e.mean = INFINITY;
            it = hybrid_cache.emplace(n, e).first;
        }
        return it->second;
    };

    std::vector<WinWinResult> out;
    for (int n_pure : n_pure_range) {
        pure.n_clients = n_pure;
        const ReplicatedMetrics pm = replicate(pure, reps, seed);
        if (is_unstable(pure, pm)) throw UnstableError("pure-human system unstable at n = " +
                                                       std::to_string(n_pure));
        const Estimate wp = pm.mean_wait_overall;
        const double bar = cmp == Comparison::means ? wp.mean : wp.mean - wp.half_width;

        WinWinResult r;
        r.n_pure = n_pure;
        r.w_pure = wp.mean;
        for (int n = 1; n <= n_max; ++n) {
            const Estimate& h = hybrid_wait(n);
            const double value = cmp == Comparison::means ? h.mean : h.mean + h.half_width;
            if (value <= bar) {
                r.n_hybrid_max = n;
            } else if (n > n_pure) {
                break;
            }
        }
        r.achieved_c = static_cast<double>(r.n_hybrid_max) / n_pure;
        out.push_back(r);
    }
    return out;
}

double mean_achieved_c(std::span<const WinWinResult> curve) {
    if (curve.empty()) return NAN;
    double s = 0.0;
    for (const auto& r : curve) s += r.achieved_c;
    return s / static_cast<double>(curve.size());
}

TeamScaling team_scaling(const SystemConfig& base, std::span<const int> clients_per_operator,
                         std::span<const int> operator_counts,
                         std::span<const double> s_beta_means, int reps, std::uint64_t seed) {
    TeamScaling out;
    std::vector<int> ks(operator_counts.begin(), operator_counts.end());
    std::sort(ks.begin(), ks.end());
    for (int k : ks)
        if (k < 1) throw ValidationError("operator counts must be >= 1");
    for (double sb : s_beta_means) {
        for (int ratio : clients_per_operator) {
            std::vector<double> waits;
            for (int k : ks) {
                SystemConfig cfg = base;
                cfg.n_operators = k;
                cfg.n_clients = k * ratio;
                cfg.s_beta = with_location(base.s_beta, sb);
                const Estimate w = replicate(cfg, reps, seed).mean_wait_hard;
                out.rows.push_back(TeamRow{k, ratio, sb, w});
                waits.push_back(w.mean);
            }
            for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
                if (ks[i + 1] != ks[i] + 1) continue;
                out.deltas.push_back(TeamDelta{ratio, sb, ks[i], waits[i] - waits[i + 1]});
            }
        }
    }
    return out;
}

bool ValidationReport::any_flagged() const {
    return std::any_of(entries.begin(), entries.end(), [](const auto& e) { return e.flagged; });
}

ValidationReport validate_against_analytic(const SystemConfig& cfg, int reps, std::uint64_t seed,
                                           double tolerance) {
    if (cfg.client_model != ClientModel::open || cfg.n_operators != 1 ||
        cfg.mode == Mode::hybrid_learning) {
        throw ValidationError(
            "analytic validation needs an open single-operator pure-human or hybrid config");
    }
    const double beta = 1.0 - cfg.alpha;
    const double lambda = cfg.n_clients * cfg.lambda_bar;
    analytic::AnalyticInputs in;
    in.lambda_total = lambda;
    in.c_ratio = 1.0;
    in.beta = beta;
    in.s_alpha = cfg.s_alpha_human.effective_mean();
    in.s_beta = cfg.s_beta.effective_mean();
    in.sigma_s_beta = cfg.s_beta.effective_stddev();
    in.sigma_s = analytic::mixture_stddev(beta, in.s_beta, in.sigma_s_beta, in.s_alpha,
                                          cfg.s_alpha_human.effective_stddev());
    in.epsilon = cfg.epsilon.effective_mean();

    const ReplicatedMetrics m = replicate(cfg, reps, seed);
    ValidationReport rep;
    auto rel = [](double sim, double ref) {
        return ref != 0.0 ? std::abs(sim - ref) / std::abs(ref) : std::abs(sim);
    };

    if (cfg.mode == Mode::pure_human) {
        const double s = analytic::mixture_mean(beta, in.s_beta, in.s_alpha);
        const double w = analytic::mg1_wait(lambda, s, in.sigma_s);
        const double e = rel(m.mean_wait_overall.mean, w);
        rep.entries.push_back({"mean_wait", m.mean_wait_overall.mean,
                               m.mean_wait_overall.half_width, w, e, e > tolerance});
        const double rho = lambda * s;
        const double eu = rel(m.operator_utilization.mean, rho);
        rep.entries.push_back({"utilization", m.operator_utilization.mean,
                               m.operator_utilization.half_width, rho, eu, eu > tolerance});
        return rep;
    }

    const auto upper = analytic::hybrid_wait(in, analytic::EpsilonTerm::include);
    const auto lower = analytic::hybrid_wait(in, analytic::EpsilonTerm::omit);
    auto banded = [&](const std::string& name, const Estimate& sim, double lo, double hi) {
        double err = 0.0;
        if (sim.mean > hi) err = rel(sim.mean, hi);
        else if (sim.mean < lo) err = rel(sim.mean, lo);
        rep.entries.push_back({name + " (vs epsilon-added bound)", sim.mean, sim.half_width, hi,
                               rel(sim.mean, hi), err > tolerance});
        rep.entries.push_back({name + " (vs epsilon-free bound)", sim.mean, sim.half_width, lo,
                               rel(sim.mean, lo), err > tolerance});
    };
    banded("mean_wait", m.mean_wait_overall, lower.overall, upper.overall);
    banded("mean_wait_hard", m.mean_wait_hard, lower.hard, upper.hard);
    const double rho_hat = beta * lambda * in.s_beta;
    const double eu = rel(m.operator_utilization.mean, rho_hat);
    rep.entries.push_back({"utilization", m.operator_utilization.mean,
                           m.operator_utilization.half_width, rho_hat, eu, eu > tolerance});
    return rep;
}

PairedComparison compare_paired(const SystemConfig& pure, const SystemConfig& hybrid, int reps,
                                std::uint64_t seed) {
    const ReplicatedMetrics p = replicate(pure, reps, seed);
    const ReplicatedMetrics h = replicate(hybrid, reps, seed);
    if (is_unstable(pure, p) || is_unstable(hybrid, h)) {
        throw UnstableError("paired comparison on an unstable system");
    }
    std::vector<double> diff;
    for (std::size_t i = 0; i < p.replications.size() && i < h.replications.size(); ++i) {
        diff.push_back(p.replications[i].mean_wait_overall - h.replications[i].mean_wait_overall);
    }
    return {p.mean_wait_overall, h.mean_wait_overall, estimate(diff)};
}

}  // namespace hybridq::experiments
