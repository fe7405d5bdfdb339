#pragma once

// Parameter sweeps over the simulator: waiting time against client count,
// (alpha, s_beta) grids, the hybrid/pure client-ratio search, operator
// teams, and simulation-vs-closed-form validation.
//
// Every grid point is replicated with the same master seed, so points that
// differ in one parameter share random numbers (common random numbers).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hybridq/simulator.hpp"

namespace hybridq::experiments {

/// One curve of a waiting-time sweep.
struct Variant {
    std::string name;
    Mode mode = Mode::hybrid;
    double alpha = 0.0;
    Distribution s_beta;
};

struct SweepSpec {
    SystemConfig base;
    // Empty grids keep the base value.
    std::vector<int> n_clients;
    std::vector<double> alpha;
    std::vector<double> s_beta_mean;  // replaces the location of base.s_beta
    std::vector<int> n_operators;
    std::vector<double> c_ratio;  // scales base.n_clients (rounded)
    int reps = 20;
    double sla = 5.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SweepPoint {
    int n_clients = 0;
    int n_operators = 0;
    double alpha = 0.0;
    double s_beta_mean = 0.0;
    double c_ratio = 1.0;
    ReplicatedMetrics metrics;
    bool unstable = false;
};

/// Cartesian product of the spec's grids, in grid order
/// (c_ratio, n_operators, s_beta_mean, alpha, n_clients; last fastest).
std::vector<SweepPoint> run_sweep(const SweepSpec& spec);

/// True when the config is an open system with offered load >= capacity,
/// or when any replication overloaded.
bool is_unstable(const SystemConfig& config, const ReplicatedMetrics& metrics);

struct WaitRow {
    int n = 0;
    std::string variant;
    Estimate wait_hard;
    double utilization = 0.0;
    double agent_share = 0.0;
    bool unstable = false;
};

/// Hard-question wait for every (n in spec.n_clients, variant).
std::vector<WaitRow> sweep_wait_vs_n(const SweepSpec& spec, std::span<const Variant> variants);

/// Largest n of `variant` before the first row whose wait exceeds `sla`
/// (rows scanned in increasing n). 0 if even the smallest n fails.
int sla_frontier(std::span<const WaitRow> rows, const std::string& variant, double sla);

struct BubbleGrid {
    std::vector<double> alphas;
    std::vector<double> s_beta_means;
    int n = 0;
    std::vector<std::vector<Estimate>> wait_hard;  // [alpha][s_beta]
};

BubbleGrid sweep_bubble_grid(const SystemConfig& base, std::span<const double> alphas,
                             std::span<const double> s_beta_means, int n, int reps,
                             std::uint64_t seed);

struct WinWinCondition {
    std::string name;
    double alpha = 0.0;
    Distribution s_beta;
};

enum class Comparison {
    means,         // hybrid mean <= pure mean
    ci_separated,  // hybrid upper CI bound <= pure lower CI bound
};

struct WinWinResult {
    int n_pure = 0;
    double w_pure = 0.0;
    int n_hybrid_max = 0;
    double achieved_c = 0.0;
};

/// For each n_pure, the largest hybrid client count whose overall mean wait
/// (agent-answered questions count as zero) does not exceed the pure-human
/// one. Pure-human runs answer both question types; hybrid runs send the
/// alpha fraction to the agent. Hybrid n is scanned upward from 1, stopping
/// at the first failure past n_pure.
std::vector<WinWinResult> win_win_curve(const SystemConfig& base, const WinWinCondition& cond,
                                        std::span<const int> n_pure_range, int reps,
                                        std::uint64_t seed, Comparison cmp = Comparison::means,
                                        int n_max = 80);

double mean_achieved_c(std::span<const WinWinResult> curve);

struct TeamRow {
    int operators = 0;
    int clients_per_operator = 0;
    double s_beta_mean = 0.0;
    Estimate wait_hard;
};

struct TeamDelta {
    int clients_per_operator = 0;
    double s_beta_mean = 0.0;
    int from_operators = 0;  // delta = wait(k) - wait(k + 1)
    double delta = 0.0;
};

struct TeamScaling {
    std::vector<TeamRow> rows;
    std::vector<TeamDelta> deltas;
};

TeamScaling team_scaling(const SystemConfig& base, std::span<const int> clients_per_operator,
                         std::span<const int> operator_counts,
                         std::span<const double> s_beta_means, int reps, std::uint64_t seed);

struct ValidationEntry {
    std::string metric;
    double simulated = 0.0;
    double half_width = 0.0;
    double analytic = 0.0;
    double relative_error = 0.0;
    bool flagged = false;
};

struct ValidationReport {
    std::vector<ValidationEntry> entries;
    bool any_flagged() const;
};

/// Open-model pure-human or hybrid config against mg1_wait / hybrid_wait
/// using the distributions' effective moments. Hybrid configs are checked
/// against both epsilon treatments: the simulated wait should sit between
/// them, so an entry is flagged only when it falls outside that band by
/// more than `tolerance` (relative). Requires a single operator.
ValidationReport validate_against_analytic(const SystemConfig& config, int reps,
                                           std::uint64_t seed, double tolerance = 0.05);

struct PairedComparison {
    Estimate pure;
    Estimate hybrid;
    Estimate difference;  // per replication, pure - hybrid
};

/// Overall mean wait of two configs replicated with identical seeds.
PairedComparison compare_paired(const SystemConfig& pure, const SystemConfig& hybrid, int reps,
                                std::uint64_t seed);

}  // namespace hybridq::experiments
