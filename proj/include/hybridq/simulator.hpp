#pragma once

// Discrete-event simulation of a service center where a virtual agent
// screens every question and a team of human operators serves the rest
// from a single FIFO queue.
//
// Client models:
//   open   - every client is an independent Poisson source at lambda_bar,
//            whether or not its previous question was answered (M/G/k).
//   closed - a client works for an Exp(1/lambda_bar) spell, asks, and is
//            blocked until the answer arrives, then starts a new spell.
//
// A run consists of `episodes` independent episodes, each starting from an
// empty system at t = 0 and lasting `horizon` minutes. Episodes are laid end
// to end on the trace timeline: episode e covers [e*horizon, (e+1)*horizon).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hybridq/stochastic.hpp"

namespace hybridq {

enum class Mode { pure_human, hybrid, hybrid_learning };
enum class ClientModel { open, closed };
enum class Popularity { uniform, zipf };
enum class Answerer { agent, human };

const char* to_string(Mode m);
const char* to_string(ClientModel m);
const char* to_string(Popularity p);

struct LearningConfig {
    int catalog_size = 1;
    Popularity popularity = Popularity::uniform;
    double zipf_exponent = 1.0;
    int initial_db_size = 0;  // the most popular types start out known
    double session_length = 60.0;  // width of the agent-share series buckets

    void validate() const;
};

struct SystemConfig {
    Mode mode = Mode::pure_human;
    ClientModel client_model = ClientModel::open;
    int n_clients = 1;
    int n_operators = 1;
    double lambda_bar = 0.1;  // per-client question rate
    double alpha = 0.0;       // ignored in hybrid_learning
    Distribution s_alpha_human;
    Distribution s_alpha_agent;
    Distribution s_beta;
    Distribution epsilon;
    double horizon = 1000.0;
    double warmup = 100.0;
    int episodes = 1;
    std::uint64_t seed = 0;
    std::size_t max_queue = 1'000'000;
    std::optional<LearningConfig> learning;

    /// Throws ValidationError.
    void validate() const;
};

struct QuestionRecord {
    std::uint64_t question_id = 0;
    int client_id = 0;
    double arrival = 0.0;
    QuestionType type = QuestionType::beta;
    std::optional<double> classification_end;  // hard questions seen by the agent
    double service_start = 0.0;
    double service_end = 0.0;
    Answerer answered_by = Answerer::human;
    double wait = 0.0;
};

/// Single-run metrics. Means cover questions that arrive after warmup and
/// complete before the end of their episode; NaN when nothing qualifies.
struct SimulationMetrics {
    double mean_wait_overall = 0.0;
    double mean_wait_hard = 0.0;
    double mean_response_alpha = 0.0;
    double operator_utilization = 0.0;
    std::uint64_t questions_total = 0;  // arrivals after warmup
    std::uint64_t answered_by_agent = 0;
    std::uint64_t answered_by_human = 0;
    std::uint64_t still_in_system = 0;  // unanswered at episode end
    double agent_share = 0.0;
};

struct RunResult {
    SimulationMetrics metrics;
    std::vector<QuestionRecord> trace;  // completed questions, by question_id
    /// Agent-answered fraction of the questions arriving in each
    /// session_length bucket of the horizon (learning mode only).
    std::vector<double> share_series;
};

struct RunOptions {
    bool keep_trace = true;
};

/// Throws ValidationError for a bad config, OverloadError when the queue cap
/// is exceeded.
RunResult run(const SystemConfig& config, std::uint64_t seed, RunOptions options = {});

/// Learning-mode run: metrics plus the per-session agent share.
RunResult run_learning(const SystemConfig& config, std::uint64_t seed);

struct Estimate {
    double mean = 0.0;
    double half_width = 0.0;  // 95% t-interval over replications
    int n = 0;                // replications contributing (NaNs skipped)
};

/// Mean and 95% half-width of the finite entries of `values`.
Estimate estimate(std::span<const double> values);

struct ReplicatedMetrics {
    Estimate mean_wait_overall;
    Estimate mean_wait_hard;
    Estimate mean_response_alpha;
    Estimate operator_utilization;
    Estimate agent_share;
    std::uint64_t questions_total = 0;
    std::uint64_t answered_by_agent = 0;
    std::uint64_t answered_by_human = 0;
    int n_reps = 0;
    bool unstable = false;  // at least one replication overloaded
    std::vector<std::uint64_t> seeds;
    std::vector<SimulationMetrics> replications;  // overloaded ones omitted
};

/// Child seed of replication `index`.
std::uint64_t replication_seed(std::uint64_t master_seed, int index);

/// n_reps >= 2 independent runs with seeds derived from master_seed.
ReplicatedMetrics replicate(const SystemConfig& config, int n_reps, std::uint64_t master_seed);

/// Columns: question_id,client_id,arrival,type,classification_end,
/// service_start,service_end,answered_by,wait. Times with 6 decimals.
void write_trace_csv(std::ostream& os, std::span<const QuestionRecord> trace);

}  // namespace hybridq
