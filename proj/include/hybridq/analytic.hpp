#pragma once

// Closed-form M/G/1 waiting times for the pure-human and hybrid service
// centers, plus the client-ratio bound under which the hybrid center is
// guaranteed to wait less.
//
// Units: times in minutes, rates in questions per minute.

#include <optional>
#include <string>
#include <vector>

namespace hybridq::analytic {

struct AnalyticInputs {
    double lambda_total = 0.0;  // n * per-client rate, pure-human environment
    double c_ratio = 1.0;       // hybrid clients / pure-human clients
    double beta = 1.0;          // fraction of hard questions
    double s_alpha = 0.0;
    double s_beta = 0.0;
    double sigma_s_beta = 0.0;
    double sigma_s = 0.0;  // std. dev. of the pure-human service mixture
    double epsilon = 0.0;  // mean agent time to reject a hard question
};

/// Whether the classification time is added to the hybrid wait (the
/// pessimistic closed form) or dropped (the small-epsilon approximation).
enum class EpsilonTerm { include, omit };

struct AnalyticReport {
    double s_mix = 0.0;
    double tau = 0.0;
    double rho = 0.0;
    double rho_hat = 0.0;
    std::optional<double> w_pure;         // empty when unstable
    std::optional<double> w_hybrid;       // overall, hard-fraction weighted
    std::optional<double> w_hybrid_hard;  // per hard question
    std::optional<double> c_star;         // empty when beta == 0 (unbounded)
    bool stable_pure = false;
    bool stable_hybrid = false;
    std::vector<std::string> warnings;
};

struct HybridWait {
    double overall = 0.0;
    double hard = 0.0;
};

struct WinWinReport {
    std::optional<double> c_star;
    bool within_bound = false;
    double w_pure = 0.0;
    double w_hybrid = 0.0;
    bool strict_improvement = false;
};

/// s = beta * s_beta + (1 - beta) * s_alpha
double mixture_mean(double beta, double s_beta, double s_alpha);

/// Standard deviation of the two-component service mixture.
double mixture_stddev(double beta, double s_beta, double sigma_s_beta, double s_alpha,
                      double sigma_s_alpha);

/// Pollaczek-Khinchine mean queue wait (service excluded).
/// Throws UnstableError when lambda * s >= 1. A zero arrival rate waits 0.
double mg1_wait(double lambda, double s, double sigma_s);

/// Hybrid waits with hard-question rate c*beta*lambda. beta == 0 yields
/// {0, epsilon}. Throws UnstableError when the hybrid utilization >= 1.
HybridWait hybrid_wait(const AnalyticInputs& in, EpsilonTerm eps = EpsilonTerm::include);

/// Largest client ratio s / (beta * s_beta) with guaranteed lower waits.
/// Throws std::domain_error for beta == 0, where the bound is unbounded.
double max_client_ratio(double beta, double s_beta, double s_alpha);

/// Throws UnstableError if either system is unstable.
WinWinReport win_win_check(const AnalyticInputs& in, EpsilonTerm eps = EpsilonTerm::include);

/// Domain checks. Throws ValidationError on hard violations and returns
/// soft warnings (e.g. sigma_s_beta >= sigma_s).
std::vector<std::string> validate(const AnalyticInputs& in);

/// Everything at once; instability is reported through the flags and empty
/// optionals rather than thrown.
AnalyticReport evaluate(const AnalyticInputs& in, EpsilonTerm eps = EpsilonTerm::include);

}  // namespace hybridq::analytic
