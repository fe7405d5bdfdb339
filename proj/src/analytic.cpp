#include "hybridq/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hybridq/errors.hpp"

namespace hybridq::analytic {

double mixture_mean(double beta, double s_beta, double s_alpha) {
    return beta * s_beta + (1.0 - beta) * s_alpha;
}

double mixture_stddev(double beta, double s_beta, double sigma_s_beta, double s_alpha,
                      double sigma_s_alpha) {
    const double m = mixture_mean(beta, s_beta, s_alpha);
    const double second = beta * (sigma_s_beta * sigma_s_beta + s_beta * s_beta) +
                          (1.0 - beta) * (sigma_s_alpha * sigma_s_alpha + s_alpha * s_alpha);
    return std::sqrt(std::max(0.0, second - m * m));
}

double mg1_wait(double lambda, double s, double sigma_s) {
    if (lambda == 0.0) return 0.0;
    const double rho = lambda * s;
    if (rho >= 1.0) {
        std::ostringstream msg;
        msg << "unstable: utilization " << rho << " >= 1";
        throw UnstableError(msg.str());
    }
    return lambda * sigma_s * sigma_s / (2.0 * (1.0 - rho)) +
           rho * rho / (2.0 * lambda * (1.0 - rho));
}

HybridWait hybrid_wait(const AnalyticInputs& in, EpsilonTerm eps) {
    const double epsilon = eps == EpsilonTerm::include ? in.epsilon : 0.0;
    if (in.beta == 0.0) return {0.0, epsilon};
    const double lambda_hat = in.c_ratio * in.beta * in.lambda_total;
    // mg1_wait carries the stability check for rho_hat = lambda_hat * s_beta.
    const double queue = mg1_wait(lambda_hat, in.s_beta, in.sigma_s_beta);
    const double hard = queue + epsilon;
    return {in.beta * hard, hard};
}

double max_client_ratio(double beta, double s_beta, double s_alpha) {
    if (beta == 0.0) throw std::domain_error("client-ratio bound is unbounded for beta = 0");
    if (s_beta <= 0.0) throw ValidationError("s_beta must be positive");
    return mixture_mean(beta, s_beta, s_alpha) / (beta * s_beta);
}

WinWinReport win_win_check(const AnalyticInputs& in, EpsilonTerm eps) {
    WinWinReport r;
    const double s = mixture_mean(in.beta, in.s_beta, in.s_alpha);
    r.w_pure = mg1_wait(in.lambda_total, s, in.sigma_s);
    r.w_hybrid = hybrid_wait(in, eps).overall;
    if (in.beta > 0.0) {
        r.c_star = max_client_ratio(in.beta, in.s_beta, in.s_alpha);
        r.within_bound = in.c_ratio <= *r.c_star;
    } else {
        r.within_bound = true;
    }
    r.strict_improvement = r.w_hybrid < r.w_pure;
    return r;
}

std::vector<std::string> validate(const AnalyticInputs& in) {
    auto need = [](bool ok, const char* what) {
        if (!ok) throw ValidationError(what);
    };
    need(std::isfinite(in.lambda_total) && in.lambda_total >= 0.0, "lambda must be >= 0");
    need(std::isfinite(in.c_ratio) && in.c_ratio > 0.0, "c must be > 0");
    need(in.beta >= 0.0 && in.beta <= 1.0, "beta (1 - alpha) must lie in [0, 1]");
    need(in.s_alpha >= 0.0 && in.s_beta >= 0.0, "service times must be >= 0");
    need(in.sigma_s_beta >= 0.0 && in.sigma_s >= 0.0, "standard deviations must be >= 0");
    need(in.epsilon >= 0.0, "epsilon must be >= 0");

    std::vector<std::string> warnings;
    if (in.beta > 0.0 && in.beta < 1.0 && !(in.sigma_s_beta < in.sigma_s)) {
        warnings.emplace_back(
            "sigma_s_beta >= sigma_s: the win-win guarantee assumes hard-question service "
            "times vary less than the overall mixture");
    }
    return warnings;
}

AnalyticReport evaluate(const AnalyticInputs& in, EpsilonTerm eps) {
    AnalyticReport r;
    r.warnings = validate(in);
    r.s_mix = mixture_mean(in.beta, in.s_beta, in.s_alpha);
    r.tau = r.s_mix > 0.0 ? in.s_beta / r.s_mix : 0.0;
    r.rho = in.lambda_total * r.s_mix;
    r.rho_hat = in.c_ratio * in.beta * in.lambda_total * in.s_beta;
    r.stable_pure = r.rho < 1.0;
    r.stable_hybrid = r.rho_hat < 1.0;
    if (r.stable_pure) r.w_pure = mg1_wait(in.lambda_total, r.s_mix, in.sigma_s);
    if (r.stable_hybrid) {
        const HybridWait hw = hybrid_wait(in, eps);
        r.w_hybrid = hw.overall;
        r.w_hybrid_hard = hw.hard;
    }
    if (in.beta > 0.0 && in.s_beta > 0.0) {
        r.c_star = max_client_ratio(in.beta, in.s_beta, in.s_alpha);
    }
    return r;
}

}  // namespace hybridq::analytic
