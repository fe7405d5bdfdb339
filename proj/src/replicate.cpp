#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "hybridq/errors.hpp"
#include "hybridq/simulator.hpp"

namespace hybridq {

Estimate estimate(std::span<const double> values) {
    Estimate e;
    double sum = 0.0;
    for (double v : values) {
        if (std::isfinite(v)) {
            sum += v;
            ++e.n;
        }
    }
    if (e.n == 0) {
        e.mean = e.half_width = std::numeric_limits<double>::quiet_NaN();
        return e;
    }
    e.mean = sum / e.n;
    if (e.n < 2) {
        e.half_width = std::numeric_limits<double>::quiet_NaN();
        return e;
    }
    double ss = 0.0;
    for (double v : values) {
        if (std::isfinite(v)) ss += (v - e.mean) * (v - e.mean);
    }
    const double sd = std::sqrt(ss / (e.n - 1));
    const boost::math::students_t t(e.n - 1);
    e.half_width = boost::math::quantile(t, 0.975) * sd / std::sqrt(static_cast<double>(e.n));
    return e;
}

std::uint64_t replication_seed(std::uint64_t master_seed, int index) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(index));
}

ReplicatedMetrics replicate(const SystemConfig& config, int n_reps, std::uint64_t master_seed) {
    if (n_reps < 2) throw ValidationError("replication count must be >= 2");
    config.validate();

    std::vector<std::optional<SimulationMetrics>> results(static_cast<std::size_t>(n_reps));
    std::vector<std::exception_ptr> failures(results.size());
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n_reps; i = next++) {
            try {
                results[i] = run(config, replication_seed(master_seed, i),
                                 RunOptions{.keep_trace = false})
                                 .metrics;
            } catch (const OverloadError&) {
                // Leaves results[i] empty: the aggregate is flagged unstable.
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const unsigned n_threads =
        std::max(1u, std::min(std::thread::hardware_concurrency(), static_cast<unsigned>(n_reps)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    ReplicatedMetrics agg;
    agg.n_reps = n_reps;
    std::vector<double> overall, hard, alpha, util, share;
    for (int i = 0; i < n_reps; ++i) {
        agg.seeds.push_back(replication_seed(master_seed, i));
        const auto& r = results[static_cast<std::size_t>(i)];
        if (!r) {
            agg.unstable = true;
            continue;
        }
        overall.push_back(r->mean_wait_overall);
        hard.push_back(r->mean_wait_hard);
        alpha.push_back(r->mean_response_alpha);
        util.push_back(r->operator_utilization);
        share.push_back(r->agent_share);
        agg.questions_total += r->questions_total;
        agg.answered_by_agent += r->answered_by_agent;
        agg.answered_by_human += r->answered_by_human;
        agg.replications.push_back(*r);
    }
    agg.mean_wait_overall = estimate(overall);
    agg.mean_wait_hard = estimate(hard);
    agg.mean_response_alpha = estimate(alpha);
    agg.operator_utilization = estimate(util);
    agg.agent_share = estimate(share);
    return agg;
}

}  // namespace hybridq
