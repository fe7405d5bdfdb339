#pragma once

// Seeded random variates for the service-center simulator.
//
// Every stream is a std::mt19937_64 (its 10000th output from the default
// seed 5489 is 9981545732273789042, fixed by the C++ standard). Seeds for
// named streams and replications are derived with SplitMix64, and all
// variate transforms below are written out explicitly rather than taken
// from <random>'s distribution classes, whose algorithms are not
// standardized. Together this makes traces reproducible across compilers.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hybridq {

/// One SplitMix64 step; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Child seed number `index` of `master`. Distinct indices give distinct,
/// decorrelated seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Exponential with the given mean (inverse CDF).
    double exponential(double mean);
    /// Standard normal (Box-Muller, one output per two uniforms).
    double standard_normal();

private:
    std::mt19937_64 engine_;
};

enum class StreamId : std::size_t {
    arrivals,
    question_type,
    agent_service,
    classification,
    human_service,
    learning_catalog,
};
inline constexpr std::size_t kStreamCount = 6;

/// The named per-purpose streams of a single run. Each stream is seeded
/// independently from the master seed, so draws on one never shift another.
class RngStreams {
public:
    explicit RngStreams(std::uint64_t master_seed);

    RngStream& operator[](StreamId id) { return streams_[static_cast<std::size_t>(id)]; }
    std::uint64_t master_seed() const { return master_; }

private:
    std::uint64_t master_;
    std::array<RngStream, kStreamCount> streams_;
};

/// A non-negative time distribution (minutes).
class Distribution {
public:
    enum class Kind { deterministic, exponential, truncated_normal, empirical };

    Distribution() = default;  // deterministic(0)

    static Distribution deterministic(double value);
    static Distribution exponential(double mean);
    /// Normal(mean, stddev) conditioned on being >= 0; sampled by rejection.
    static Distribution truncated_normal(double mean, double stddev);
    /// Resamples uniformly from the given non-negative observations.
    static Distribution empirical(std::vector<double> samples);

    Kind kind() const { return kind_; }
    /// Location parameter as written in the config (not truncation-corrected).
    double mean() const { return mean_; }
    double stddev() const { return stddev_; }
    std::span<const double> samples() const { return samples_; }

    /// Moments of what sample() actually produces.
    double effective_mean() const { return eff_mean_; }
    double effective_stddev() const { return eff_stddev_; }

    double sample(RngStream& rng) const;

    /// Short human-readable form, e.g. "N(5,1)".
    std::string describe() const;

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    Kind kind_ = Kind::deterministic;
    double mean_ = 0.0;
    double stddev_ = 0.0;
    std::vector<double> samples_;
    double eff_mean_ = 0.0;
    double eff_stddev_ = 0.0;
};

const char* to_string(Distribution::Kind kind);

inline double sample(const Distribution& dist, RngStream& rng) { return dist.sample(rng); }

/// Arrival times of a Poisson process on [0, horizon), strictly increasing.
std::vector<double> poisson_process(double rate, double horizon, RngStream& rng);

enum class QuestionType { alpha, beta };

/// alpha-question with probability `alpha`.
QuestionType bernoulli_type(double alpha, RngStream& rng);

/// Inverse-CDF sampler over a finite catalog of question types.
class CatalogSampler {
public:
    static CatalogSampler uniform(int size);
    static CatalogSampler zipf(int size, double exponent);

    int size() const { return static_cast<int>(cdf_.size()); }
    double probability(int type_id) const;
    int sample(RngStream& rng) const;

private:
    std::vector<double> cdf_;
};

}  // namespace hybridq
