#include "hybridq/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hybridq/errors.hpp"

namespace hybridq {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t state = master;
    const std::uint64_t a = splitmix64(state);
    state = a ^ (index * 0xD1B54A32D192ED03ULL);
    return splitmix64(state);
}

double RngStream::exponential(double mean) {
    // 1 - u lies in (0, 1], so the log is finite.
    return -mean * std::log(1.0 - uniform());
}

double RngStream::standard_normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngStreams::RngStreams(std::uint64_t master_seed) : master_(master_seed) {
    for (std::size_t i = 0; i < kStreamCount; ++i) {
        streams_[i] = RngStream(derive_seed(master_seed, 0x5EED0000ULL + i));
    }
}

// --- Distribution -----------------------------------------------------------

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace

Distribution Distribution::deterministic(double value) {
    require(std::isfinite(value) && value >= 0.0, "deterministic value must be >= 0");
    Distribution d;
    d.kind_ = Kind::deterministic;
    d.mean_ = d.eff_mean_ = value;
    return d;
}

Distribution Distribution::exponential(double mean) {
    require(std::isfinite(mean) && mean >= 0.0, "exponential mean must be >= 0");
    Distribution d;
    d.kind_ = Kind::exponential;
    d.mean_ = d.eff_mean_ = mean;
    d.stddev_ = d.eff_stddev_ = mean;
    return d;
}

Distribution Distribution::truncated_normal(double mean, double stddev) {
    require(std::isfinite(mean) && std::isfinite(stddev), "normal parameters must be finite");
    require(stddev >= 0.0, "normal stddev must be >= 0");
    Distribution d;
    d.kind_ = Kind::truncated_normal;
    d.mean_ = mean;
    d.stddev_ = stddev;
    if (stddev == 0.0) {
        require(mean >= 0.0, "a zero-variance normal needs mean >= 0");
        d.eff_mean_ = mean;
        return d;
    }
    // Moments of N(mean, stddev) conditioned on X >= 0.
    const double a = -mean / stddev;
    const double tail = normal_sf(a);
    require(tail > 1e-12, "normal mass above zero is negligible; rejection sampling would stall");
    const double hazard = normal_pdf(a) / tail;
    d.eff_mean_ = mean + stddev * hazard;
    const double var = stddev * stddev * (1.0 + a * hazard - hazard * hazard);
    d.eff_stddev_ = std::sqrt(std::max(0.0, var));
    return d;
}

Distribution Distribution::empirical(std::vector<double> samples) {
    require(!samples.empty(), "empirical distribution needs at least one sample");
    for (double x : samples) require(std::isfinite(x) && x >= 0.0, "empirical samples must be >= 0");
    Distribution d;
    d.kind_ = Kind::empirical;
    const double n = static_cast<double>(samples.size());
    const double m = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : samples) ss += (x - m) * (x - m);
    d.mean_ = d.eff_mean_ = m;
    d.stddev_ = d.eff_stddev_ = std::sqrt(ss / n);
    d.samples_ = std::move(samples);
    return d;
}

double Distribution::sample(RngStream& rng) const {
    switch (kind_) {
        case Kind::deterministic:
            return mean_;
        case Kind::exponential:
            return rng.exponential(mean_);
        case Kind::truncated_normal: {
            if (stddev_ == 0.0) return mean_;
            for (;;) {
                const double x = mean_ + stddev_ * rng.standard_normal();
                if (x >= 0.0) return x;
            }
        }
        case Kind::empirical: {
            const auto i = static_cast<std::size_t>(rng.uniform() * samples_.size());
            return samples_[std::min(i, samples_.size() - 1)];
        }
    }
    return mean_;
}

std::string Distribution::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::deterministic: os << "D(" << mean_ << ")"; break;
        case Kind::exponential: os << "Exp(" << mean_ << ")"; break;
        case Kind::truncated_normal: os << "N(" << mean_ << "," << stddev_ << ")"; break;
        case Kind::empirical: os << "Emp(n=" << samples_.size() << ")"; break;
    }
    return os.str();
}

const char* to_string(Distribution::Kind kind) {
    switch (kind) {
        case Distribution::Kind::deterministic: return "deterministic";
        case Distribution::Kind::exponential: return "exponential";
        case Distribution::Kind::truncated_normal: return "normal";
        case Distribution::Kind::empirical: return "empirical";
    }
    return "?";
}

// --- processes --------------------------------------------------------------

std::vector<double> poisson_process(double rate, double horizon, RngStream& rng) {
    std::vector<double> times;
    if (rate <= 0.0) return times;
    const double mean_gap = 1.0 / rate;
    double t = rng.exponential(mean_gap);
    while (t < horizon) {
        // A zero gap is possible only at u == 0 exactly; keep times strictly increasing.
        if (times.empty() || t > times.back()) times.push_back(t);
        t += rng.exponential(mean_gap);
    }
    return times;
}

QuestionType bernoulli_type(double alpha, RngStream& rng) {
    return rng.uniform() < alpha ? QuestionType::alpha : QuestionType::beta;
}

CatalogSampler CatalogSampler::uniform(int size) { return zipf(size, 0.0); }

CatalogSampler CatalogSampler::zipf(int size, double exponent) {
    require(size >= 1, "catalog_size must be >= 1");
    require(std::isfinite(exponent) && exponent >= 0.0, "zipf exponent must be >= 0");
    CatalogSampler s;
    s.cdf_.resize(static_cast<std::size_t>(size));
    double acc = 0.0;
    for (int k = 0; k < size; ++k) {
        acc += std::pow(static_cast<double>(k + 1), -exponent);
        s.cdf_[static_cast<std::size_t>(k)] = acc;
    }
    for (double& c : s.cdf_) c /= acc;
    s.cdf_.back() = 1.0;
    return s;
}

double CatalogSampler::probability(int type_id) const {
    const auto i = static_cast<std::size_t>(type_id);
    return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
}

int CatalogSampler::sample(RngStream& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                                     static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
}

}  // namespace hybridq
