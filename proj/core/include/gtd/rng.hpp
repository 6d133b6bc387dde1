#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gtd/errors.hpp"

namespace gtd {

/// Seedable xoshiro256** generator with derivable substreams.
///
/// Every stochastic component in the library draws from this generator so
/// that a (seed, stream) pair reproduces a run bit-for-bit on any platform;
/// the standard-library distributions are avoided on purpose because their
/// output is implementation-defined. Substreams for parallel runs are
/// derived by mixing the run id into the seed, so run k of an experiment
/// never shares state with run k+1.
class Rng {
  public:
    static constexpr const char* kVersion = "xoshiro256ss-1";

    explicit Rng(std::uint64_t seed) { reseed(seed); }

    /// Independent generator for substream `stream_id` of `seed`.
    static Rng substream(std::uint64_t seed, std::uint64_t stream_id) {
        return Rng(mix(seed, stream_id));
    }

    void reseed(std::uint64_t seed) {
        // splitmix64 expansion of the 64-bit seed into the 256-bit state.
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix(x);
        cached_normal_valid_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (deterministic, caches the pair).
    double normal() {
        if (cached_normal_valid_) {
            cached_normal_valid_ = false;
            return cached_normal_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        cached_normal_ = radius * std::sin(angle);
        cached_normal_valid_ = true;
        return radius * std::cos(angle);
    }

    /// Index sampled from an unnormalized weight vector by inverse CDF.
    int discrete(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) throw InvalidDistribution("discrete: weights sum to zero");
        const double u = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    static std::uint64_t splitmix(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t x = seed;
        std::uint64_t a = splitmix(x);
        x ^= stream_id * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL;
        std::uint64_t b = splitmix(x);
        return a ^ rotl(b, 23);
    }

    std::uint64_t state_[4] = {};
    double cached_normal_ = 0.0;
    bool cached_normal_valid_ = false;
};

/// Precomputed CDF for repeated draws from one distribution.
class DiscreteSampler {
  public:
    explicit DiscreteSampler(std::span<const double> probs) : cdf_(probs.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            cdf_[i] = acc;
        }
        if (acc <= 0.0) throw InvalidDistribution("DiscreteSampler: zero mass");
        total_ = acc;
    }

    int operator()(Rng& rng) const {
        const double u = rng.uniform01() * total_;
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        const auto idx = static_cast<std::size_t>(it - cdf_.begin());
        return static_cast<int>(idx < cdf_.size() ? idx : cdf_.size() - 1);
    }

  private:
    std::vector<double> cdf_;
    double total_ = 0.0;
};

} // namespace gtd
