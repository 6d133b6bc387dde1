#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gtd/features.hpp"
#include "gtd/mdp.hpp"
#include "gtd/rng.hpp"

namespace gtd {

/// One logged transition: the unit of every stochastic update.
struct Sample {
    Vector phi;
    Vector phi_next;
    double reward = 0.0;
    double rho = 0.0;
    // Provenance indices; -1 for samples built directly from vectors.
    int state = -1;
    int action = -1;
    int next_state = -1;
};

enum class SampleMode { iid, trajectory };

struct SampleStream {
    SampleMode mode = SampleMode::iid;
    std::uint64_t seed = 0;
    std::vector<Sample> samples;
};

struct SamplerOptions {
    /// Bias added to every importance weight (Section on inexact weights);
    /// zero leaves the stream bit-identical to unbiased sampling.
    double bias_epsilon = 0.0;
};

/// Perturbed importance weight with mean shift epsilon: rho + epsilon plus
/// uniform noise on [-epsilon/2, epsilon/2], clamped at zero. epsilon = 0
/// returns rho without consuming randomness.
double biased_weight(double rho, double epsilon, Rng& rng);

/// n transitions with s ~ xi, a ~ behavior, s' ~ P, visited i.i.d.;
/// importance weights are taken against `target`.
SampleStream sample_iid(const FiniteMdp& mdp, const Policy& target, const Policy& behavior,
                        const Vector& xi, const FeatureMap& features, long n, std::uint64_t seed,
                        const SamplerOptions& opts = {});

/// n transitions along a single trajectory started at `start_state`.
SampleStream sample_trajectory(const FiniteMdp& mdp, const Policy& target, const Policy& behavior,
                               const FeatureMap& features, int start_state, long n, std::uint64_t seed,
                               const SamplerOptions& opts = {});

/// CSV columns: phi[0..d), r, phi_next[0..d), rho.
void write_csv(const SampleStream& stream, std::ostream& out);

} // namespace gtd
