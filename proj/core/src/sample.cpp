#include "gtd/sample.hpp"

#include <cstdio>
#include <ostream>

namespace gtd {

namespace {

void append_csv_value(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
}

Sample make_sample(const FiniteMdp& mdp, const Policy& target, const Policy& behavior,
                   const FeatureMap& features, int s, int a, int next, double bias_epsilon, Rng& rng) {
    Sample sample;
    sample.state = s;
    sample.action = a;
    sample.next_state = next;
    sample.phi = features.featurize(s);
    sample.phi_next = features.featurize(next);
    sample.reward = mdp.reward(s, a);
    sample.rho = biased_weight(importance_weight(target, behavior, s, a), bias_epsilon, rng);
    return sample;
}

} // namespace

double biased_weight(double rho, double epsilon, Rng& rng) {
    if (epsilon < 0.0) throw OutOfRange("biased_weight: epsilon must be nonnegative");
    if (epsilon == 0.0) return rho;
    const double noise = rng.uniform(-epsilon / 2.0, epsilon / 2.0);
    return std::max(0.0, rho + epsilon + noise);
}

SampleStream sample_iid(const FiniteMdp& mdp, const Policy& target, const Policy& behavior,
                        const Vector& xi, const FeatureMap& features, long n, std::uint64_t seed,
                        const SamplerOptions& opts) {
    validate_distribution(xi, 1e-9, "sample_iid xi");
    if (n < 1) throw OutOfRange("sample_iid: n must be >= 1");
    Rng rng(seed);
    const std::vector<double> xi_vec(xi.data(), xi.data() + xi.size());
    const DiscreteSampler draw_state(xi_vec);

    SampleStream stream;
    stream.mode = SampleMode::iid;
    stream.seed = seed;
    stream.samples.reserve(static_cast<std::size_t>(n));
    std::vector<double> row(static_cast<std::size_t>(mdp.n_states()));
    std::vector<double> action_row(static_cast<std::size_t>(mdp.n_actions()));
    for (long i = 0; i < n; ++i) {
        const int s = draw_state(rng);
        for (int a = 0; a < mdp.n_actions(); ++a) action_row[static_cast<std::size_t>(a)] = behavior.prob(s, a);
        const int a = rng.discrete(action_row);
        for (int next = 0; next < mdp.n_states(); ++next) row[static_cast<std::size_t>(next)] = mdp.transition(s, a, next);
        const int next = rng.discrete(row);
        stream.samples.push_back(make_sample(mdp, target, behavior, features, s, a, next, opts.bias_epsilon, rng));
    }
    return stream;
}

SampleStream sample_trajectory(const FiniteMdp& mdp, const Policy& target, const Policy& behavior,
                               const FeatureMap& features, int start_state, long n, std::uint64_t seed,
                               const SamplerOptions& opts) {
    if (n < 1) throw OutOfRange("sample_trajectory: n must be >= 1");
    if (start_state < 0 || start_state >= mdp.n_states())
        throw OutOfRange("sample_trajectory: start state out of range");
    Rng rng(seed);
    SampleStream stream;
    stream.mode = SampleMode::trajectory;
    stream.seed = seed;
    stream.samples.reserve(static_cast<std::size_t>(n));
    std::vector<double> row(static_cast<std::size_t>(mdp.n_states()));
    std::vector<double> action_row(static_cast<std::size_t>(mdp.n_actions()));
    int s = start_state;
    for (long i = 0; i < n; ++i) {
        for (int a = 0; a < mdp.n_actions(); ++a) action_row[static_cast<std::size_t>(a)] = behavior.prob(s, a);
        const int a = rng.discrete(action_row);
        for (int next = 0; next < mdp.n_states(); ++next) row[static_cast<std::size_t>(next)] = mdp.transition(s, a, next);
        const int next = rng.discrete(row);
        stream.samples.push_back(make_sample(mdp, target, behavior, features, s, a, next, opts.bias_epsilon, rng));
        s = next;
    }
    return stream;
}

void write_csv(const SampleStream& stream, std::ostream& out) {
    if (stream.samples.empty()) return;
    const auto d = stream.samples.front().phi.size();
    std::string header;
    for (Eigen::Index i = 0; i < d; ++i) header += "phi" + std::to_string(i) + ",";
    header += "r,";
    for (Eigen::Index i = 0; i < d; ++i) header += "phi_next" + std::to_string(i) + ",";
    header += "rho";
    out << header << '\n';
    for (const Sample& s : stream.samples) {
        std::string line;
        for (Eigen::Index i = 0; i < d; ++i) {
            append_csv_value(line, s.phi(i));
            line += ',';
        }
        append_csv_value(line, s.reward);
        line += ',';
        for (Eigen::Index i = 0; i < d; ++i) {
            append_csv_value(line, s.phi_next(i));
            line += ',';
        }
        append_csv_value(line, s.rho);
        out << line << '\n';
    }
}

} // namespace gtd
