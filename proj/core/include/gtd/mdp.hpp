#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gtd/errors.hpp"

namespace gtd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kProbTol = 1e-12;

/// Stationary stochastic policy over a finite state/action space.
/// Rows of the probability matrix must sum to one within 1e-12.
class Policy {
  public:
    explicit Policy(Matrix probs);

    int n_states() const { return static_cast<int>(probs_.rows()); }
    int n_actions() const { return static_cast<int>(probs_.cols()); }
    double prob(int s, int a) const { return probs_(s, a); }
    const Matrix& probs() const { return probs_; }

    static Policy uniform(int n_states, int n_actions);
    /// Deterministic policy taking action[s] in state s.
    static Policy deterministic(int n_states, int n_actions, const std::vector<int>& action);

  private:
    Matrix probs_;
};

/// Finite MDP held as dense tensors: one |S| x |S| transition matrix per
/// action, an |S| x |A| reward table, and a discount in [0, 1).
class FiniteMdp {
  public:
    FiniteMdp(std::vector<Matrix> transition, Matrix reward, double gamma);

    int n_states() const { return n_states_; }
    int n_actions() const { return n_actions_; }
    double gamma() const { return gamma_; }
    double r_max() const { return r_max_; }
    double transition(int s, int a, int next) const { return transition_[static_cast<std::size_t>(a)](s, next); }
    const Matrix& transition_matrix(int a) const { return transition_[static_cast<std::size_t>(a)]; }
    double reward(int s, int a) const { return reward_(s, a); }
    const Matrix& rewards() const { return reward_; }

    /// State-to-state kernel of the Markov chain induced by `policy`.
    Matrix induced_transition(const Policy& policy) const;
    /// Expected one-step reward under `policy`.
    Vector induced_reward(const Policy& policy) const;

    std::string to_json() const;
    static FiniteMdp from_json(const std::string& text);
    void save(const std::string& path) const;
    static FiniteMdp load(const std::string& path);

  private:
    int n_states_ = 0;
    int n_actions_ = 0;
    std::vector<Matrix> transition_; // transition_[a](s, s')
    Matrix reward_;                  // reward_(s, a)
    double gamma_ = 0.0;
    double r_max_ = 0.0;
};

/// Importance weight pi(a|s) / pi_b(a|s). Zero-probability behavior actions
/// are invalid samples and raise BehaviorZero; a zero-probability target
/// action gives weight zero.
double importance_weight(const Policy& target, const Policy& behavior, int s, int a);

/// Largest importance weight over pairs with positive behavior probability.
double rho_max(const Policy& target, const Policy& behavior);

/// Stationary distribution of the chain induced by `policy`, by power
/// iteration to the requested residual. Throws NotConverged for chains that
/// fail to mix within the iteration cap.
Vector stationary_distribution(const FiniteMdp& mdp, const Policy& policy, double tol = 1e-12,
                               long max_iter = 1000000);

/// Exact value function of `policy`: the solution of (I - gamma P) V = R.
Vector true_values(const FiniteMdp& mdp, const Policy& policy);

/// Greedy policy and optimal values from dense value iteration.
struct ValueIterationResult {
    Vector values;
    std::vector<int> greedy_action;
};
ValueIterationResult value_iteration(const FiniteMdp& mdp, double tol = 1e-12, long max_iter = 1000000);

void validate_distribution(const Vector& xi, double tol, const std::string& what);

} // namespace gtd
