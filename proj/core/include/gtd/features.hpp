#pragma once

#include <string>
#include <vector>

#include "gtd/mdp.hpp"

namespace gtd {

/// Feature map over a finite state space, held as a dense |S| x d matrix
/// (row s is phi(s)'). The declared entry bound L is validated against
/// every state at construction.
class FeatureMap {
  public:
    FeatureMap(Matrix rows, double bound, std::string name, std::vector<std::string> column_labels = {});

    int dim() const { return static_cast<int>(rows_.cols()); }
    int n_states() const { return static_cast<int>(rows_.rows()); }
    double bound() const { return bound_; }
    const std::string& name() const { return name_; }
    const std::vector<std::string>& column_labels() const { return labels_; }

    Vector featurize(int s) const;
    Vector operator()(int s) const { return featurize(s); }
    const Matrix& matrix() const { return rows_; }

    /// One-hot indicator basis (the feature matrix is the identity).
    static FeatureMap tabular(int n_states);
    /// Single constant column 1/sqrt(d) ... here d = 1, so all-ones.
    static FeatureMap constant(int n_states);

  private:
    Matrix rows_;
    double bound_;
    std::string name_;
    std::vector<std::string> labels_;
};

/// The |S| x d matrix whose row s is featurize(map, s).
Matrix feature_matrix(const FeatureMap& map, const FiniteMdp& mdp);

/// Raised by bebf_expand when the Bellman residual of the current fit is
/// numerically zero before the requested number of columns was added; the
/// value function is then exactly representable in the partial basis.
struct DegenerateResidual : Error {
    DegenerateResidual(std::string msg, Matrix partial_matrix, int added)
        : Error(std::move(msg)), partial(std::move(partial_matrix)), columns_added(added) {}
    Matrix partial;
    int columns_added;
};

/// Grows `k` Bellman-error basis columns. Each new column is the Bellman
/// residual T v - v of the xi-weighted least-squares fit of the true value
/// function on the current columns, xi-orthogonalized against all existing
/// columns and normalized to unit xi-norm. Stops with DegenerateResidual
/// (carrying the partial matrix) once the residual norm falls below 1e-10.
Matrix bebf_expand(const FiniteMdp& mdp, const Policy& policy, const Matrix& current, int k,
                   const Vector& xi);

/// State-action features for control learning, stored densely with row
/// s * n_actions + a. Infeasible pairs carry a zero row and a mask bit.
class StateActionFeatures {
  public:
    StateActionFeatures(Matrix rows, int n_states, int n_actions, std::vector<bool> feasible,
                        std::string name);

    int dim() const { return static_cast<int>(rows_.cols()); }
    int n_states() const { return n_states_; }
    int n_actions() const { return n_actions_; }
    const std::string& name() const { return name_; }
    bool feasible(int s, int a) const { return feasible_[index(s, a)]; }
    Vector featurize(int s, int a) const { return rows_.row(static_cast<Eigen::Index>(index(s, a))).transpose(); }
    const Matrix& matrix() const { return rows_; }

  private:
    std::size_t index(int s, int a) const;

    Matrix rows_;
    int n_states_;
    int n_actions_;
    std::vector<bool> feasible_;
    std::string name_;
};

} // namespace gtd
