#include "gtd/features.hpp"

#include <cmath>

namespace gtd {

FeatureMap::FeatureMap(Matrix rows, double bound, std::string name, std::vector<std::string> labels)
    : rows_(std::move(rows)), bound_(bound), name_(std::move(name)), labels_(std::move(labels)) {
    if (!rows_.allFinite()) throw OutOfRange("FeatureMap " + name_ + ": non-finite entry");
    const double max_abs = rows_.cwiseAbs().maxCoeff();
    if (max_abs > bound_ + 1e-12)
        throw OutOfRange("FeatureMap " + name_ + ": entry " + std::to_string(max_abs) +
                         " exceeds declared bound " + std::to_string(bound_));
    if (!labels_.empty() && static_cast<int>(labels_.size()) != dim())
        throw DimensionMismatch("FeatureMap " + name_ + ": label count != dim");
}

Vector FeatureMap::featurize(int s) const {
    if (s < 0 || s >= n_states())
        throw OutOfRange("FeatureMap " + name_ + ": state " + std::to_string(s) + " out of range");
    return rows_.row(s).transpose();
}

FeatureMap FeatureMap::tabular(int n_states) {
    return FeatureMap(Matrix::Identity(n_states, n_states), 1.0, "tabular");
}

FeatureMap FeatureMap::constant(int n_states) {
    return FeatureMap(Matrix::Ones(n_states, 1), 1.0, "constant");
}

Matrix feature_matrix(const FeatureMap& map, const FiniteMdp& mdp) {
    if (map.n_states() != mdp.n_states())
        throw DimensionMismatch("feature_matrix: map covers " + std::to_string(map.n_states()) +
                                " states, MDP has " + std::to_string(mdp.n_states()));
    return map.matrix();
}

Matrix bebf_expand(const FiniteMdp& mdp, const Policy& policy, const Matrix& current, int k,
                   const Vector& xi) {
    validate_distribution(xi, 1e-9, "bebf_expand xi");
    const Vector v_true = true_values(mdp, policy);
    const Matrix p = mdp.induced_transition(policy);
    const Vector r = mdp.induced_reward(policy);
    const auto weighted_dot = [&xi](const Vector& a, const Vector& b) {
        return (a.array() * xi.array() * b.array()).sum();
    };

    Matrix phi = current;
    for (int added = 0; added < k; ++added) {
        // xi-weighted least-squares fit of the true value function.
        const Matrix gram = phi.transpose() * xi.asDiagonal() * phi;
        const Vector rhs = phi.transpose() * (xi.asDiagonal() * v_true);
        const Vector coeffs = gram.ldlt().solve(rhs);
        const Vector fit = phi * coeffs;

        Vector residual = r + mdp.gamma() * (p * fit) - fit;
        // Orthogonalize against every existing column (modified Gram-Schmidt).
        for (Eigen::Index j = 0; j < phi.cols(); ++j) {
            const Vector col = phi.col(j);
            const double denom = weighted_dot(col, col);
            if (denom > 0.0) residual -= (weighted_dot(residual, col) / denom) * col;
        }
        const double norm = std::sqrt(std::max(0.0, weighted_dot(residual, residual)));
        if (norm < 1e-10)
            throw DegenerateResidual("bebf_expand: residual degenerate after " + std::to_string(added) +
                                         " of " + std::to_string(k) + " columns",
                                     phi, added);
        phi.conservativeResize(Eigen::NoChange, phi.cols() + 1);
        phi.col(phi.cols() - 1) = residual / norm;
    }
    return phi;
}

StateActionFeatures::StateActionFeatures(Matrix rows, int n_states, int n_actions,
                                         std::vector<bool> feasible, std::string name)
    : rows_(std::move(rows)), n_states_(n_states), n_actions_(n_actions),
      feasible_(std::move(feasible)), name_(std::move(name)) {
    const auto expected = static_cast<std::size_t>(n_states_) * static_cast<std::size_t>(n_actions_);
    if (static_cast<std::size_t>(rows_.rows()) != expected || feasible_.size() != expected)
        throw DimensionMismatch("StateActionFeatures " + name_ + ": row/mask count mismatch");
}

std::size_t StateActionFeatures::index(int s, int a) const {
    if (s < 0 || s >= n_states_ || a < 0 || a >= n_actions_)
        throw OutOfRange("StateActionFeatures " + name_ + ": (s, a) out of range");
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(n_actions_) + static_cast<std::size_t>(a);
}

} // namespace gtd
