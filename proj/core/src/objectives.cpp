#include "gtd/objectives.hpp"

#include <cmath>

#include "gtd/rng.hpp"

namespace gtd {

namespace {

constexpr double kEigTol = 1e-12;   // absolute eigenvalue cutoff for rank decisions
constexpr double kRangeTol = 1e-8;  // relative tolerance for the range membership check

Vector random_in_ball(int dim, double radius, Rng& rng) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = rng.normal();
    const double norm = v.norm();
    if (norm == 0.0) return Vector::Zero(dim);
    const double shell = std::pow(rng.uniform01(), 1.0 / dim);
    return v * (radius * shell / norm);
}

} // namespace

Vector ExactQuantities::m_apply(MMode mode, const Vector& v) const {
    return mode == MMode::identity ? v : Vector(c * v);
}

Vector ExactQuantities::m_pinv_apply(MMode mode, const Vector& v) const {
    if (mode == MMode::identity) return v;
    const Vector coeffs = c_eigenvectors.transpose() * v;
    const double scale = std::max(1.0, v.norm());
    Vector solved = Vector::Zero(v.size());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        if (c_eigenvalues(i) > kEigTol) {
            solved(i) = coeffs(i) / c_eigenvalues(i);
        } else if (std::abs(coeffs(i)) > kRangeTol * scale) {
            throw SingularC("m_pinv_apply: vector has a component outside range(C)");
        }
    }
    return c_eigenvectors * solved;
}

double ExactQuantities::m_inv_quad(MMode mode, const Vector& v) const {
    if (mode == MMode::identity) return v.squaredNorm();
    const Vector coeffs = c_eigenvectors.transpose() * v;
    const double scale = std::max(1.0, v.norm());
    double quad = 0.0;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        if (c_eigenvalues(i) > kEigTol) {
            quad += coeffs(i) * coeffs(i) / c_eigenvalues(i);
        } else if (std::abs(coeffs(i)) > kRangeTol * scale) {
            throw SingularC("m_inv_quad: vector has a component outside range(C)");
        }
    }
    return quad;
}

ExactQuantities exact_quantities(const FiniteMdp& mdp, const Policy& target, const Policy& behavior,
                                 const Vector& xi, const Matrix& phi) {
    validate_distribution(xi, 1e-9, "exact_quantities xi");
    const int n = mdp.n_states();
    const int d = static_cast<int>(phi.cols());
    if (static_cast<int>(phi.rows()) != n)
        throw DimensionMismatch("exact_quantities: feature matrix rows != states");

    ExactQuantities q;
    q.phi = phi;
    q.xi = xi;
    q.gamma = mdp.gamma();
    q.p_target = mdp.induced_transition(target);
    q.r_target = mdp.induced_reward(target);

    q.a = Matrix::Zero(d, d);
    q.b = Vector::Zero(d);
    for (int s = 0; s < n; ++s) {
        if (xi(s) <= 0.0) continue;
        const Vector phi_s = phi.row(s).transpose();
        for (int act = 0; act < mdp.n_actions(); ++act) {
            const double weight = xi(s) * behavior.prob(s, act);
            if (weight <= 0.0) continue;
            const double rho = importance_weight(target, behavior, s, act);
            if (rho == 0.0) continue;
            const Vector phi_next_mean = phi.transpose() * mdp.transition_matrix(act).row(s).transpose();
            q.a.noalias() += weight * rho * phi_s * (phi_s - mdp.gamma() * phi_next_mean).transpose();
            q.b.noalias() += weight * rho * mdp.reward(s, act) * phi_s;
        }
    }
    q.c = phi.transpose() * xi.asDiagonal() * phi;
    q.c = 0.5 * (q.c + q.c.transpose()); // enforce exact symmetry

    const Eigen::SelfAdjointEigenSolver<Matrix> eig(q.c);
    q.c_eigenvalues = eig.eigenvalues();
    q.c_eigenvectors = eig.eigenvectors();
    q.nu = std::max(0.0, q.c_eigenvalues.minCoeff());
    q.tau_c = std::max(0.0, q.c_eigenvalues.maxCoeff());
    q.rank_c = 0;
    for (Eigen::Index i = 0; i < q.c_eigenvalues.size(); ++i)
        if (q.c_eigenvalues(i) > kEigTol) ++q.rank_c;
    if (q.rank_c == 0) throw SingularC("exact_quantities: covariance has rank zero");
    q.xi_max = xi.maxCoeff();

    // Pseudo-inverse projection Phi (Phi' Xi Phi)^+ Phi' Xi; identical to the
    // plain inverse whenever C is nonsingular.
    Matrix c_pinv = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < q.c_eigenvalues.size(); ++i)
        if (q.c_eigenvalues(i) > kEigTol)
            c_pinv.noalias() +=
                q.c_eigenvectors.col(i) * q.c_eigenvectors.col(i).transpose() / q.c_eigenvalues(i);
    q.pi = phi * c_pinv * phi.transpose() * xi.asDiagonal();

    // Construction self-check: b - A theta must match Phi' Xi (T v - v).
    Rng rng(0x11d5a11);
    for (int trial = 0; trial < 10; ++trial) {
        Vector theta(d);
        for (int i = 0; i < d; ++i) theta(i) = rng.uniform(-1.0, 1.0);
        const Vector v_hat = phi * theta;
        const Vector direct = phi.transpose() *
                              (xi.asDiagonal() * (q.r_target + mdp.gamma() * (q.p_target * v_hat) - v_hat));
        const double gap = (q.b - q.a * theta - direct).lpNorm<Eigen::Infinity>();
        const double scale = 1.0 + direct.lpNorm<Eigen::Infinity>();
        if (gap > 1e-9 * scale)
            throw Error("exact_quantities: assembled (A, b) fail the expected-update identity, gap = " +
                        std::to_string(gap));
    }
    return q;
}

SampleEstimates sample_estimates(const Sample& sample, double gamma) {
    const Vector delta_phi = sample.phi - gamma * sample.phi_next;
    SampleEstimates est;
    est.a_hat = sample.rho * sample.phi * delta_phi.transpose();
    est.b_hat = sample.rho * sample.reward * sample.phi;
    est.c_hat = sample.phi * sample.phi.transpose();
    return est;
}

double objective_j(const Vector& theta, const ExactQuantities& exact, MMode mode) {
    return exact.m_inv_quad(mode, exact.b - exact.a * theta);
}

double mspbe(const Vector& theta, const ExactQuantities& exact) {
    return objective_j(theta, exact, MMode::covariance);
}

double neu(const Vector& theta, const ExactQuantities& exact) {
    return objective_j(theta, exact, MMode::identity);
}

double msbe(const Vector& theta, const FiniteMdp& mdp, const Policy& target, const Vector& xi,
            const Matrix& phi) {
    const Vector v_hat = phi * theta;
    const Vector bellman =
        mdp.induced_reward(target) + mdp.gamma() * (mdp.induced_transition(target) * v_hat) - v_hat;
    return (xi.array() * bellman.array().square()).sum();
}

double msbe(const Vector& theta, const ExactQuantities& exact) {
    const Vector v_hat = exact.phi * theta;
    const Vector bellman = exact.r_target + exact.gamma * (exact.p_target * v_hat) - v_hat;
    return (exact.xi.array() * bellman.array().square()).sum();
}

double lagrangian(const Vector& theta, const Vector& y, const ExactQuantities& exact, MMode mode) {
    return (exact.b - exact.a * theta).dot(y) - 0.5 * y.dot(exact.m_apply(mode, y));
}

Vector y_star(const Vector& theta, const ExactQuantities& exact, MMode mode) {
    return exact.m_pinv_apply(mode, exact.b - exact.a * theta);
}

namespace {

// max over ||y|| <= radius of  c'y - 1/2 y'My, via the eigenbasis of M.
double ball_constrained_max(const Vector& c, const ExactQuantities& exact, MMode mode, double radius) {
    const int d = static_cast<int>(c.size());
    Vector eigvals;
    Vector coeffs;
    if (mode == MMode::identity) {
        eigvals = Vector::Ones(d);
        coeffs = c;
    } else {
        eigvals = exact.c_eigenvalues.cwiseMax(0.0);
        coeffs = exact.c_eigenvectors.transpose() * c;
    }

    // Interior optimum if c lies in range(M) and M^+ c fits in the ball.
    double null_mass = 0.0;
    double interior_norm_sq = 0.0;
    double interior_value = 0.0;
    for (int i = 0; i < d; ++i) {
        if (eigvals(i) > kEigTol) {
            const double yi = coeffs(i) / eigvals(i);
            interior_norm_sq += yi * yi;
            interior_value += 0.5 * coeffs(i) * coeffs(i) / eigvals(i);
        } else {
            null_mass += coeffs(i) * coeffs(i);
        }
    }
    const double scale = std::max(1.0, c.norm());
    if (std::sqrt(null_mass) <= kRangeTol * scale && interior_norm_sq <= radius * radius)
        return interior_value;

    // Boundary optimum: find mu > 0 with sum_i coeffs_i^2/(eig_i + mu)^2 = radius^2.
    const auto norm_sq_at = [&](double mu) {
        double total = 0.0;
        for (int i = 0; i < d; ++i) {
            const double term = coeffs(i) / (eigvals(i) + mu);
            total += term * term;
        }
        return total;
    };
    double lo = 0.0;
    double hi = std::max(c.norm() / radius, 1e-30);
    while (norm_sq_at(hi) > radius * radius) hi *= 2.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (norm_sq_at(mid) > radius * radius)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
    }
    const double mu = 0.5 * (lo + hi);
    double value = 0.0;
    for (int i = 0; i < d; ++i) {
        const double yi = coeffs(i) / (eigvals(i) + mu);
        value += coeffs(i) * yi - 0.5 * eigvals(i) * yi * yi;
    }
    return value;
}

} // namespace

double saddle_error(const Vector& theta, const Vector& y, const ExactQuantities& exact, MMode mode,
                    double r_theta, double r_y) {
    if (!(r_theta > 0.0) || !(r_y > 0.0) || !std::isfinite(r_theta) || !std::isfinite(r_y))
        throw OutOfRange("saddle_error: ball radii must be positive and finite");
    const double max_term = ball_constrained_max(exact.b - exact.a * theta, exact, mode, r_y);
    const double min_term = exact.b.dot(y) - r_theta * (exact.a.transpose() * y).norm() -
                            0.5 * y.dot(exact.m_apply(mode, y));
    return max_term - min_term;
}

Vector neu_half_negative_gradient(const Vector& theta, const ExactQuantities& exact) {
    return exact.a.transpose() * (exact.b - exact.a * theta);
}

Lemma2Bounds lemma2_bounds(double l, int d, double gamma, double rho_max, double r_max) {
    if (l < 0.0 || d < 0 || gamma < 0.0 || rho_max < 0.0 || r_max < 0.0)
        throw OutOfRange("lemma2_bounds: inputs must be nonnegative");
    Lemma2Bounds out;
    out.bound_a = (1.0 + gamma) * rho_max * l * l * d;
    out.bound_b = rho_max * l * r_max;
    return out;
}

void BoundInputs::validate() const {
    if (r <= 0.0 || d_theta < 0.0 || d_y < 0.0 || l < 0.0 || dim < 1 || gamma < 0.0 || gamma >= 1.0 ||
        rho_max < 0.0 || r_max < 0.0 || sigma1 < 0.0 || sigma2 < 0.0 || tau < 0.0)
        throw OutOfRange("BoundInputs: nonnegative inputs required (and R > 0, gamma in [0,1))");
    if (m_mode == MMode::identity && std::abs(tau - 1.0) > 1e-12)
        throw OutOfRange("BoundInputs: tau must be 1 in identity mode");
}

StepSizeRule m_star_and_stepsize(const BoundInputs& bounds, double norm_a, double norm_b, long n,
                                 double c) {
    bounds.validate();
    if (n < 1) throw OutOfRange("m_star_and_stepsize: n must be >= 1");
    if (c <= 0.0) throw OutOfRange("m_star_and_stepsize: c must be positive");
    StepSizeRule rule;
    rule.m_star = bounds.r * bounds.r * (2.0 * norm_a + bounds.tau) + bounds.r * (bounds.sigma() + norm_b);
    if (rule.m_star <= 0.0) throw ZeroMstar("m_star_and_stepsize: M_* is zero");
    rule.alpha = 2.0 * c / (rule.m_star * std::sqrt(5.0 * static_cast<double>(n)));
    return rule;
}

double high_prob_bound(const BoundInputs& bounds, long n, double delta) {
    bounds.validate();
    if (n < 1) throw OutOfRange("high_prob_bound: n must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw OutOfRange("high_prob_bound: delta must lie in (0, 1)");
    const double lead = std::sqrt(5.0 / static_cast<double>(n)) * (8.0 + 2.0 * std::log(2.0 / delta)) *
                        bounds.r * bounds.r;
    const double inner = bounds.rho_max * bounds.l *
                             (2.0 * (1.0 + bounds.gamma) * bounds.l * bounds.dim + bounds.r_max / bounds.r) +
                         bounds.tau + bounds.sigma() / bounds.r;
    return lead * inner;
}

bool lmi_check(const ExactQuantities& exact) {
    const int d = exact.dim();
    const Matrix cross = exact.phi.transpose() * exact.xi.asDiagonal() * exact.p_target * exact.phi;
    Matrix block(2 * d, 2 * d);
    block.topLeftCorner(d, d) = exact.c;
    block.topRightCorner(d, d) = cross;
    block.bottomLeftCorner(d, d) = cross.transpose();
    block.bottomRightCorner(d, d) = exact.c;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(block, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() >= -1e-10;
}

double projection_residual(const ExactQuantities& exact) {
    const int n = static_cast<int>(exact.phi.rows());
    const Matrix lhs = Matrix::Identity(n, n) - exact.gamma * exact.p_target;
    const Vector v = lhs.partialPivLu().solve(exact.r_target);
    const Vector gap = v - exact.pi * v;
    return std::sqrt((exact.xi.array() * gap.array().square()).sum());
}

double performance_bound(const ExactQuantities& exact, double err_value, bool on_policy,
                         const BoundInputs& bounds) {
    bounds.validate();
    const double err = std::max(0.0, err_value);
    const double proj = projection_residual(exact);
    const double tau = bounds.tau;
    if (on_policy) {
        if (exact.nu <= kEigTol)
            throw SingularC("performance_bound: on-policy bound needs a nonsingular covariance");
        return (proj + (bounds.l / exact.nu) * std::sqrt(2.0 * bounds.dim * tau * exact.xi_max * err)) /
               (1.0 - exact.gamma);
    }
    if (!lmi_check(exact)) throw LmiViolated("performance_bound: LMI condition fails for this xi");
    const int d = exact.dim();
    Matrix m_inv_a(d, d);
    for (int j = 0; j < d; ++j) m_inv_a.col(j) = exact.m_pinv_apply(bounds.m_mode, exact.a.col(j));
    Matrix gram = exact.a.transpose() * m_inv_a;
    gram = 0.5 * (gram + gram.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double sigma_min = eig.eigenvalues().minCoeff();
    if (sigma_min <= kEigTol) throw SingularA("performance_bound: A' M^-1 A is singular");
    const double lead = (1.0 + exact.gamma * std::sqrt(bounds.rho_max)) / (1.0 - exact.gamma);
    return lead * proj + std::sqrt(2.0 * exact.tau_c * tau * exact.xi_max * err / sigma_min);
}

Vector forward_lambda_expectation(const ExactQuantities& exact, const Vector& theta, double lambda,
                                  int horizon) {
    if (lambda < 0.0 || lambda >= 1.0) throw OutOfRange("forward_lambda_expectation: lambda in [0, 1)");
    if (horizon < 1) throw OutOfRange("forward_lambda_expectation: horizon must be >= 1");
    const Vector v_hat = exact.phi * theta;
    if (lambda == 0.0) {
        const Vector bellman = exact.r_target + exact.gamma * (exact.p_target * v_hat) - v_hat;
        return exact.phi.transpose() * (exact.xi.asDiagonal() * bellman);
    }
    Vector iterate = v_hat;
    Vector acc = Vector::Zero(v_hat.size());
    double lambda_pow = 1.0;
    for (int i = 0; i < horizon; ++i) {
        iterate = exact.r_target + exact.gamma * (exact.p_target * iterate);
        acc += lambda_pow * (iterate - v_hat);
        lambda_pow *= lambda;
    }
    return (1.0 - lambda) * (exact.phi.transpose() * (exact.xi.asDiagonal() * acc));
}

int default_lambda_horizon(double lambda) {
    if (lambda <= 0.0) return 1;
    return static_cast<int>(std::ceil(std::log(1e-10) / std::log(lambda))) + 1;
}

SigmaEstimate estimate_sigmas(const ExactQuantities& exact, std::span<const Sample> pilot, MMode mode,
                              double r_theta, double r_y, int grid_points, double safety,
                              std::uint64_t seed) {
    if (pilot.empty()) throw OutOfRange("estimate_sigmas: pilot sample set is empty");
    Rng rng(seed);
    const int d = exact.dim();
    double worst_var_y = 0.0;
    double worst_var_theta = 0.0;
    for (int g = 0; g < grid_points; ++g) {
        const Vector theta = random_in_ball(d, r_theta, rng);
        const Vector y = random_in_ball(d, r_y, rng);
        const Vector mean_y = exact.b - exact.a * theta - exact.m_apply(mode, y);
        const Vector mean_theta = exact.a.transpose() * y;
        double var_y = 0.0;
        double var_theta = 0.0;
        for (const Sample& s : pilot) {
            const Vector delta_phi = s.phi - exact.gamma * s.phi_next;
            const double delta = s.reward - delta_phi.dot(theta);
            const Vector m_hat_y =
                mode == MMode::identity ? y : Vector(s.phi * (s.phi.dot(y)));
            var_y += (s.rho * delta * s.phi - m_hat_y - mean_y).squaredNorm();
            var_theta += (s.rho * s.phi.dot(y) * delta_phi - mean_theta).squaredNorm();
        }
        var_y /= static_cast<double>(pilot.size());
        var_theta /= static_cast<double>(pilot.size());
        worst_var_y = std::max(worst_var_y, var_y);
        worst_var_theta = std::max(worst_var_theta, var_theta);
    }
    SigmaEstimate est;
    est.sigma1 = safety * std::sqrt(worst_var_y);
    est.sigma2 = safety * std::sqrt(worst_var_theta);
    return est;
}

AuditPoint theorem1_audit(const Vector& theta_bar, const Vector& y_bar, const ExactQuantities& exact,
                          MMode mode, double r_theta, double r_y) {
    AuditPoint point;
    point.lhs = 0.5 * exact.xi_max * (exact.a * theta_bar - exact.b).squaredNorm();
    point.rhs = exact.tau(mode) * exact.xi_max * saddle_error(theta_bar, y_bar, exact, mode, r_theta, r_y);
    point.ok = point.lhs <= point.rhs + 1e-9 * std::max(1.0, std::abs(point.rhs));
    return point;
}

} // namespace gtd
