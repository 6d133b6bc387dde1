#pragma once

#include <cstdint>
#include <span>

#include "gtd/mdp.hpp"
#include "gtd/sample.hpp"

namespace gtd {

/// Weighting matrix of the unified objective ||b - A theta||^2_{M^-1}:
/// the identity for the expected-update norm, the feature covariance for
/// the projected Bellman error.
enum class MMode { identity, covariance };

/// Exact expectation matrices of a (mdp, target, behavior, xi, Phi) tuple,
/// assembled by enumeration over (s, a, s'). The covariance C is kept as an
/// eigendecomposition so that rank-deficient feature sets (features can
/// outnumber states) still support projection and pseudo-inverse queries.
struct ExactQuantities {
    Matrix a;        // d x d, E[rho phi (phi - gamma phi')']
    Vector b;        // d,     E[rho r phi]
    Matrix c;        // d x d, E[phi phi'] = Phi' Xi Phi
    Matrix pi;       // |S| x |S| xi-orthogonal projection onto span(Phi)
    Matrix phi;      // |S| x d feature matrix
    Vector xi;       // sampling distribution over states
    Matrix p_target; // kernel of the target policy
    Vector r_target; // expected reward under the target policy
    double gamma = 0.0;
    double nu = 0.0;     // lambda_min(C), clamped at 0
    double tau_c = 0.0;  // sigma_max(C)
    double xi_max = 0.0; // max_s xi(s)
    int rank_c = 0;
    Vector c_eigenvalues;
    Matrix c_eigenvectors;

    int dim() const { return static_cast<int>(b.size()); }
    double tau(MMode mode) const { return mode == MMode::identity ? 1.0 : tau_c; }
    bool c_singular() const { return rank_c < dim(); }

    Vector m_apply(MMode mode, const Vector& v) const;
    /// M^+ v; throws SingularC if v has a component outside range(M).
    Vector m_pinv_apply(MMode mode, const Vector& v) const;
    /// v' M^+ v with the same range check.
    double m_inv_quad(MMode mode, const Vector& v) const;
};

/// Assembles the exact quantities. Requires xi to sum to one; throws
/// SingularC only when the covariance has rank zero (no usable features).
/// A fully singular direction is otherwise tolerated and recorded in
/// rank_c, since classic counterexample domains have more features than
/// states.
ExactQuantities exact_quantities(const FiniteMdp& mdp, const Policy& target, const Policy& behavior,
                                 const Vector& xi, const Matrix& phi);

/// Per-sample unbiased estimates of (A, b, C).
struct SampleEstimates {
    Matrix a_hat;
    Vector b_hat;
    Matrix c_hat;
};
SampleEstimates sample_estimates(const Sample& sample, double gamma);

/// J(theta) = ||b - A theta||^2_{M^-1}.
double objective_j(const Vector& theta, const ExactQuantities& exact, MMode mode);
double mspbe(const Vector& theta, const ExactQuantities& exact);
double neu(const Vector& theta, const ExactQuantities& exact);

/// Mean-square Bellman error sum_s xi(s) (T v - v)(s)^2.
double msbe(const Vector& theta, const FiniteMdp& mdp, const Policy& target, const Vector& xi,
            const Matrix& phi);
double msbe(const Vector& theta, const ExactQuantities& exact);

/// L(theta, y) = <b - A theta, y> - 1/2 ||y||^2_M.
double lagrangian(const Vector& theta, const Vector& y, const ExactQuantities& exact, MMode mode);

/// Maximizer of L(theta, .) over all of R^d: M^+ (b - A theta).
Vector y_star(const Vector& theta, const ExactQuantities& exact, MMode mode);

/// Saddle-point error over the feasible balls of radius r_theta and r_y:
/// max_{||y'|| <= r_y} L(theta, y') - min_{||theta'|| <= r_theta} L(theta', y).
/// The minimum is linear in theta' and closed-form; the maximum solves the
/// ball-constrained concave quadratic exactly (interior optimum when it
/// fits, otherwise a one-dimensional multiplier root-find at 1e-12).
double saddle_error(const Vector& theta, const Vector& y, const ExactQuantities& exact, MMode mode,
                    double r_theta, double r_y);

/// -1/2 grad NEU(theta) = A' (b - A theta); the closed form checked against
/// finite differences in the gradient diagnostic.
Vector neu_half_negative_gradient(const Vector& theta, const ExactQuantities& exact);

struct Lemma2Bounds {
    double bound_a = 0.0; // (1 + gamma) rho_max L^2 d  >= ||A||_2
    double bound_b = 0.0; // rho_max L R_max            >= ||b||_2
};
Lemma2Bounds lemma2_bounds(double l, int d, double gamma, double rho_max, double r_max);

/// Constants feeding the step-size rule and the high-probability bound.
struct BoundInputs {
    double r = 1.0;       // feasible-ball radius R
    double d_theta = 0.0; // diameter of Theta (sqrt(max - min squared norms))
    double d_y = 0.0;
    double l = 1.0; // feature bound
    int dim = 1;
    double gamma = 0.0;
    double rho_max = 1.0;
    double r_max = 1.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double tau = 1.0;
    MMode m_mode = MMode::identity;

    double sigma() const { return std::sqrt(sigma1 * sigma1 + sigma2 * sigma2); }
    void validate() const;
};

struct StepSizeRule {
    double m_star = 0.0;
    double alpha = 0.0;
};

/// M_* = R^2 (2 ||A|| + tau) + R (sigma + ||b||) and the constant step size
/// alpha = 2c / (M_* sqrt(5 n)).
StepSizeRule m_star_and_stepsize(const BoundInputs& bounds, double norm_a, double norm_b, long n,
                                 double c = 1.0);

/// High-probability error bound
/// sqrt(5/n) (8 + 2 log(2/delta)) R^2 (rho_max L (2(1+gamma)Ld + R_max/R) + tau + sigma/R).
double high_prob_bound(const BoundInputs& bounds, long n, double delta);

/// Positive semidefiniteness of the 2d x 2d block matrix
/// [[Phi'XiPhi, Phi'XiPPhi], [Phi'P'XiPhi, Phi'XiPhi]] within -1e-10.
bool lmi_check(const ExactQuantities& exact);

/// Value-error bound from a saddle error certificate. On-policy:
/// (||V - Pi V|| + (L/nu) sqrt(2 d tau xi_max Err)) / (1 - gamma).
/// Off-policy (requires the LMI check and nonsingular A' M^-1 A):
/// (1 + gamma sqrt(rho_max))/(1 - gamma) ||V - Pi V||
///   + sqrt(2 tau_C tau xi_max Err / sigma_min(A' M^-1 A)).
double performance_bound(const ExactQuantities& exact, double err_value, bool on_policy,
                         const BoundInputs& bounds);

/// ||V - Pi V||_xi, the feature-space approximation floor.
double projection_residual(const ExactQuantities& exact);

/// E[rho phi delta^lambda(theta)] by the truncated operator power series
/// (1 - lambda) sum_i lambda^i Phi' Xi (T^{i+1} v - v).
Vector forward_lambda_expectation(const ExactQuantities& exact, const Vector& theta, double lambda,
                                  int horizon);
/// Smallest horizon with lambda^horizon < 1e-10.
int default_lambda_horizon(double lambda);

/// Empirical variance constants: the max over a seeded set of (theta, y)
/// grid points on the feasible balls of the pilot-sample variance of the
/// two stochastic gradients, inflated by a safety factor.
struct SigmaEstimate {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
};
SigmaEstimate estimate_sigmas(const ExactQuantities& exact, std::span<const Sample> pilot, MMode mode,
                              double r_theta, double r_y, int grid_points = 64, double safety = 1.5,
                              std::uint64_t seed = 9001);

/// One audit point of the certificate chain
/// 1/2 xi_max ||A theta_bar - b||_2^2 <= tau xi_max Err(theta_bar, y_bar).
struct AuditPoint {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
};
AuditPoint theorem1_audit(const Vector& theta_bar, const Vector& y_bar, const ExactQuantities& exact,
                          MMode mode, double r_theta, double r_y);

} // namespace gtd
