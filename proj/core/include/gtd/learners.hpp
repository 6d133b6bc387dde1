#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gtd/features.hpp"
#include "gtd/objectives.hpp"
#include "gtd/rng.hpp"
#include "gtd/sample.hpp"

namespace gtd {

enum class Algorithm { td0, gtd, gtd2, tdc, gtd_mp, gtd2_mp, gq_lambda };
enum class StepSchedule { constant, theoretical, robbins_monro };

Algorithm algorithm_from_name(const std::string& name);
std::string algorithm_name(Algorithm algorithm);
StepSchedule schedule_from_name(const std::string& name);
std::string schedule_name(StepSchedule schedule);

/// Default weighting mode of an algorithm (identity for the gtd/gtd_mp
/// branch, covariance elsewhere).
MMode default_m_mode(Algorithm algorithm);

struct LearnerConfig {
    Algorithm algorithm = Algorithm::gtd2;
    MMode m_mode = MMode::covariance;
    double alpha = 0.01;
    StepSchedule schedule = StepSchedule::constant;
    double beta = 0.0;  // second (faster) step size for tdc; 0 selects 4 * alpha
    double lambda = 0.0;
    double gamma = 0.0;
    double r_theta = std::numeric_limits<double>::infinity();
    double r_y = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    double robbins_monro_eps = 0.01; // alpha_t = alpha / (1 + t)^(0.5 + eps)
    double theoretical_alpha = 0.0;  // filled in from the step-size rule

    void validate() const;
    double step_size(long t) const;
    double beta_or_default() const { return beta > 0.0 ? beta : 4.0 * alpha; }
    bool projected() const {
        return std::isfinite(r_theta) || std::isfinite(r_y);
    }
};

/// Primal-dual iterate with step-size-weighted running averages. The
/// averages are over the iterates produced by the steps taken so far;
/// before any step they fall back to the current point.
struct SaddleIterate {
    Vector theta;
    Vector y;
    Vector theta_sum; // sum of alpha_t * theta_t over produced iterates
    Vector y_sum;
    double theta_weight = 0.0;
    double y_weight = 0.0;
    long t = 0;

    static SaddleIterate zeros(int dim);
    static SaddleIterate start(Vector theta0, Vector y0);

    Vector theta_bar() const { return theta_weight > 0.0 ? Vector(theta_sum / theta_weight) : theta; }
    Vector y_bar() const { return y_weight > 0.0 ? Vector(y_sum / y_weight) : y; }
    void accumulate_theta(double alpha) {
        theta_sum += alpha * theta;
        theta_weight += alpha;
    }
    void accumulate_y(double alpha) {
        y_sum += alpha * y;
        y_weight += alpha;
    }
};

/// Eligibility trace e_t = rho_t gamma lambda e_{t-1} + phi_t, e_0 = 0.
struct TraceState {
    Vector e;
    static TraceState zeros(int dim) { return TraceState{Vector::Zero(dim)}; }
};

/// Euclidean projection onto the ball of the given radius (infinite radius
/// is the identity).
Vector project_ball(const Vector& v, double radius);

/// One projected primal-dual step (simultaneous order: both updates read
/// the pre-step iterate):
///   y     <- Pi_Y (y + alpha (b_hat - A_hat theta - M_hat y))
///   theta <- Pi_Theta (theta + alpha A_hat' y)
/// with M_hat = I for gtd and phi phi' for gtd2.
void gtd_family_step(SaddleIterate& it, const Sample& sample, const LearnerConfig& cfg);

/// One stochastic mirror-prox step: extrapolate with the sample gradient,
/// re-evaluate the gradient at the extrapolated point, then correct from
/// the original iterate. Both half-steps reuse the same sample; projections
/// apply to the corrected point.
void mirror_prox_step(SaddleIterate& it, const Sample& sample, const LearnerConfig& cfg);

/// Importance-weighted TD(0) baseline: theta += alpha rho delta phi.
void td0_step(Vector& theta, const Sample& sample, double alpha, double gamma);

/// Two-time-scale TD with correction:
///   theta <- theta + alpha rho delta phi - alpha gamma rho phi' (phi' y ... phi'y means phi . y)
///   y     <- y + beta rho (delta - phi'y) phi
void tdc_step(SaddleIterate& it, const Sample& sample, const LearnerConfig& cfg);

TraceState trace_update(const TraceState& trace, const Sample& sample, double gamma, double lambda);

/// One step of the trace-based mirror-prox learner (state-action samples):
/// trace update, TD error, extrapolated (y, theta), re-evaluated TD error,
/// corrected (y, theta).
void gq_mp_learn_step(SaddleIterate& it, TraceState& trace, const Sample& sample,
                      const LearnerConfig& cfg);

/// Dispatches a sample to the configured algorithm and owns the iterate and
/// trace. One instance per (seed, config) run; no shared state.
class Learner {
  public:
    Learner(LearnerConfig cfg, int dim);
    Learner(LearnerConfig cfg, Vector theta0, Vector y0);

    void step(const Sample& sample);
    const SaddleIterate& iterate() const { return it_; }
    const TraceState& trace() const { return trace_; }
    const LearnerConfig& config() const { return cfg_; }

  private:
    LearnerConfig cfg_;
    SaddleIterate it_;
    TraceState trace_;
};

struct GreedyChoice {
    int greedy_action = 0;
    double rho = 0.0;
};

/// Greedy action under theta at state s (ties to the lowest index,
/// restricted to the behavior policy's support) and the importance weight
/// of the action actually taken: 1/pi_b if it is greedy, else 0.
GreedyChoice greedy_action_and_rho(const Vector& theta, const StateActionFeatures& features,
                                   const Policy& behavior, int s, int action_taken);

struct EpisodeLog {
    std::vector<int> states;
    std::vector<int> actions;
    std::vector<double> rewards;
    long steps = 0;
    int final_state = 0;
};

/// One greedy-GQ episode: reset the trace, then loop behavior-policy steps
/// through greedy_action_and_rho and the configured learner update until a
/// terminal state or the step cap. The next-state feature of each sample is
/// the greedy successor feature under the current theta.
EpisodeLog run_greedy_gq_episode(const FiniteMdp& mdp, const Policy& behavior,
                                 const StateActionFeatures& features, const LearnerConfig& cfg,
                                 SaddleIterate& it, TraceState& trace, int start_state, long max_steps,
                                 Rng& rng, const std::function<bool(int)>& is_terminal = {});

} // namespace gtd
