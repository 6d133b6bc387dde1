#include "gtd/mdp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace gtd {

namespace {

void check_rows_stochastic(const Matrix& m, const std::string& what) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        double sum = 0.0;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (m(r, c) < 0.0)
                throw InvalidDistribution(what + ": negative entry in row " + std::to_string(r));
            sum += m(r, c);
        }
        if (std::abs(sum - 1.0) > kProbTol)
            throw InvalidDistribution(what + ": row " + std::to_string(r) + " sums to " + std::to_string(sum));
    }
}

} // namespace

Policy::Policy(Matrix probs) : probs_(std::move(probs)) {
    check_rows_stochastic(probs_, "Policy");
}

Policy Policy::uniform(int n_states, int n_actions) {
    return Policy(Matrix::Constant(n_states, n_actions, 1.0 / n_actions));
}

Policy Policy::deterministic(int n_states, int n_actions, const std::vector<int>& action) {
    Matrix probs = Matrix::Zero(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) {
        if (action[static_cast<std::size_t>(s)] < 0 || action[static_cast<std::size_t>(s)] >= n_actions)
            throw OutOfRange("Policy::deterministic: bad action for state " + std::to_string(s));
        probs(s, action[static_cast<std::size_t>(s)]) = 1.0;
    }
    return Policy(std::move(probs));
}

FiniteMdp::FiniteMdp(std::vector<Matrix> transition, Matrix reward, double gamma)
    : n_states_(static_cast<int>(reward.rows())), n_actions_(static_cast<int>(reward.cols())),
      transition_(std::move(transition)), reward_(std::move(reward)), gamma_(gamma) {
    if (gamma_ < 0.0 || gamma_ >= 1.0)
        throw OutOfRange("FiniteMdp: gamma must lie in [0, 1)");
    if (static_cast<int>(transition_.size()) != n_actions_)
        throw DimensionMismatch("FiniteMdp: one transition matrix per action required");
    for (int a = 0; a < n_actions_; ++a) {
        const Matrix& p = transition_[static_cast<std::size_t>(a)];
        if (p.rows() != n_states_ || p.cols() != n_states_)
            throw DimensionMismatch("FiniteMdp: transition matrix shape mismatch for action " + std::to_string(a));
        check_rows_stochastic(p, "FiniteMdp transition[" + std::to_string(a) + "]");
    }
    r_max_ = reward_.cwiseAbs().maxCoeff();
}

Matrix FiniteMdp::induced_transition(const Policy& policy) const {
    Matrix p = Matrix::Zero(n_states_, n_states_);
    for (int a = 0; a < n_actions_; ++a)
        p += policy.probs().col(a).asDiagonal() * transition_[static_cast<std::size_t>(a)];
    return p;
}

Vector FiniteMdp::induced_reward(const Policy& policy) const {
    return (policy.probs().array() * reward_.array()).rowwise().sum();
}

std::string FiniteMdp::to_json() const {
    nlohmann::json j;
    j["n_states"] = n_states_;
    j["n_actions"] = n_actions_;
    j["gamma"] = gamma_;
    auto& trans = j["transition"];
    for (int s = 0; s < n_states_; ++s) {
        nlohmann::json row_s;
        for (int a = 0; a < n_actions_; ++a) {
            std::vector<double> row(static_cast<std::size_t>(n_states_));
            for (int next = 0; next < n_states_; ++next)
                row[static_cast<std::size_t>(next)] = transition(s, a, next);
            row_s.push_back(row);
        }
        trans.push_back(row_s);
    }
    auto& rew = j["reward"];
    for (int s = 0; s < n_states_; ++s) {
        std::vector<double> row(static_cast<std::size_t>(n_actions_));
        for (int a = 0; a < n_actions_; ++a) row[static_cast<std::size_t>(a)] = reward_(s, a);
        rew.push_back(row);
    }
    return j.dump(2);
}

FiniteMdp FiniteMdp::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const int n_states = j.at("n_states").get<int>();
    const int n_actions = j.at("n_actions").get<int>();
    const double gamma = j.at("gamma").get<double>();
    std::vector<Matrix> transition(static_cast<std::size_t>(n_actions), Matrix::Zero(n_states, n_states));
    const auto& trans = j.at("transition");
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a)
            for (int next = 0; next < n_states; ++next)
                transition[static_cast<std::size_t>(a)](s, next) = trans.at(s).at(a).at(next).get<double>();
    Matrix reward = Matrix::Zero(n_states, n_actions);
    const auto& rew = j.at("reward");
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) reward(s, a) = rew.at(s).at(a).get<double>();
    return FiniteMdp(std::move(transition), std::move(reward), gamma);
}

void FiniteMdp::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << to_json() << '\n';
}

FiniteMdp FiniteMdp::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

double importance_weight(const Policy& target, const Policy& behavior, int s, int a) {
    if (s < 0 || s >= behavior.n_states() || a < 0 || a >= behavior.n_actions())
        throw OutOfRange("importance_weight: state/action out of range");
    const double pb = behavior.prob(s, a);
    const double pt = target.prob(s, a);
    if (pt == 0.0) return 0.0;
    if (pb <= 0.0)
        throw BehaviorZero("importance_weight: behavior policy gives zero mass to (s=" + std::to_string(s) +
                           ", a=" + std::to_string(a) + ")");
    return pt / pb;
}

double rho_max(const Policy& target, const Policy& behavior) {
    double best = 0.0;
    for (int s = 0; s < behavior.n_states(); ++s)
        for (int a = 0; a < behavior.n_actions(); ++a)
            if (behavior.prob(s, a) > 0.0)
                best = std::max(best, target.prob(s, a) / behavior.prob(s, a));
    return best;
}

Vector stationary_distribution(const FiniteMdp& mdp, const Policy& policy, double tol, long max_iter) {
    const Matrix p = mdp.induced_transition(policy);
    const int n = mdp.n_states();
    Vector xi = Vector::Constant(n, 1.0 / n);
    for (long iter = 0; iter < max_iter; ++iter) {
        Vector next = p.transpose() * xi;
        next /= next.sum();
        const double residual = (next - xi).lpNorm<Eigen::Infinity>();
        xi = next;
        if (residual <= tol) return xi;
    }
    throw NotConverged("stationary_distribution: no convergence after " + std::to_string(max_iter) +
                       " iterations (chain may be reducible or periodic)");
}

Vector true_values(const FiniteMdp& mdp, const Policy& policy) {
    const Matrix p = mdp.induced_transition(policy);
    const Vector r = mdp.induced_reward(policy);
    const int n = mdp.n_states();
    const Matrix lhs = Matrix::Identity(n, n) - mdp.gamma() * p;
    return lhs.partialPivLu().solve(r);
}

ValueIterationResult value_iteration(const FiniteMdp& mdp, double tol, long max_iter) {
    const int n = mdp.n_states();
    const int m = mdp.n_actions();
    Vector v = Vector::Zero(n);
    for (long iter = 0; iter < max_iter; ++iter) {
        Vector next(n);
        for (int s = 0; s < n; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < m; ++a) {
                const double q = mdp.reward(s, a) + mdp.gamma() * mdp.transition_matrix(a).row(s).dot(v);
                best = std::max(best, q);
            }
            next(s) = best;
        }
        const double residual = (next - v).lpNorm<Eigen::Infinity>();
        v = next;
        if (residual <= tol) break;
        if (iter + 1 == max_iter)
            throw NotConverged("value_iteration: no convergence after " + std::to_string(max_iter) + " iterations");
    }
    ValueIterationResult out;
    out.values = v;
    out.greedy_action.resize(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        int best_a = 0;
        for (int a = 0; a < m; ++a) {
            const double q = mdp.reward(s, a) + mdp.gamma() * mdp.transition_matrix(a).row(s).dot(v);
            if (q > best + 1e-12) {
                best = q;
                best_a = a;
            }
        }
        out.greedy_action[static_cast<std::size_t>(s)] = best_a;
    }
    return out;
}

void validate_distribution(const Vector& xi, double tol, const std::string& what) {
    if (xi.minCoeff() < 0.0) throw InvalidDistribution(what + ": negative mass");
    if (std::abs(xi.sum() - 1.0) > tol)
        throw InvalidDistribution(what + ": mass sums to " + std::to_string(xi.sum()));
}

} // namespace gtd
