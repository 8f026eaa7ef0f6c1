#include "cftp/solvers.hpp"

#include <cmath>
#include <string>

#include "cftp/errors.hpp"

namespace cftp {

namespace {

constexpr double kResidualTol = 1e-10;
constexpr double kMixingThreshold = 1.0 / 8.0;

Eigen::MatrixXd state_action_reward(const TabularMDP& mdp, const std::optional<Eigen::VectorXd>& override_reward) {
  if (!override_reward) return mdp.reward_mean();
  if (static_cast<std::size_t>(override_reward->size()) != mdp.n_states()) {
    throw ValidationError("reward override must have one entry per state");
  }
  return override_reward->replicate(1, static_cast<Eigen::Index>(mdp.n_actions()));
}

Eigen::VectorXd policy_reward(const Eigen::MatrixXd& sa_reward, const Policy& policy) {
  const Eigen::Index n = sa_reward.rows();
  Eigen::VectorXd r(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    double acc = 0.0;
    for (Eigen::Index a = 0; a < sa_reward.cols(); ++a) {
      acc += action_prob(policy, static_cast<std::size_t>(s), static_cast<std::size_t>(a)) * sa_reward(s, a);
    }
    r[s] = acc;
  }
  return r;
}

BiasSolution solve_bias(const TabularMDP& mdp, const Policy& policy, const Eigen::MatrixXd& sa_reward) {
  const MarkovChain chain = induce_chain(mdp, policy);
  const Eigen::VectorXd mu = stationary_distribution(chain);
  const Eigen::VectorXd r = policy_reward(sa_reward, policy);
  const auto n = static_cast<Eigen::Index>(mdp.n_states());

  BiasSolution out;
  out.mu = mu;
  out.rho = mu.dot(r);
  const Eigen::MatrixXd fundamental =
      Eigen::MatrixXd::Identity(n, n) - chain.transition() + Eigen::VectorXd::Ones(n) * mu.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(fundamental);
  if (!lu.isInvertible()) throw SolverError("bias_and_q: fundamental matrix is singular");
  out.h = lu.solve(r - Eigen::VectorXd::Constant(n, out.rho));

  const auto m = static_cast<Eigen::Index>(mdp.n_actions());
  out.q.resize(n, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    out.q.col(a) = sa_reward.col(a) - Eigen::VectorXd::Constant(n, out.rho) +
                   mdp.transition(static_cast<std::size_t>(a)) * out.h;
  }
  return out;
}

}  // namespace

Eigen::VectorXd stationary_distribution(const MarkovChain& chain) {
  require_ergodic(chain, "stationary_distribution");
  const auto n = static_cast<Eigen::Index>(chain.n_states());
  const Eigen::MatrixXd& p = chain.transition();
  Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[n - 1] = 1.0;
  Eigen::VectorXd mu = a.fullPivLu().solve(b);

  const double residual = (mu.transpose() * p - mu.transpose()).cwiseAbs().maxCoeff();
  if (!(residual <= kResidualTol) || !(mu.minCoeff() > 0.0)) {
    throw SolverError("stationary_distribution: residual " + std::to_string(residual) + " beyond tolerance");
  }
  return mu;
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw ValidationError("total_variation: length mismatch");
  constexpr double tol = 1e-9;
  if (std::abs(p.sum() - 1.0) > tol || std::abs(q.sum() - 1.0) > tol || (p.array() < 0).any() || (q.array() < 0).any()) {
    throw ValidationError("total_variation: inputs must be probability vectors");
  }
  return 0.5 * (p - q).cwiseAbs().sum();
}

namespace {

double worst_tv(const Eigen::MatrixXd& dist, const Eigen::VectorXd& mu) {
  double worst = 0.0;
  for (Eigen::Index x = 0; x < dist.rows(); ++x) {
    worst = std::max(worst, 0.5 * (dist.row(x).transpose() - mu).cwiseAbs().sum());
  }
  return worst;
}

}  // namespace

std::vector<double> worst_case_tv_curve(const MarkovChain& chain, std::size_t horizon) {
  const Eigen::VectorXd mu = stationary_distribution(chain);
  const auto n = static_cast<Eigen::Index>(chain.n_states());
  Eigen::MatrixXd dist = Eigen::MatrixXd::Identity(n, n);
  std::vector<double> curve;
  curve.reserve(horizon + 1);
  for (std::size_t t = 0; t <= horizon; ++t) {
    curve.push_back(worst_tv(dist, mu));
    dist = dist * chain.transition();
  }
  return curve;
}

std::size_t mixing_time(const MarkovChain& chain, std::size_t cap) {
  const Eigen::VectorXd mu = stationary_distribution(chain);
  const auto n = static_cast<Eigen::Index>(chain.n_states());
  // Row x of dist is the law of X_t given X_0 = x.
  Eigen::MatrixXd dist = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t t = 0; t <= cap; ++t) {
    if (worst_tv(dist, mu) <= kMixingThreshold) return t;
    dist = dist * chain.transition();
  }
  throw StepCapExceeded("mixing_time: TV did not reach 1/8", cap);
}

double average_reward(const MarkovChain& chain) { return stationary_distribution(chain).dot(chain.reward_mean()); }

BiasSolution bias_and_q(const TabularMDP& mdp, const Policy& policy) {
  return solve_bias(mdp, policy, mdp.reward_mean());
}

BiasSolution bias_and_q(const TabularMDP& mdp, const Policy& policy, const Eigen::VectorXd& state_reward) {
  return solve_bias(mdp, policy, state_action_reward(mdp, state_reward));
}

double average_reward(const TabularMDP& mdp, const Policy& policy) {
  const MarkovChain chain = induce_chain(mdp, policy);
  return stationary_distribution(chain).dot(induced_reward(mdp, policy));
}

PlanningResult optimal_policy(const TabularMDP& mdp, const std::optional<Eigen::VectorXd>& reward_override,
                              std::size_t iteration_cap) {
  const Eigen::MatrixXd sa_reward = state_action_reward(mdp, reward_override);
  const std::size_t n = mdp.n_states();
  const std::size_t m = mdp.n_actions();
  DeterministicPolicy pi = DeterministicPolicy::constant(n, 0);
  if (m == 1) {
    const BiasSolution sol = solve_bias(mdp, pi, sa_reward);
    return {pi, sol.rho, 0};
  }

  // Q + rho is the one-step lookahead r(s, a) + P^a(s, .) h.
  auto greedy = [&](const BiasSolution& sol, std::size_t s, bool* improved) {
    const auto row = sol.q.row(static_cast<Eigen::Index>(s));
    const double best = row.maxCoeff();
    const double tol = 1e-10 * std::max(1.0, std::abs(best + sol.rho));
    const double current = row(static_cast<Eigen::Index>(pi(s)));
    if (improved) *improved = best > current + tol;
    for (std::size_t a = 0; a < m; ++a) {
      if (row(static_cast<Eigen::Index>(a)) >= best - tol) return a;
    }
    return pi(s);
  };

  for (std::size_t it = 1; it <= iteration_cap; ++it) {
    const BiasSolution sol = solve_bias(mdp, pi, sa_reward);
    std::vector<std::size_t> next = pi.actions();
    bool changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      bool improved = false;
      const std::size_t a = greedy(sol, s, &improved);
      if (improved) {
        next[s] = a;
        changed = true;
      }
    }
    if (!changed) {
      // Among greedy ties the lowest action index wins; any such policy is
      // gain-optimal because it is conserving for the optimal bias.
      std::vector<std::size_t> canon(n);
      for (std::size_t s = 0; s < n; ++s) canon[s] = greedy(sol, s, nullptr);
      DeterministicPolicy out(std::move(canon));
      const double rho = out == pi ? sol.rho : solve_bias(mdp, out, sa_reward).rho;
      return {std::move(out), rho, it};
    }
    pi = DeterministicPolicy(std::move(next));
  }
  throw StepCapExceeded("optimal_policy: policy iteration did not converge", iteration_cap);
}

std::vector<DeterministicPolicy> enumerate_policies(const TabularMDP& mdp, std::size_t limit) {
  const std::size_t n = mdp.n_states();
  const std::size_t m = mdp.n_actions();
  double count = std::pow(static_cast<double>(m), static_cast<double>(n));
  if (count > static_cast<double>(limit)) {
    throw ValidationError("enumerate_policies: |A|^|S| exceeds the enumeration limit");
  }
  std::vector<DeterministicPolicy> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<std::size_t> digits(n, 0);
  while (true) {
    out.emplace_back(digits);
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < m) break;
      digits[pos] = 0;
      if (pos == 0) return out;
    }
    if (n == 0) return out;
  }
}

}  // namespace cftp
