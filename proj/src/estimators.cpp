#include "cftp/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "cftp/exact_sampling.hpp"
#include "cftp/solvers.hpp"
#include "paired_trajectories.hpp"

namespace cftp {

namespace {

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& theta) {
  if (theta.rows() == 0 || theta.cols() == 0) throw ValidationError("SoftmaxPolicy: empty parameter table");
  Eigen::MatrixXd p(theta.rows(), theta.cols());
  for (Eigen::Index s = 0; s < theta.rows(); ++s) {
    const double top = theta.row(s).maxCoeff();
    p.row(s) = (theta.row(s).array() - top).exp().matrix();
    p.row(s) /= p.row(s).sum();
  }
  return p;
}

std::size_t sample_index(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::vector<double> cumulative(const Eigen::VectorXd& p) {
  std::vector<double> cdf(static_cast<std::size_t>(p.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) cdf[static_cast<std::size_t>(i)] = acc += p[i];
  return cdf;
}

}  // namespace

SoftmaxPolicy::SoftmaxPolicy(Eigen::MatrixXd theta) : theta_(std::move(theta)), policy_(softmax_rows(theta_)) {}

Eigen::MatrixXd SoftmaxPolicy::grad_log(std::size_t s, std::size_t a) const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(theta_.rows(), theta_.cols());
  const auto row = static_cast<Eigen::Index>(s);
  g.row(row) = -policy_.probs().row(row);
  g(row, static_cast<Eigen::Index>(a)) += 1.0;
  return g;
}

DeltaRhoSampler::DeltaRhoSampler(const TabularMDP& mdp, Policy pi, Policy pi_prime, StartSource source,
                                 std::size_t step_cap)
    : mdp_(&mdp),
      pi_(std::move(pi)),
      pi_prime_(std::move(pi_prime)),
      source_(source),
      step_cap_(step_cap),
      start_chain_(induce_chain(mdp, pi_prime_)) {
  require_ergodic(induce_chain(mdp, pi_), "delta_rho_sample");
  if (source_ == StartSource::exact_solve) start_cdf_ = cumulative(stationary_distribution(start_chain_));
  else require_ergodic(start_chain_, "delta_rho_sample");
}

DiffEstimate DeltaRhoSampler::sample(Rng& rng) const {
  DiffEstimate out;
  std::size_t s0 = 0;
  if (source_ == StartSource::exact_solve) {
    s0 = sample_index(start_cdf_, rng);
  } else {
    const CoalescenceRecord rec = cftp(start_chain_, rng, step_cap_);
    s0 = rec.state;
    out.calls += rec.calls;
  }
  const std::size_t first_a = sample_action(pi_prime_, s0, rng);
  const std::size_t first_b = sample_action(pi_, s0, rng);
  double acc = 0.0;
  out.t_c = detail::run_paired(
      [&](std::size_t x, std::size_t a) { return mdp_->sample_next(x, a, rng); }, s0, first_a, first_b,
      [&](std::size_t x) { return sample_action(pi_, x, rng); },
      [&](std::size_t xa, std::size_t aa, std::size_t xb, std::size_t ab) {
        const double ra = mdp_->sample_reward(xa, aa, rng);
        const double rb = mdp_->sample_reward(xb, ab, rng);
        acc += ra - rb;
      },
      step_cap_);
  out.value = acc;
  out.calls += 2 * static_cast<std::uint64_t>(out.t_c);
  return out;
}

DiffEstimate delta_rho_sample(const TabularMDP& mdp, const Policy& pi, const Policy& pi_prime, StartSource source,
                              Rng& rng, std::size_t step_cap) {
  return DeltaRhoSampler(mdp, pi, pi_prime, source, step_cap).sample(rng);
}

PolicyGradientSampler::PolicyGradientSampler(const TabularMDP& mdp, SoftmaxPolicy policy, std::size_t step_cap)
    : mdp_(&mdp), policy_(std::move(policy)), step_cap_(step_cap), chain_(induce_chain(mdp, policy_.policy())) {
  if (policy_.n_actions() != mdp.n_actions()) throw ValidationError("policy_gradient_sample: action count mismatch");
  require_ergodic(chain_, "policy_gradient_sample");
}

GradientSample PolicyGradientSampler::sample(Rng& rng) const {
  GradientSample out;
  const CoalescenceRecord rec = cftp(chain_, rng, step_cap_);
  out.state = rec.state;
  out.calls = rec.calls;
  const StochasticPolicy& pi = policy_.policy();
  out.action = pi.sample(out.state, rng);
  const std::size_t baseline_action = pi.sample(out.state, rng);
  double acc = 0.0;
  out.t_c = detail::run_paired(
      [&](std::size_t x, std::size_t a) { return mdp_->sample_next(x, a, rng); }, out.state, out.action,
      baseline_action, [&](std::size_t x) { return pi.sample(x, rng); },
      [&](std::size_t xa, std::size_t aa, std::size_t xb, std::size_t ab) {
        const double ra = mdp_->sample_reward(xa, aa, rng);
        const double rb = mdp_->sample_reward(xb, ab, rng);
        acc += ra - rb;
      },
      step_cap_);
  out.calls += 2 * static_cast<std::uint64_t>(out.t_c);
  out.q_hat = acc;
  out.gradient = acc * policy_.grad_log(out.state, out.action);
  return out;
}

GradientSample policy_gradient_sample(const TabularMDP& mdp, const SoftmaxPolicy& policy, Rng& rng,
                                      std::size_t step_cap) {
  return PolicyGradientSampler(mdp, policy, step_cap).sample(rng);
}

Eigen::MatrixXd exact_policy_gradient(const TabularMDP& mdp, const SoftmaxPolicy& policy) {
  const BiasSolution sol = bias_and_q(mdp, policy.policy());
  const Eigen::MatrixXd& p = policy.policy().probs();
  Eigen::MatrixXd g(p.rows(), p.cols());
  for (Eigen::Index s = 0; s < p.rows(); ++s) {
    const double v = p.row(s).dot(sol.q.row(s));
    for (Eigen::Index b = 0; b < p.cols(); ++b) g(s, b) = sol.mu[s] * p(s, b) * (sol.q(s, b) - v);
  }
  return g;
}

}  // namespace cftp
