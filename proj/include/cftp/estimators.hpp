#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "cftp/errors.hpp"
#include "cftp/model.hpp"

namespace cftp {

/// Tabular softmax policy pi(a|s) = exp(theta(s, a)) / sum_b exp(theta(s, b)).
class SoftmaxPolicy {
 public:
  explicit SoftmaxPolicy(Eigen::MatrixXd theta);

  const Eigen::MatrixXd& theta() const noexcept { return theta_; }
  const StochasticPolicy& policy() const noexcept { return policy_; }
  std::size_t n_states() const noexcept { return static_cast<std::size_t>(theta_.rows()); }
  std::size_t n_actions() const noexcept { return static_cast<std::size_t>(theta_.cols()); }

  /// d log pi(s, a) / d theta: zero outside row s, and 1{b = a} - pi(b|s) on it.
  Eigen::MatrixXd grad_log(std::size_t s, std::size_t a) const;

 private:
  Eigen::MatrixXd theta_;
  StochasticPolicy policy_;
};

/// Where the start state of a paired-trajectory estimate comes from.
enum class StartSource { exact_solve, cftp };

struct DiffEstimate {
  double value = 0.0;
  std::size_t t_c = 0;      ///< steps until the two trajectories met
  std::uint64_t calls = 0;  ///< generative calls, including the start-state draw under cftp
};

/// Estimates rho(pi') - rho(pi): s0 ~ mu(pi'); trajectory A plays pi' at s0,
/// trajectory B plays pi; afterwards both follow pi with independent
/// transitions and reward draws, and the reward difference A - B is summed
/// until they share a state. Construction solves for mu(pi') once.
class DeltaRhoSampler {
 public:
  DeltaRhoSampler(const TabularMDP& mdp, Policy pi, Policy pi_prime, StartSource source, std::size_t step_cap);

  DiffEstimate sample(Rng& rng) const;

 private:
  const TabularMDP* mdp_;
  Policy pi_;
  Policy pi_prime_;
  StartSource source_;
  std::size_t step_cap_;
  MarkovChain start_chain_;
  std::vector<double> start_cdf_;
};

DiffEstimate delta_rho_sample(const TabularMDP& mdp, const Policy& pi, const Policy& pi_prime, StartSource source,
                              Rng& rng, std::size_t step_cap);

struct GradientSample {
  Eigen::MatrixXd gradient;  ///< |S| x |A|, nonzero only on the sampled state's row
  double q_hat = 0.0;
  std::size_t state = 0;
  std::size_t action = 0;
  std::size_t t_c = 0;
  std::uint64_t calls = 0;
};

/// Unbiased sample of d rho / d theta: s ~ mu(pi) by CFTP, a and a' ~ pi(s)
/// independently, then q_hat from paired trajectories starting with a and a'
/// (both following pi afterwards); returns q_hat * d log pi(s, a) / d theta.
class PolicyGradientSampler {
 public:
  PolicyGradientSampler(const TabularMDP& mdp, SoftmaxPolicy policy, std::size_t step_cap);

  GradientSample sample(Rng& rng) const;
  const SoftmaxPolicy& policy() const noexcept { return policy_; }

 private:
  const TabularMDP* mdp_;
  SoftmaxPolicy policy_;
  std::size_t step_cap_;
  MarkovChain chain_;
};

GradientSample policy_gradient_sample(const TabularMDP& mdp, const SoftmaxPolicy& policy, Rng& rng,
                                      std::size_t step_cap);

/// Exact d rho / d theta from the policy-gradient theorem with exact Q-values.
Eigen::MatrixXd exact_policy_gradient(const TabularMDP& mdp, const SoftmaxPolicy& policy);

}  // namespace cftp
