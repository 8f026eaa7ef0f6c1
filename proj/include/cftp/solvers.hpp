#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cftp/model.hpp"

namespace cftp {

/// Stationary distribution of an ergodic chain, from the dense system
/// (P^T - I) mu = 0 with its last equation replaced by sum(mu) = 1.
/// Throws NotErgodicError, or SolverError when the residual
/// ||mu^T P - mu^T||_inf exceeds 1e-10.
Eigen::VectorXd stationary_distribution(const MarkovChain& chain);

/// Half the L1 distance. Both inputs must have equal length and sum to 1.
double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Worst-start TV distance max_x TV(delta_x P^t, mu) for t = 0 .. horizon.
std::vector<double> worst_case_tv_curve(const MarkovChain& chain, std::size_t horizon);

/// Smallest t >= 0 with max_x TV(delta_x P^t, mu) <= 1/8, by exact
/// distribution iteration. Throws StepCapExceeded beyond `cap`.
std::size_t mixing_time(const MarkovChain& chain, std::size_t cap = 1'000'000);

/// rho = mu . r for the chain's reward means.
double average_reward(const MarkovChain& chain);

struct BiasSolution {
  double rho;
  Eigen::VectorXd mu;
  Eigen::VectorXd h;  ///< (I - P) h = r - rho, with mu . h = 0
  Eigen::MatrixXd q;  ///< Q(s, a) = r(s, a) - rho + sum_s' P^a(s, s') h(s')
};

/// Gain, bias and Q-values of a policy. The bias uses the fundamental matrix
/// Z = (I - P + 1 mu^T)^-1, for which h = Z (r - rho 1) satisfies mu . h = 0.
BiasSolution bias_and_q(const TabularMDP& mdp, const Policy& policy);

/// Same, with an explicit per-state reward replacing r(s, a) for every action.
BiasSolution bias_and_q(const TabularMDP& mdp, const Policy& policy, const Eigen::VectorXd& state_reward);

/// Average reward of a policy in an MDP.
double average_reward(const TabularMDP& mdp, const Policy& policy);

struct PlanningResult {
  DeterministicPolicy policy;
  double rho;
  std::size_t iterations;
};

/// Howard policy iteration for the average-reward criterion. Starts from
/// action 0 everywhere and switches an action only on strict improvement
/// (relative tolerance 1e-10); the converged policy is then canonicalised to the
/// lowest greedy action index per state. Every deterministic policy's chain
/// must be ergodic.
PlanningResult optimal_policy(const TabularMDP& mdp, const std::optional<Eigen::VectorXd>& reward_override = std::nullopt,
                              std::size_t iteration_cap = 10'000);

/// All |A|^|S| deterministic policies in lexicographic order (state 0 is the
/// most significant digit). Throws ValidationError past `limit`.
std::vector<DeterministicPolicy> enumerate_policies(const TabularMDP& mdp, std::size_t limit = 1u << 20);

}  // namespace cftp
