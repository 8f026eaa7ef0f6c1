#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "cftp/model.hpp"

namespace cftp {

/// Black-box access to a stochastic expert: each query returns one action
/// drawn from pi^E(s) and increments expert_calls by one.
class ExpertModel {
 public:
  ExpertModel(StochasticPolicy policy, std::uint64_t seed) : policy_(std::move(policy)), rng_(seed) {}

  std::size_t query(std::size_t s) {
    ledger_.add_expert();
    return policy_.sample(s, rng_);
  }

  const StochasticPolicy& policy() const noexcept { return policy_; }
  const SampleLedger& ledger() const noexcept { return ledger_; }

 private:
  StochasticPolicy policy_;
  Rng rng_;
  SampleLedger ledger_;
};

/// Phi(pi) = sum_s mu^pi(s) phi(s). Throws ValidationError without features.
Eigen::VectorXd feature_expectations_exact(const TabularMDP& mdp, const Policy& policy);
/// psi-weighted average of the members' feature expectations.
Eigen::VectorXd feature_expectations_exact(const TabularMDP& mdp, const MixedPolicy& policy);

struct ExpertFeatureEstimate {
  Eigen::VectorXd phi;              ///< (1/m) sum_i phi(s_i)
  std::vector<std::size_t> states;  ///< the m CFTP samples s_i ~ mu(pi^E)
  std::uint64_t cftp_steps = 0;     ///< total past depth over the m runs
};

/// m independent CFTP runs on the expert-induced chain. Each map entry
/// f_{-t}(s) costs one expert query for the action and one generative call
/// for the transition; maps are drawn once per past time and reused.
ExpertFeatureEstimate estimate_expert_features(GenerativeModel& dynamics, ExpertModel& expert, std::size_t m,
                                               std::size_t step_cap = 10'000'000);

/// m = ceil(2 ln(2k/delta) / eps^2), enough for an eps-accurate estimate in
/// sup norm with probability 1 - delta (Hoeffding plus a union bound).
std::size_t feature_sample_size(std::size_t k, double epsilon, double delta);

struct MwalRound {
  Eigen::VectorXd w;            ///< Hedge weights used this round
  DeterministicPolicy policy;   ///< best response to r(s) = w . phi(s)
  double round_reward = 0.0;    ///< w . Phi(policy)
  Eigen::VectorXd loss;         ///< rescaled column estimate fed to Hedge
  std::size_t n_clamped = 0;
  std::size_t t_c = 0;          ///< coalescence steps of the column sample (generative variant)
};

struct MwalResult {
  MixedPolicy mixture;           ///< uniform over the T best responses
  std::vector<MwalRound> rounds;
  Eigen::VectorXd expert_estimate;  ///< estimated Phi^E (CFTP variant only)
  SampleLedger ledger;              ///< generative and expert calls of the run
  double loss_bound = 0.0;          ///< B of the rescaling (1 for the CFTP variant)
  std::size_t n_clamped = 0;
};

struct MwalOptions {
  std::size_t step_cap = 10'000'000;
};

/// Multiplicative-weights apprenticeship learning with the expert's feature
/// expectations estimated once from m CFTP samples; losses are
/// (Phi(pi_t) - est Phi^E + 1) / 2 and beta = sqrt(log k / T).
MwalResult mwal(const TabularMDP& mdp, ExpertModel& expert, std::size_t k, std::size_t T, std::size_t m,
                std::uint64_t seed, const MwalOptions& options = {});

struct GameColumnEstimate {
  Eigen::VectorXd g;           ///< unbiased estimate of Phi(pi_t) - Phi(pi^E)
  std::size_t t_c = 0;
  std::vector<bool> clamped;   ///< filled in once the column is rescaled
  std::uint64_t calls = 0;     ///< generative calls
};

/// Paired expert trajectories from s0 ~ mu(pi_t) (exact solve): A plays
/// pi_t(s0) and then follows the expert, B follows the expert throughout;
/// phi differences A - B are summed until the trajectories meet.
class GameColumnSampler {
 public:
  GameColumnSampler(const TabularMDP& mdp, DeterministicPolicy pi_t, std::size_t step_cap);

  GameColumnEstimate sample(GenerativeModel& dynamics, ExpertModel& expert) const;
  const Eigen::VectorXd& start_distribution() const noexcept { return mu_; }

 private:
  const TabularMDP* mdp_;
  DeterministicPolicy pi_t_;
  std::size_t step_cap_;
  Eigen::VectorXd mu_;
  std::vector<double> cdf_;
};

GameColumnEstimate game_column_sample(const TabularMDP& mdp, GenerativeModel& dynamics, ExpertModel& expert,
                                      const DeterministicPolicy& pi_t, std::size_t step_cap);

/// MWAL with direct column estimates: B = b log(2Tk/delta), each column
/// rescaled as (g + B) / 2B and clamped into [0, 1].
MwalResult mwal_generative(const TabularMDP& mdp, ExpertModel& expert, std::size_t k, std::size_t T, double delta,
                           double b, std::uint64_t seed, const MwalOptions& options = {});

struct GameValue {
  double value = 0.0;         ///< min_w max_pi w . G(., pi)
  Eigen::VectorXd w;          ///< minimizing feature weights
  double resolution = 0.0;    ///< 0 for the exact k <= 2 path; grid step otherwise
  double maximin = 0.0;       ///< max_psi min_w (k <= 2 only; NaN otherwise)
  std::vector<DeterministicPolicy> policies;
  Eigen::MatrixXd matrix;     ///< k x |Pi| game matrix G
};

/// Enumerates every deterministic policy (|A|^|S| <= 256) and computes the
/// game value of G(i, pi) = Phi(pi)[i] - Phi(pi^E)[i].
GameValue game_value_oracle(const TabularMDP& mdp, const StochasticPolicy& expert, std::size_t k);

/// min_i (Phi(psi) - Phi^E)_i, i.e. min over w in the simplex of
/// w . Phi(psi) - w . Phi^E.
double worst_case_margin(const Eigen::VectorXd& learner_phi, const Eigen::VectorXd& expert_phi);

}  // namespace cftp
