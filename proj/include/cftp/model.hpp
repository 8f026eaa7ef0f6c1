#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cftp/rng.hpp"

namespace cftp {

inline constexpr double kStochasticTol = 1e-12;

/// How reward draws are produced from a mean in [0, 1].
enum class RewardMode {
  bernoulli,      ///< R ~ Bernoulli(mean)
  deterministic,  ///< R = mean
};

/// Result of the support-graph analysis behind the ergodicity flag.
struct SupportAnalysis {
  bool irreducible = false;
  std::size_t period = 0;  ///< 0 when the graph is not irreducible
  bool ergodic() const noexcept { return irreducible && period == 1; }
};

/// Irreducibility by forward/backward reachability from state 0 (the graph has
/// a single strongly connected component iff both reach every state);
/// period as the gcd of level[u] + 1 - level[v] over the support edges of a
/// BFS tree rooted at state 0.
SupportAnalysis analyze_support(const Eigen::MatrixXd& transition);

/// Finite, row-stochastic Markov chain with a per-state reward model.
class MarkovChain {
 public:
  explicit MarkovChain(Eigen::MatrixXd transition);
  MarkovChain(Eigen::MatrixXd transition, Eigen::VectorXd reward_mean,
              RewardMode mode = RewardMode::bernoulli);

  std::size_t n_states() const noexcept { return static_cast<std::size_t>(transition_.rows()); }
  const Eigen::MatrixXd& transition() const noexcept { return transition_; }
  const Eigen::VectorXd& reward_mean() const noexcept { return reward_; }
  RewardMode reward_mode() const noexcept { return mode_; }

  const SupportAnalysis& support() const noexcept { return support_; }
  bool is_ergodic() const noexcept { return support_.ergodic(); }

  /// Next state of `s` for a uniform variate u in [0, 1), by inverse CDF.
  std::size_t next_state(std::size_t s, double u) const noexcept;
  std::size_t sample_next(std::size_t s, Rng& rng) const noexcept { return next_state(s, rng.uniform()); }
  double sample_reward(std::size_t s, Rng& rng) const noexcept;

 private:
  Eigen::MatrixXd transition_;
  Eigen::VectorXd reward_;
  RewardMode mode_;
  std::vector<double> cdf_;  // row-major cumulative rows
  SupportAnalysis support_;
};

/// Throws NotErgodicError naming `what` when the chain fails the check.
void require_ergodic(const MarkovChain& chain, const char* what);

class TabularMDP {
 public:
  /// `reward_mean` is |S| x |A|; `features` is |S| x k (k = 0 for none).
  TabularMDP(std::vector<Eigen::MatrixXd> transitions, Eigen::MatrixXd reward_mean,
             Eigen::MatrixXd features = {}, RewardMode mode = RewardMode::bernoulli);

  /// Single-action MDP with the chain's dynamics and rewards.
  static TabularMDP from_chain(const MarkovChain& chain, Eigen::MatrixXd features = {});

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return transitions_.size(); }
  std::size_t n_features() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  bool has_features() const noexcept { return features_.cols() > 0; }

  const Eigen::MatrixXd& transition(std::size_t a) const { return transitions_.at(a); }
  const std::vector<Eigen::MatrixXd>& transitions() const noexcept { return transitions_; }
  const Eigen::MatrixXd& reward_mean() const noexcept { return reward_; }
  const Eigen::MatrixXd& features() const noexcept { return features_; }
  RewardMode reward_mode() const noexcept { return mode_; }

  std::size_t next_state(std::size_t s, std::size_t a, double u) const noexcept;
  std::size_t sample_next(std::size_t s, std::size_t a, Rng& rng) const noexcept {
    return next_state(s, a, rng.uniform());
  }
  double sample_reward(std::size_t s, std::size_t a, Rng& rng) const noexcept;

 private:
  std::size_t n_states_;
  std::vector<Eigen::MatrixXd> transitions_;
  Eigen::MatrixXd reward_;
  Eigen::MatrixXd features_;
  RewardMode mode_;
  std::vector<double> cdf_;  // [a][s][s'] cumulative
};

class DeterministicPolicy {
 public:
  DeterministicPolicy() = default;
  explicit DeterministicPolicy(std::vector<std::size_t> actions) : actions_(std::move(actions)) {}
  static DeterministicPolicy constant(std::size_t n_states, std::size_t action) {
    return DeterministicPolicy(std::vector<std::size_t>(n_states, action));
  }

  std::size_t n_states() const noexcept { return actions_.size(); }
  std::size_t operator()(std::size_t s) const { return actions_[s]; }
  const std::vector<std::size_t>& actions() const noexcept { return actions_; }

  friend bool operator==(const DeterministicPolicy&, const DeterministicPolicy&) = default;

 private:
  std::vector<std::size_t> actions_;
};

class StochasticPolicy {
 public:
  /// Rows indexed by state, columns by action; each row must sum to 1.
  explicit StochasticPolicy(Eigen::MatrixXd probs);
  static StochasticPolicy from_deterministic(const DeterministicPolicy& pi, std::size_t n_actions);
  static StochasticPolicy uniform(std::size_t n_states, std::size_t n_actions);

  std::size_t n_states() const noexcept { return static_cast<std::size_t>(probs_.rows()); }
  std::size_t n_actions() const noexcept { return static_cast<std::size_t>(probs_.cols()); }
  double prob(std::size_t s, std::size_t a) const { return probs_(s, a); }
  const Eigen::MatrixXd& probs() const noexcept { return probs_; }
  std::size_t sample(std::size_t s, Rng& rng) const noexcept;

 private:
  Eigen::MatrixXd probs_;
  std::vector<double> cdf_;
};

/// Distribution over deterministic policies, drawn once at time 0.
class MixedPolicy {
 public:
  MixedPolicy(std::vector<DeterministicPolicy> members, std::vector<double> weights);
  static MixedPolicy uniform(std::vector<DeterministicPolicy> members);

  const std::vector<DeterministicPolicy>& members() const noexcept { return members_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  std::vector<DeterministicPolicy> members_;
  std::vector<double> weights_;
};

using Policy = std::variant<DeterministicPolicy, StochasticPolicy>;

std::size_t policy_n_states(const Policy& policy) noexcept;
double action_prob(const Policy& policy, std::size_t s, std::size_t a);
std::size_t sample_action(const Policy& policy, std::size_t s, Rng& rng);

/// Chain with P(x, y) = sum_a pi(a|x) P^a(x, y) and the action-marginalized
/// reward mean. The ergodicity flag of the result is computed here.
MarkovChain induce_chain(const TabularMDP& mdp, const Policy& policy);

/// Per-state reward r^pi(s) = sum_a pi(a|s) r(s, a).
Eigen::VectorXd induced_reward(const TabularMDP& mdp, const Policy& policy);

/// Monotone oracle-call counters.
class SampleLedger {
 public:
  std::uint64_t generative_calls() const noexcept { return generative_; }
  std::uint64_t expert_calls() const noexcept { return expert_; }
  void add_generative(std::uint64_t n = 1) noexcept { generative_ += n; }
  void add_expert(std::uint64_t n = 1) noexcept { expert_ += n; }
  void merge(const SampleLedger& other) noexcept {
    generative_ += other.generative_;
    expert_ += other.expert_;
  }

 private:
  std::uint64_t generative_ = 0;
  std::uint64_t expert_ = 0;
};

struct Transition {
  std::size_t next;
  double reward;
};

/// Generative-model oracle over a TabularMDP: each call returns one next-state
/// draw and one reward draw and increments the ledger by exactly one. The MDP
/// must outlive the model. Not thread-safe; use one instance per worker.
class GenerativeModel {
 public:
  GenerativeModel(const TabularMDP& mdp, std::uint64_t seed) : mdp_(&mdp), rng_(seed) {}

  Transition sample(std::size_t s, std::size_t a) {
    ledger_.add_generative();
    const std::size_t next = mdp_->sample_next(s, a, rng_);
    return {next, mdp_->sample_reward(s, a, rng_)};
  }
  std::size_t sample_next(std::size_t s, std::size_t a) {
    ledger_.add_generative();
    return mdp_->sample_next(s, a, rng_);
  }

  const TabularMDP& mdp() const noexcept { return *mdp_; }
  const SampleLedger& ledger() const noexcept { return ledger_; }
  Rng& rng() noexcept { return rng_; }

 private:
  const TabularMDP* mdp_;
  Rng rng_;
  SampleLedger ledger_;
};

}  // namespace cftp
