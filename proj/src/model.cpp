#include "cftp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>

#include "cftp/errors.hpp"

namespace cftp {

namespace {

void check_stochastic(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ValidationError(std::string(what) + ": transition matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double p = m(i, j);
      if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << what << ": entry (" << i << ", " << j << ") = " << p << " outside [0, 1]";
        throw ValidationError(os.str());
      }
    }
    const double sum = m.row(i).sum();
    if (std::abs(sum - 1.0) > kStochasticTol) {
      std::ostringstream os;
      os.precision(17);
      os << what << ": row " << i << " sums to " << sum;
      throw ValidationError(os.str());
    }
  }
}

void check_unit_interval(const Eigen::MatrixXd& m, const char* what) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double v = m.data()[i];
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(what) + " must lie in [0, 1]");
  }
}

void append_cdf(const Eigen::MatrixXd& m, std::vector<double>& out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      acc += m(i, j);
      out.push_back(acc);
    }
  }
}

// First index whose cumulative mass exceeds u; the last index with positive
// mass absorbs rounding at the top of the row.
std::size_t invert_cdf(const double* cdf, std::size_t n, double u) noexcept {
  const double* it = std::upper_bound(cdf, cdf + n, u);
  std::size_t idx = static_cast<std::size_t>(it - cdf);
  if (idx >= n) {
    idx = n - 1;
    while (idx > 0 && cdf[idx] == cdf[idx - 1]) --idx;
  }
  return idx;
}

double draw_reward(double mean, RewardMode mode, Rng& rng) noexcept {
  if (mode == RewardMode::deterministic) return mean;
  return rng.uniform() < mean ? 1.0 : 0.0;
}

}  // namespace

SupportAnalysis analyze_support(const Eigen::MatrixXd& p) {
  const auto n = static_cast<std::size_t>(p.rows());
  SupportAnalysis out;
  if (n == 0) return out;

  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        const double w = forward ? p(u, v) : p(v, u);
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  out.irreducible = reach(true) && reach(false);
  if (!out.irreducible) return out;

  std::vector<long> level(n, -1);
  std::queue<std::size_t> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    for (std::size_t v = 0; v < n; ++v) {
      if (p(u, v) > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      }
    }
  }
  long g = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (p(u, v) > 0.0) g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
    }
  }
  out.period = static_cast<std::size_t>(g);
  return out;
}

MarkovChain::MarkovChain(Eigen::MatrixXd transition)
    : MarkovChain(transition, Eigen::VectorXd::Zero(transition.rows()), RewardMode::deterministic) {}

MarkovChain::MarkovChain(Eigen::MatrixXd transition, Eigen::VectorXd reward_mean, RewardMode mode)
    : transition_(std::move(transition)), reward_(std::move(reward_mean)), mode_(mode) {
  check_stochastic(transition_, "MarkovChain");
  if (reward_.size() != transition_.rows()) throw ValidationError("MarkovChain: reward length != n_states");
  check_unit_interval(reward_, "MarkovChain: reward means");
  cdf_.reserve(static_cast<std::size_t>(transition_.size()));
  append_cdf(transition_, cdf_);
  support_ = analyze_support(transition_);
}

std::size_t MarkovChain::next_state(std::size_t s, double u) const noexcept {
  const std::size_t n = n_states();
  return invert_cdf(cdf_.data() + s * n, n, u);
}

double MarkovChain::sample_reward(std::size_t s, Rng& rng) const noexcept {
  return draw_reward(reward_[static_cast<Eigen::Index>(s)], mode_, rng);
}

void require_ergodic(const MarkovChain& chain, const char* what) {
  if (chain.is_ergodic()) return;
  const auto& sa = chain.support();
  std::string why = sa.irreducible ? "periodic (period " + std::to_string(sa.period) + ")" : "not irreducible";
  throw NotErgodicError(std::string(what) + ": chain is " + why);
}

TabularMDP::TabularMDP(std::vector<Eigen::MatrixXd> transitions, Eigen::MatrixXd reward_mean,
                       Eigen::MatrixXd features, RewardMode mode)
    : transitions_(std::move(transitions)),
      reward_(std::move(reward_mean)),
      features_(std::move(features)),
      mode_(mode) {
  if (transitions_.empty()) throw ValidationError("TabularMDP: at least one action required");
  n_states_ = static_cast<std::size_t>(transitions_.front().rows());
  for (const auto& p : transitions_) {
    if (static_cast<std::size_t>(p.rows()) != n_states_) throw ValidationError("TabularMDP: action matrices differ in size");
    check_stochastic(p, "TabularMDP");
  }
  if (static_cast<std::size_t>(reward_.rows()) != n_states_ ||
      static_cast<std::size_t>(reward_.cols()) != transitions_.size()) {
    throw ValidationError("TabularMDP: reward must be n_states x n_actions");
  }
  check_unit_interval(reward_, "TabularMDP: reward means");
  if (features_.size() == 0) {
    features_.resize(static_cast<Eigen::Index>(n_states_), 0);
  } else if (static_cast<std::size_t>(features_.rows()) != n_states_) {
    throw ValidationError("TabularMDP: features must have n_states rows");
  }
  check_unit_interval(features_, "TabularMDP: features");
  cdf_.reserve(n_states_ * n_states_ * transitions_.size());
  for (const auto& p : transitions_) append_cdf(p, cdf_);
}

TabularMDP TabularMDP::from_chain(const MarkovChain& chain, Eigen::MatrixXd features) {
  return TabularMDP({chain.transition()}, chain.reward_mean(), std::move(features), chain.reward_mode());
}

std::size_t TabularMDP::next_state(std::size_t s, std::size_t a, double u) const noexcept {
  const std::size_t n = n_states_;
  return invert_cdf(cdf_.data() + (a * n + s) * n, n, u);
}

double TabularMDP::sample_reward(std::size_t s, std::size_t a, Rng& rng) const noexcept {
  return draw_reward(reward_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)), mode_, rng);
}

StochasticPolicy::StochasticPolicy(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.rows() == 0 || probs_.cols() == 0) throw ValidationError("StochasticPolicy: empty table");
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    if ((probs_.row(s).array() < 0.0).any() || std::abs(probs_.row(s).sum() - 1.0) > kStochasticTol) {
      throw ValidationError("StochasticPolicy: row " + std::to_string(s) + " is not a distribution");
    }
  }
  append_cdf(probs_, cdf_);
}

StochasticPolicy StochasticPolicy::from_deterministic(const DeterministicPolicy& pi, std::size_t n_actions) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pi.n_states()), static_cast<Eigen::Index>(n_actions));
  for (std::size_t s = 0; s < pi.n_states(); ++s) {
    if (pi(s) >= n_actions) throw ValidationError("StochasticPolicy: action index out of range");
    m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(pi(s))) = 1.0;
  }
  return StochasticPolicy(std::move(m));
}

StochasticPolicy StochasticPolicy::uniform(std::size_t n_states, std::size_t n_actions) {
  return StochasticPolicy(Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_actions),
                                                    1.0 / static_cast<double>(n_actions)));
}

std::size_t StochasticPolicy::sample(std::size_t s, Rng& rng) const noexcept {
  const std::size_t k = n_actions();
  return invert_cdf(cdf_.data() + s * k, k, rng.uniform());
}

MixedPolicy::MixedPolicy(std::vector<DeterministicPolicy> members, std::vector<double> weights)
    : members_(std::move(members)), weights_(std::move(weights)) {
  if (members_.empty() || members_.size() != weights_.size()) throw ValidationError("MixedPolicy: members/weights mismatch");
  double sum = 0.0;
  for (double w : weights_) {
    if (w < 0.0) throw ValidationError("MixedPolicy: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kStochasticTol) throw ValidationError("MixedPolicy: weights do not sum to 1");
}

MixedPolicy MixedPolicy::uniform(std::vector<DeterministicPolicy> members) {
  const std::size_t n = members.size();
  if (n == 0) throw ValidationError("MixedPolicy: no members");
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  // Absorb the rounding of 1/n into the last weight so the sum is exactly 1.
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) head += w[i];
  w.back() = 1.0 - head;
  return MixedPolicy(std::move(members), std::move(w));
}

std::size_t policy_n_states(const Policy& policy) noexcept {
  return std::visit([](const auto& p) { return p.n_states(); }, policy);
}

double action_prob(const Policy& policy, std::size_t s, std::size_t a) {
  if (const auto* det = std::get_if<DeterministicPolicy>(&policy)) return (*det)(s) == a ? 1.0 : 0.0;
  return std::get<StochasticPolicy>(policy).prob(s, a);
}

std::size_t sample_action(const Policy& policy, std::size_t s, Rng& rng) {
  if (const auto* det = std::get_if<DeterministicPolicy>(&policy)) return (*det)(s);
  return std::get<StochasticPolicy>(policy).sample(s, rng);
}

namespace {

void check_policy_dims(const TabularMDP& mdp, const Policy& policy) {
  if (policy_n_states(policy) != mdp.n_states()) throw ValidationError("policy/MDP state count mismatch");
  if (const auto* det = std::get_if<DeterministicPolicy>(&policy)) {
    for (std::size_t a : det->actions()) {
      if (a >= mdp.n_actions()) throw ValidationError("policy action index out of range");
    }
  } else if (std::get<StochasticPolicy>(policy).n_actions() != mdp.n_actions()) {
    throw ValidationError("policy/MDP action count mismatch");
  }
}

}  // namespace

Eigen::VectorXd induced_reward(const TabularMDP& mdp, const Policy& policy) {
  check_policy_dims(mdp, policy);
  const auto n = static_cast<Eigen::Index>(mdp.n_states());
  Eigen::VectorXd r(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    if (const auto* det = std::get_if<DeterministicPolicy>(&policy)) {
      r[s] = mdp.reward_mean()(s, static_cast<Eigen::Index>((*det)(static_cast<std::size_t>(s))));
    } else {
      r[s] = std::get<StochasticPolicy>(policy).probs().row(s).dot(mdp.reward_mean().row(s));
    }
  }
  return r;
}

MarkovChain induce_chain(const TabularMDP& mdp, const Policy& policy) {
  check_policy_dims(mdp, policy);
  const auto n = static_cast<Eigen::Index>(mdp.n_states());
  Eigen::MatrixXd p(n, n);
  if (const auto* det = std::get_if<DeterministicPolicy>(&policy)) {
    for (Eigen::Index s = 0; s < n; ++s) p.row(s) = mdp.transition((*det)(static_cast<std::size_t>(s))).row(s);
  } else {
    const auto& probs = std::get<StochasticPolicy>(policy).probs();
    p.setZero();
    for (Eigen::Index s = 0; s < n; ++s) {
      for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
        const double w = probs(s, static_cast<Eigen::Index>(a));
        if (w > 0.0) p.row(s) += w * mdp.transition(a).row(s);
      }
      // Mixed rows may drift from 1 by a few ulps; renormalise so the
      // induced chain passes the same stochasticity check as its inputs.
      p.row(s) /= p.row(s).sum();
    }
  }
  Eigen::VectorXd r = induced_reward(mdp, policy);
  r = r.cwiseMax(0.0).cwiseMin(1.0);
  return MarkovChain(std::move(p), std::move(r), mdp.reward_mode());
}

}  // namespace cftp
