#include "cftp/apprenticeship.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cftp/errors.hpp"
#include "cftp/exact_sampling.hpp"
#include "cftp/hedge.hpp"
#include "cftp/solvers.hpp"
#include "paired_trajectories.hpp"

namespace cftp {

namespace {

void require_features(const TabularMDP& mdp, std::size_t k, const char* what) {
  if (!mdp.has_features()) throw ValidationError(std::string(what) + ": MDP has no features");
  if (k != mdp.n_features()) throw ValidationError(std::string(what) + ": k does not match the feature dimension");
}

// Feature expectations of deterministic policies, memoised by action vector.
class PhiCache {
 public:
  explicit PhiCache(const TabularMDP& mdp) : mdp_(&mdp) {}
  const Eigen::VectorXd& operator()(const DeterministicPolicy& pi) {
    auto it = cache_.find(pi.actions());
    if (it == cache_.end()) it = cache_.emplace(pi.actions(), feature_expectations_exact(*mdp_, pi)).first;
    return it->second;
  }

 private:
  const TabularMDP* mdp_;
  std::map<std::vector<std::size_t>, Eigen::VectorXd> cache_;
};

SampleLedger ledger_delta(const SampleLedger& dynamics, const SampleLedger& expert_before,
                          const SampleLedger& expert_after) {
  SampleLedger out;
  out.add_generative(dynamics.generative_calls());
  out.add_expert(expert_after.expert_calls() - expert_before.expert_calls());
  return out;
}

}  // namespace

Eigen::VectorXd feature_expectations_exact(const TabularMDP& mdp, const Policy& policy) {
  if (!mdp.has_features()) throw ValidationError("feature_expectations_exact: MDP has no features");
  const Eigen::VectorXd mu = stationary_distribution(induce_chain(mdp, policy));
  return mdp.features().transpose() * mu;
}

Eigen::VectorXd feature_expectations_exact(const TabularMDP& mdp, const MixedPolicy& policy) {
  PhiCache phi(mdp);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mdp.n_features()));
  for (std::size_t i = 0; i < policy.members().size(); ++i) out += policy.weights()[i] * phi(policy.members()[i]);
  return out;
}

ExpertFeatureEstimate estimate_expert_features(GenerativeModel& dynamics, ExpertModel& expert, std::size_t m,
                                               std::size_t step_cap) {
  const TabularMDP& mdp = dynamics.mdp();
  if (!mdp.has_features()) throw ValidationError("estimate_expert_features: MDP has no features");
  if (m == 0) throw ValidationError("estimate_expert_features: m must be positive");
  require_ergodic(induce_chain(mdp, expert.policy()), "estimate_expert_features");

  const std::size_t n = mdp.n_states();
  ExpertFeatureEstimate out;
  out.phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mdp.n_features()));
  out.states.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    MapStore store;
    auto map_at = [&](std::size_t t) -> const RandomMap& {
      RandomMap f;
      f.image.resize(n);
      for (std::size_t s = 0; s < n; ++s) f.image[s] = dynamics.sample_next(s, expert.query(s));
      store.append(std::move(f));
      return store.at(t);
    };
    const CoalescenceRecord rec = compose_until_constant(n, map_at, step_cap);
    out.states.push_back(rec.state);
    out.cftp_steps += rec.t_c;
    out.phi += mdp.features().row(static_cast<Eigen::Index>(rec.state)).transpose();
  }
  out.phi /= static_cast<double>(m);
  return out;
}

std::size_t feature_sample_size(std::size_t k, double epsilon, double delta) {
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) || k == 0) {
    throw ValidationError("feature_sample_size: need k > 0, epsilon > 0, 0 < delta < 1");
  }
  return static_cast<std::size_t>(std::ceil(2.0 * std::log(2.0 * static_cast<double>(k) / delta) / (epsilon * epsilon)));
}

MwalResult mwal(const TabularMDP& mdp, ExpertModel& expert, std::size_t k, std::size_t T, std::size_t m,
                std::uint64_t seed, const MwalOptions& options) {
  require_features(mdp, k, "mwal");
  if (T == 0) throw ValidationError("mwal: T must be positive");
  const SampleLedger expert_before = expert.ledger();
  GenerativeModel dynamics(mdp, derive_seed(seed, {1}));

  MwalResult out{MixedPolicy::uniform({DeterministicPolicy::constant(mdp.n_states(), 0)}), {}, {}, {}, 1.0, 0};
  out.expert_estimate = estimate_expert_features(dynamics, expert, m, options.step_cap).phi;

  PhiCache phi(mdp);
  HedgeState hedge = HedgeState::start(k, T);
  std::vector<DeterministicPolicy> members;
  members.reserve(T);
  out.rounds.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    MwalRound round;
    round.w = hedge.weights();
    const Eigen::VectorXd reward = mdp.features() * round.w;
    round.policy = optimal_policy(mdp, reward).policy;
    const Eigen::VectorXd& phi_t = phi(round.policy);
    round.round_reward = round.w.dot(phi_t);
    // (Phi(pi_t) - est + 1) / 2 is in [0, 1] up to rounding; clamping only
    // absorbs ulp-level drift here.
    const RescaledLoss loss = rescale_loss(phi_t - out.expert_estimate, 1.0);
    round.loss = loss.values;
    round.n_clamped = loss.n_clamped;
    out.n_clamped += loss.n_clamped;
    hedge = hedge_step(hedge, loss.values);
    members.push_back(round.policy);
    out.rounds.push_back(std::move(round));
  }
  out.mixture = MixedPolicy::uniform(std::move(members));
  out.ledger = ledger_delta(dynamics.ledger(), expert_before, expert.ledger());
  return out;
}

GameColumnSampler::GameColumnSampler(const TabularMDP& mdp, DeterministicPolicy pi_t, std::size_t step_cap)
    : mdp_(&mdp), pi_t_(std::move(pi_t)), step_cap_(step_cap) {
  if (!mdp.has_features()) throw ValidationError("game_column_sample: MDP has no features");
  mu_ = stationary_distribution(induce_chain(mdp, pi_t_));
  cdf_.resize(static_cast<std::size_t>(mu_.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mu_.size(); ++i) cdf_[static_cast<std::size_t>(i)] = acc += mu_[i];
}

GameColumnEstimate GameColumnSampler::sample(GenerativeModel& dynamics, ExpertModel& expert) const {
  const auto before = dynamics.ledger().generative_calls();
  const double u = dynamics.rng().uniform();
  const std::size_t s0 =
      std::min(static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin()), cdf_.size() - 1);

  const Eigen::MatrixXd& phi = mdp_->features();
  GameColumnEstimate out;
  out.g = Eigen::VectorXd::Zero(phi.cols());
  const std::size_t first_b = expert.query(s0);
  out.t_c = detail::run_paired(
      [&](std::size_t x, std::size_t a) { return dynamics.sample_next(x, a); }, s0, pi_t_(s0), first_b,
      [&](std::size_t x) { return expert.query(x); },
      [&](std::size_t xa, std::size_t, std::size_t xb, std::size_t) {
        out.g += (phi.row(static_cast<Eigen::Index>(xa)) - phi.row(static_cast<Eigen::Index>(xb))).transpose();
      },
      step_cap_);
  out.calls = dynamics.ledger().generative_calls() - before;
  return out;
}

GameColumnEstimate game_column_sample(const TabularMDP& mdp, GenerativeModel& dynamics, ExpertModel& expert,
                                      const DeterministicPolicy& pi_t, std::size_t step_cap) {
  return GameColumnSampler(mdp, pi_t, step_cap).sample(dynamics, expert);
}

MwalResult mwal_generative(const TabularMDP& mdp, ExpertModel& expert, std::size_t k, std::size_t T, double delta,
                           double b, std::uint64_t seed, const MwalOptions& options) {
  require_features(mdp, k, "mwal_generative");
  if (T == 0) throw ValidationError("mwal_generative: T must be positive");
  if (!(b > 0.0)) throw ValidationError("mwal_generative: b must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("mwal_generative: delta must lie in (0, 1)");
  const SampleLedger expert_before = expert.ledger();
  GenerativeModel dynamics(mdp, derive_seed(seed, {2}));

  MwalResult out{MixedPolicy::uniform({DeterministicPolicy::constant(mdp.n_states(), 0)}), {}, {}, {}, 0.0, 0};
  out.loss_bound = b * std::log(2.0 * static_cast<double>(T) * static_cast<double>(k) / delta);
  if (!(out.loss_bound > 0.0)) throw ValidationError("mwal_generative: B = b log(2Tk/delta) must be positive");

  std::map<std::vector<std::size_t>, GameColumnSampler> samplers;
  HedgeState hedge = HedgeState::start(k, T);
  std::vector<DeterministicPolicy> members;
  members.reserve(T);
  out.rounds.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    MwalRound round;
    round.w = hedge.weights();
    const Eigen::VectorXd reward = mdp.features() * round.w;
    round.policy = optimal_policy(mdp, reward).policy;
    auto it = samplers.find(round.policy.actions());
    if (it == samplers.end()) {
      it = samplers.emplace(round.policy.actions(), GameColumnSampler(mdp, round.policy, options.step_cap)).first;
    }
    round.round_reward = round.w.dot(mdp.features().transpose() * it->second.start_distribution());
    GameColumnEstimate column = it->second.sample(dynamics, expert);
    const RescaledLoss loss = rescale_loss(column.g, out.loss_bound);
    round.loss = loss.values;
    round.n_clamped = loss.n_clamped;
    round.t_c = column.t_c;
    out.n_clamped += loss.n_clamped;
    hedge = hedge_step(hedge, loss.values);
    members.push_back(round.policy);
    out.rounds.push_back(std::move(round));
  }
  out.mixture = MixedPolicy::uniform(std::move(members));
  out.ledger = ledger_delta(dynamics.ledger(), expert_before, expert.ledger());
  return out;
}

namespace {

// Convex piecewise-linear f(l) = max_j [l a_j + (1 - l) b_j]; minimum over
// [0, 1] is attained at an endpoint or at a crossing of two lines.
std::pair<double, double> min_of_upper_envelope(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  auto f = [&](double l) { return (l * a + (1.0 - l) * b).maxCoeff(); };
  std::vector<double> candidates{0.0, 1.0};
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = i + 1; j < a.size(); ++j) {
      const double denom = (a[i] - b[i]) - (a[j] - b[j]);
      if (denom == 0.0) continue;
      const double l = (b[j] - b[i]) / denom;
      if (l > 0.0 && l < 1.0) candidates.push_back(l);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (double l : candidates) {
    const double v = f(l);
    if (v < best) {
      best = v;
      arg = l;
    }
  }
  return {best, arg};
}

// max over mixtures psi of min(psi . a, psi . b); an optimal mixture needs at
// most two policies, and along each pair the objective is concave with its
// maximum at an endpoint or at the crossing.
double max_of_lower_envelope(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    best = std::max(best, std::min(a[i], b[i]));
    for (Eigen::Index j = i + 1; j < a.size(); ++j) {
      const double denom = (a[i] - a[j]) - (b[i] - b[j]);
      if (denom == 0.0) continue;
      const double alpha = (b[j] - a[j]) / denom;
      if (alpha > 0.0 && alpha < 1.0) {
        const double va = alpha * a[i] + (1.0 - alpha) * a[j];
        const double vb = alpha * b[i] + (1.0 - alpha) * b[j];
        best = std::max(best, std::min(va, vb));
      }
    }
  }
  return best;
}

// Compositions of `total` into k parts, visited in lexicographic order.
template <class Visit>
void for_each_composition(std::size_t k, std::size_t total, Visit&& visit) {
  std::vector<std::size_t> parts(k, 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t left) -> void {
    if (i + 1 == k) {
      parts[i] = left;
      visit(parts);
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      parts[i] = v;
      self(self, i + 1, left - v);
    }
  };
  rec(rec, 0, total);
}

}  // namespace

GameValue game_value_oracle(const TabularMDP& mdp, const StochasticPolicy& expert, std::size_t k) {
  require_features(mdp, k, "game_value_oracle");
  const double count = std::pow(static_cast<double>(mdp.n_actions()), static_cast<double>(mdp.n_states()));
  if (count > 256.0) throw ValidationError("game_value_oracle: more than 256 deterministic policies");

  GameValue out;
  out.policies = enumerate_policies(mdp);
  const Eigen::VectorXd expert_phi = feature_expectations_exact(mdp, expert);
  const auto n_pol = static_cast<Eigen::Index>(out.policies.size());
  out.matrix.resize(static_cast<Eigen::Index>(k), n_pol);
  for (Eigen::Index j = 0; j < n_pol; ++j) {
    out.matrix.col(j) = feature_expectations_exact(mdp, out.policies[static_cast<std::size_t>(j)]) - expert_phi;
  }

  if (k == 1) {
    out.value = out.matrix.row(0).maxCoeff();
    out.maximin = out.value;
    out.w = Eigen::VectorXd::Ones(1);
    return out;
  }
  if (k == 2) {
    const Eigen::VectorXd a = out.matrix.row(0).transpose();
    const Eigen::VectorXd b = out.matrix.row(1).transpose();
    const auto [value, lambda] = min_of_upper_envelope(a, b);
    out.value = value;
    out.w = Eigen::Vector2d(lambda, 1.0 - lambda);
    out.maximin = max_of_lower_envelope(a, b);
    return out;
  }

  // k > 2: grid over the simplex, then pairwise-exchange refinement. The
  // result is an upper bound on v* at the reported resolution.
  auto objective = [&](const Eigen::VectorXd& w) { return (w.transpose() * out.matrix).maxCoeff(); };
  std::size_t grid = 1;
  auto binom = [](double n, double r) {
    double c = 1.0;
    for (double i = 1.0; i <= r; ++i) c *= (n - r + i) / i;
    return c;
  };
  while (binom(static_cast<double>(grid + 1 + k - 1), static_cast<double>(k - 1)) <= 2e5) ++grid;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_w;
  for_each_composition(k, grid, [&](const std::vector<std::size_t>& parts) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) w[static_cast<Eigen::Index>(i)] = static_cast<double>(parts[i]) / static_cast<double>(grid);
    const double v = objective(w);
    if (v < best) {
      best = v;
      best_w = w;
    }
  });
  double h = 1.0 / static_cast<double>(grid);
  for (int level = 0; level < 30; ++level) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          if (i == j || best_w[static_cast<Eigen::Index>(j)] < h) continue;
          Eigen::VectorXd w = best_w;
          w[static_cast<Eigen::Index>(i)] += h;
          w[static_cast<Eigen::Index>(j)] -= h;
          const double v = objective(w);
          if (v < best - 1e-15) {
            best = v;
            best_w = w;
            moved = true;
          }
        }
      }
    }
    h /= 2.0;
  }
  out.value = best;
  out.w = best_w;
  out.resolution = 2.0 * h;
  out.maximin = std::numeric_limits<double>::quiet_NaN();
  return out;
}

double worst_case_margin(const Eigen::VectorXd& learner_phi, const Eigen::VectorXd& expert_phi) {
  return (learner_phi - expert_phi).minCoeff();
}

}  // namespace cftp
