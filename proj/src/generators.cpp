#include "cftp/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cftp/errors.hpp"

namespace cftp {

namespace {

double exponential(Rng& rng) { return -std::log1p(-rng.uniform()); }

Eigen::VectorXd random_row(std::size_t n, std::size_t support, Rng& rng) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (support == 0 || support >= n) {
    for (std::size_t j = 0; j < n; ++j) row[static_cast<Eigen::Index>(j)] = exponential(rng) + 1e-3;
  } else {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t j = 0; j < support; ++j) {
      std::swap(idx[j], idx[j + rng.below(n - j)]);
      row[static_cast<Eigen::Index>(idx[j])] = exponential(rng) + 1e-3;
    }
  }
  return row / row.sum();
}

}  // namespace

MarkovChain example_chain() {
  Eigen::MatrixXd p(2, 2);
  p << 0.5, 0.5, 1.0, 0.0;
  return MarkovChain(p, Eigen::Vector2d(1.0, 0.0), RewardMode::deterministic);
}

MarkovChain random_ergodic_chain(std::size_t n_states, std::size_t support, Rng& rng) {
  if (n_states == 0) throw ValidationError("random_ergodic_chain: n_states must be positive");
  if (support == 1 && n_states > 1) throw ValidationError("random_ergodic_chain: support 1 cannot be ergodic");
  const auto n = static_cast<Eigen::Index>(n_states);
  const std::size_t k = support == 0 || support >= n_states ? n_states : support;
  // A random Hamiltonian cycle makes the support graph irreducible and one
  // self-loop makes it aperiodic; the rest of each row is drawn at random.
  std::vector<std::size_t> order(n_states);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t j = n_states; j > 1; --j) std::swap(order[j - 1], order[rng.below(j)]);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t pos = 0; pos < n_states; ++pos) {
    const std::size_t i = order[pos];
    std::vector<std::size_t> forced{order[(pos + 1) % n_states]};
    if (pos == 0 && forced[0] != i) forced.push_back(i);
    std::vector<std::size_t> rest;
    for (std::size_t j = 0; j < n_states; ++j) {
      if (std::find(forced.begin(), forced.end(), j) == forced.end()) rest.push_back(j);
    }
    std::vector<std::size_t> targets = forced;
    for (std::size_t j = 0; targets.size() < k; ++j) {
      std::swap(rest[j], rest[j + rng.below(rest.size() - j)]);
      targets.push_back(rest[j]);
    }
    for (std::size_t j : targets) p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = exponential(rng) + 1e-3;
    p.row(static_cast<Eigen::Index>(i)) /= p.row(static_cast<Eigen::Index>(i)).sum();
  }
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r[i] = rng.uniform();
  return MarkovChain(std::move(p), std::move(r));
}

TabularMDP random_mdp(std::size_t n_states, std::size_t n_actions, std::size_t n_features, Rng& rng) {
  if (n_states == 0 || n_actions == 0) throw ValidationError("random_mdp: need at least one state and action");
  const auto n = static_cast<Eigen::Index>(n_states);
  std::vector<Eigen::MatrixXd> transitions;
  for (std::size_t a = 0; a < n_actions; ++a) {
    Eigen::MatrixXd p(n, n);
    for (Eigen::Index i = 0; i < n; ++i) p.row(i) = random_row(n_states, 0, rng).transpose();
    transitions.push_back(std::move(p));
  }
  Eigen::MatrixXd reward(n, static_cast<Eigen::Index>(n_actions));
  for (Eigen::Index i = 0; i < reward.size(); ++i) reward.data()[i] = rng.uniform();
  Eigen::MatrixXd features(n, static_cast<Eigen::Index>(n_features));
  for (Eigen::Index i = 0; i < features.size(); ++i) features.data()[i] = rng.uniform();
  return TabularMDP(std::move(transitions), std::move(reward), std::move(features));
}

TabularMDP sparse_cycle_mdp(std::size_t n_states, double eps, std::size_t sparsity, std::size_t n_features) {
  if (n_states < 2) throw ValidationError("sparse_cycle_mdp: need at least two states");
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("sparse_cycle_mdp: eps must lie in (0, 1)");
  if (n_features == 0 || sparsity < n_features || sparsity > n_states) {
    throw ValidationError("sparse_cycle_mdp: need n_features <= sparsity <= n_states");
  }
  const auto n = static_cast<Eigen::Index>(n_states);
  Eigen::MatrixXd cycle = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) cycle(i, i + 1) = 1.0;
  cycle(n - 1, n - 1) = 1.0 - eps;
  cycle(n - 1, 0) = eps;
  Eigen::MatrixXd lazy = 0.5 * cycle + 0.5 * Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd features = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(n_features));
  for (std::size_t s = 0; s < sparsity; ++s) {
    features(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s * n_features / sparsity)) = 1.0;
  }
  return TabularMDP({cycle, lazy}, Eigen::MatrixXd::Zero(n, 2), std::move(features), RewardMode::deterministic);
}

}  // namespace cftp
