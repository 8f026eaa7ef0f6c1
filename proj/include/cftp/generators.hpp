#pragma once

#include <cstddef>

#include "cftp/model.hpp"
#include "cftp/rng.hpp"

namespace cftp {

/// Two states: left moves to either state with probability 1/2, right always
/// moves left. Reward 1 on the left, 0 on the right (deterministic).
MarkovChain example_chain();

/// Random ergodic chain. Each row puts exponential weights on `support`
/// distinct targets (all states when support is 0 or >= n). The targets
/// always include the successor on a random Hamiltonian cycle, and one state
/// keeps a self-loop, so the chain is irreducible and aperiodic. Support 1
/// is rejected for n > 1. Rewards are uniform
/// means in [0, 1] with Bernoulli draws.
MarkovChain random_ergodic_chain(std::size_t n_states, std::size_t support, Rng& rng);

/// Random MDP with dense positive rows (every deterministic policy is
/// ergodic), uniform reward means and uniform features in [0, 1].
TabularMDP random_mdp(std::size_t n_states, std::size_t n_actions, std::size_t n_features, Rng& rng);

/// Cycle s_0 -> s_1 -> ... -> s_{n-1} under action 0, where s_{n-1} stays
/// with probability 1 - eps and returns to s_0 otherwise. Action 1 is lazy:
/// stay with probability 1/2, else take the action-0 transition. Feature i is
/// the indicator of a block of states; together the blocks cover the first
/// `sparsity` states, so phi is nonzero in at most `sparsity` states. Zero
/// rewards.
TabularMDP sparse_cycle_mdp(std::size_t n_states, double eps, std::size_t sparsity, std::size_t n_features);

}  // namespace cftp
