#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cftp/errors.hpp"
#include "cftp/model.hpp"
#include "cftp/rng.hpp"

namespace cftp {

/// A realized function S -> S: image[s] is one next-state draw for s.
struct RandomMap {
  std::vector<std::size_t> image;

  std::size_t size() const noexcept { return image.size(); }
  std::size_t operator[](std::size_t s) const { return image[s]; }
  bool is_constant() const noexcept;
  friend bool operator==(const RandomMap&, const RandomMap&) = default;
};

/// image[s] ~ P(s, .) independently across s, drawn in state order from `rng`.
RandomMap draw_random_map(const MarkovChain& chain, Rng& rng);

/// Pointwise composition (outer o inner)(s) = outer[inner[s]].
RandomMap compose(const RandomMap& outer, const RandomMap& inner);

/// Append-only sequence of maps indexed by past time: at(t) is f_{-t}, t >= 1.
class MapStore {
 public:
  void append(RandomMap map) { maps_.push_back(std::move(map)); }
  const RandomMap& at(std::size_t t) const { return maps_.at(t - 1); }
  std::size_t size() const noexcept { return maps_.size(); }

  /// F_{-depth} = f_{-1} o f_{-2} o ... o f_{-depth}, recomputed from the
  /// stored maps; the identity for depth 0.
  RandomMap composite(std::size_t depth, std::size_t n_states) const;

 private:
  std::vector<RandomMap> maps_;
};

struct CoalescenceRecord {
  std::size_t t_c = 0;       ///< steps until coalescence
  std::size_t state = 0;     ///< the coalescence state
  std::uint64_t calls = 0;   ///< generative (transition) draws consumed
};

/// Extends the past one step at a time, F_{-t} = F_{-(t-1)} o f_{-t}, until
/// the composite is constant. `map_at(t)` must return f_{-t} (by value or
/// reference); it is called exactly once per t, in increasing order, so
/// callers that store maps get each one drawn once and reused. The composite
/// is maintained incrementally: O(|S|) per step. `calls` is left at 0.
template <class MapAt>
CoalescenceRecord compose_until_constant(std::size_t n_states, MapAt&& map_at, std::size_t step_cap) {
  std::vector<std::size_t> composite(n_states);
  std::iota(composite.begin(), composite.end(), std::size_t{0});
  std::vector<std::size_t> next(n_states);
  for (std::size_t t = 1; t <= step_cap; ++t) {
    const auto& f = map_at(t);
    for (std::size_t s = 0; s < n_states; ++s) next[s] = composite[f[s]];
    composite.swap(next);
    bool constant = true;
    for (std::size_t s = 1; s < n_states && constant; ++s) constant = composite[s] == composite[0];
    if (constant) return {t, composite[0], 0};
  }
  throw StepCapExceeded("coupling from the past did not coalesce", step_cap);
}

/// f_{-t}(x) for one CFTP run: a pure function of (run seed, t, x), so maps
/// are reproducible, can be evaluated lazily, and are identical whichever
/// implementation consults them.
class PastMapSource {
 public:
  PastMapSource(const MarkovChain& chain, std::uint64_t run_seed) : chain_(&chain), seed_(run_seed) {}

  std::size_t entry(std::size_t t, std::size_t x) const noexcept {
    return chain_->next_state(x, to_unit(derive_seed(seed_, {t, x})));
  }
  RandomMap map(std::size_t t) const;

 private:
  const MarkovChain* chain_;
  std::uint64_t seed_;
};

enum class CftpMode {
  /// Every state tracked; one new map per step.
  straightforward,
  /// Forward passes from doubling depths that track only the surviving
  /// lineage representatives, drawing map entries lazily.
  representatives,
};

/// Inspection hooks for the straightforward mode.
struct CftpTrace {
  MapStore maps;                     ///< map for past time t at index t
  std::vector<RandomMap> composites; ///< incremental F_{-t} after step t
};

/// Coupling from the past on an ergodic chain. Consumes one 64-bit draw from
/// `rng` as the run seed. The returned state is an exact draw from the
/// stationary distribution. In representatives mode t_c is the doubling depth
/// at which coalescence was detected and `calls` counts distinct entries drawn;
/// the returned state is the same as the straightforward mode's for the same seed.
CoalescenceRecord cftp(const MarkovChain& chain, Rng& rng, std::size_t step_cap,
                       CftpMode mode = CftpMode::straightforward, CftpTrace* trace = nullptr);

enum class PairCoupling {
  independent,  ///< each chain draws its own transition
  shared_map,   ///< one random map per step applied to both
};

/// Runs chains from i and j forward until they occupy the same state.
CoalescenceRecord two_chain_coalesce(const MarkovChain& chain, std::size_t i, std::size_t j,
                                     PairCoupling coupling, Rng& rng, std::size_t step_cap);

/// P(s' | s) = (1 - eps) 1{s = s'} + eps / n, with zero rewards.
MarkovChain lower_bound_chain(std::size_t n_states, double epsilon);

struct GrandCouplingResult {
  std::size_t merge_time = 0;
  std::size_t final_state = 0;              ///< common state at merge_time
  std::vector<std::size_t> class_counts;    ///< classes alive after step t (index 0 = start)
  std::uint64_t calls = 0;
};

/// |S| forward chains, one per start state, driven by shared random maps;
/// chains that meet are merged (union-find over lineages).
GrandCouplingResult grand_coupling_sim(const MarkovChain& chain, Rng& rng, std::size_t step_cap);

}  // namespace cftp
