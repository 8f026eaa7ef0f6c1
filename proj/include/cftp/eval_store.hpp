#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cftp/model.hpp"

namespace cftp {

/// Append-only matrix of generative samples. Row t (1-based) holds, for every
/// column s * |A| + a, one next-state draw s' ~ P^a(s, .) and one reward draw
/// from R(s, a). Row t is filled from its own stream derive_seed(seed, {t}),
/// so a store reloaded from disk keeps growing exactly as the original would.
/// Single writer: growth during evaluation makes concurrent use unsupported.
class SampleMatrix {
 public:
  SampleMatrix(const TabularMDP& mdp, std::uint64_t seed);

  std::size_t rows() const noexcept { return n_rows_; }
  std::size_t n_columns() const noexcept { return n_columns_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const TabularMDP& mdp() const noexcept { return *mdp_; }
  const SampleLedger& ledger() const noexcept { return ledger_; }

  /// Appends rows until there are at least `n`; |S| |A| calls per row.
  void grow_to(std::size_t n);
  void append_row() { grow_to(n_rows_ + 1); }

  std::size_t next_state(std::size_t t, std::size_t s, std::size_t a) const {
    return next_.at(index(t, s, a));
  }
  double reward(std::size_t t, std::size_t s, std::size_t a) const { return reward_.at(index(t, s, a)); }

  /// Row t restricted to the columns (s, pi(s)).
  std::vector<std::size_t> restricted_map(std::size_t t, const DeterministicPolicy& pi) const;

  /// Text form: a header line `store states n actions m rows R seed X`, then
  /// one line of |S||A| next-state indices and one line of |S||A| rewards
  /// (17 significant digits) per row.
  void write(std::ostream& os) const;
  static SampleMatrix read(std::istream& is, const TabularMDP& mdp);
  void save(const std::string& path) const;
  static SampleMatrix load(const std::string& path, const TabularMDP& mdp);

 private:
  std::size_t index(std::size_t t, std::size_t s, std::size_t a) const;

  const TabularMDP* mdp_;
  std::uint64_t seed_;
  std::size_t n_columns_;
  std::size_t n_rows_ = 0;
  std::vector<std::size_t> next_;
  std::vector<double> reward_;
  SampleLedger ledger_;
};

struct PolicySample {
  double reward = 0.0;        ///< unbiased sample of rho(pi)
  std::size_t state = 0;      ///< coalescence state
  std::size_t t_c = 0;        ///< rows consumed
  std::size_t rows_added = 0; ///< rows appended by this call
};

/// CFTP on the chain induced by pi using row t as f_{-t}, growing the store
/// one row at a time when the existing rows have not coalesced. Returns the
/// reward stored at row t_c, column (state, pi(state)).
PolicySample evaluate_policy(SampleMatrix& store, const DeterministicPolicy& pi, std::size_t step_cap = 10'000'000);

/// n = ceil(log(n_policies / delta) / eps^2).
std::size_t ensemble_size(double epsilon, double delta, std::size_t n_policies);

/// n independent stores; copy i draws from derive_seed(seed, {i}).
class StoreEnsemble {
 public:
  StoreEnsemble(const TabularMDP& mdp, std::size_t n_copies, std::uint64_t seed);

  std::size_t size() const noexcept { return copies_.size(); }
  SampleMatrix& copy(std::size_t i) { return copies_.at(i); }
  const SampleMatrix& copy(std::size_t i) const { return copies_.at(i); }
  /// Generative calls summed over copies.
  std::uint64_t generative_calls() const noexcept;

 private:
  std::vector<SampleMatrix> copies_;
};

struct EnsembleEstimates {
  std::vector<double> estimates;  ///< per policy, the mean over copies
  std::uint64_t generative_calls = 0;
};

/// One sample per (copy, policy); each estimate is the mean over copies.
EnsembleEstimates estimate_all(StoreEnsemble& ensemble, const std::vector<DeterministicPolicy>& policies,
                               std::size_t step_cap = 10'000'000);

/// Baseline without sharing: n fresh CFTP runs per policy, each map costing
/// |S| generative calls (next state and reward from the same call).
EnsembleEstimates estimate_fresh(const TabularMDP& mdp, const std::vector<DeterministicPolicy>& policies,
                                 std::size_t n, std::uint64_t seed, std::size_t step_cap = 10'000'000);

}  // namespace cftp
