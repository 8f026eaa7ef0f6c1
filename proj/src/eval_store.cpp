#include "cftp/eval_store.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cftp/errors.hpp"
#include "cftp/exact_sampling.hpp"
#include "cftp/text_format.hpp"

namespace cftp {

SampleMatrix::SampleMatrix(const TabularMDP& mdp, std::uint64_t seed)
    : mdp_(&mdp), seed_(seed), n_columns_(mdp.n_states() * mdp.n_actions()) {}

std::size_t SampleMatrix::index(std::size_t t, std::size_t s, std::size_t a) const {
  if (t == 0 || t > n_rows_) throw ValidationError("SampleMatrix: row out of range");
  if (s >= mdp_->n_states() || a >= mdp_->n_actions()) throw ValidationError("SampleMatrix: column out of range");
  return (t - 1) * n_columns_ + s * mdp_->n_actions() + a;
}

void SampleMatrix::grow_to(std::size_t n) {
  const std::size_t n_actions = mdp_->n_actions();
  next_.reserve(n * n_columns_);
  reward_.reserve(n * n_columns_);
  while (n_rows_ < n) {
    ++n_rows_;
    Rng rng(derive_seed(seed_, {n_rows_}));
    for (std::size_t s = 0; s < mdp_->n_states(); ++s) {
      for (std::size_t a = 0; a < n_actions; ++a) {
        next_.push_back(mdp_->sample_next(s, a, rng));
        reward_.push_back(mdp_->sample_reward(s, a, rng));
      }
    }
    ledger_.add_generative(n_columns_);
  }
}

std::vector<std::size_t> SampleMatrix::restricted_map(std::size_t t, const DeterministicPolicy& pi) const {
  std::vector<std::size_t> f(mdp_->n_states());
  for (std::size_t s = 0; s < f.size(); ++s) f[s] = next_state(t, s, pi(s));
  return f;
}

void SampleMatrix::write(std::ostream& os) const {
  os << "store states " << mdp_->n_states() << " actions " << mdp_->n_actions() << " rows " << n_rows_ << " seed "
     << seed_ << '\n';
  for (std::size_t t = 0; t < n_rows_; ++t) {
    for (std::size_t c = 0; c < n_columns_; ++c) os << (c ? " " : "") << next_[t * n_columns_ + c];
    os << '\n';
    for (std::size_t c = 0; c < n_columns_; ++c) os << (c ? " " : "") << format_exact(reward_[t * n_columns_ + c]);
    os << '\n';
  }
}

SampleMatrix SampleMatrix::read(std::istream& is, const TabularMDP& mdp) {
  std::string tag[5];
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::size_t n_rows = 0;
  std::uint64_t seed = 0;
  is >> tag[0] >> tag[1] >> n_states >> tag[2] >> n_actions >> tag[3] >> n_rows >> tag[4] >> seed;
  if (!is || tag[0] != "store" || tag[1] != "states" || tag[2] != "actions" || tag[3] != "rows" || tag[4] != "seed") {
    throw ValidationError("SampleMatrix::read: malformed header");
  }
  if (n_states != mdp.n_states() || n_actions != mdp.n_actions()) {
    throw ValidationError("SampleMatrix::read: store shape does not match the MDP");
  }
  SampleMatrix store(mdp, seed);
  const std::size_t total = n_rows * store.n_columns_;
  store.next_.resize(total);
  store.reward_.resize(total);
  for (std::size_t t = 0; t < n_rows; ++t) {
    for (std::size_t c = 0; c < store.n_columns_; ++c) {
      if (!(is >> store.next_[t * store.n_columns_ + c]) || store.next_[t * store.n_columns_ + c] >= n_states) {
        throw ValidationError("SampleMatrix::read: bad next-state entry");
      }
    }
    for (std::size_t c = 0; c < store.n_columns_; ++c) {
      std::string token;
      if (!(is >> token)) throw ValidationError("SampleMatrix::read: truncated reward row");
      try {
        store.reward_[t * store.n_columns_ + c] = std::stod(token);
      } catch (const std::exception&) {
        throw ValidationError("SampleMatrix::read: bad reward entry");
      }
    }
  }
  store.n_rows_ = n_rows;
  store.ledger_.add_generative(total);
  return store;
}

void SampleMatrix::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write(os);
}

SampleMatrix SampleMatrix::load(const std::string& path, const TabularMDP& mdp) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read(is, mdp);
}

PolicySample evaluate_policy(SampleMatrix& store, const DeterministicPolicy& pi, std::size_t step_cap) {
  const TabularMDP& mdp = store.mdp();
  if (pi.n_states() != mdp.n_states()) throw ValidationError("evaluate_policy: policy size mismatch");
  require_ergodic(induce_chain(mdp, pi), "evaluate_policy");
  const std::size_t before = store.rows();
  RandomMap f;
  auto map_at = [&](std::size_t t) -> const RandomMap& {
    if (t > store.rows()) store.append_row();
    f.image = store.restricted_map(t, pi);
    return f;
  };
  const CoalescenceRecord rec = compose_until_constant(mdp.n_states(), map_at, step_cap);
  PolicySample out;
  out.state = rec.state;
  out.t_c = rec.t_c;
  out.reward = store.reward(rec.t_c, rec.state, pi(rec.state));
  out.rows_added = store.rows() - before;
  return out;
}

std::size_t ensemble_size(double epsilon, double delta, std::size_t n_policies) {
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) || n_policies == 0) {
    throw ValidationError("ensemble_size: need epsilon > 0, 0 < delta < 1, at least one policy");
  }
  const double n = std::ceil(std::log(static_cast<double>(n_policies) / delta) / (epsilon * epsilon));
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

StoreEnsemble::StoreEnsemble(const TabularMDP& mdp, std::size_t n_copies, std::uint64_t seed) {
  if (n_copies == 0) throw ValidationError("StoreEnsemble: need at least one copy");
  copies_.reserve(n_copies);
  for (std::size_t i = 0; i < n_copies; ++i) copies_.emplace_back(mdp, derive_seed(seed, {i}));
}

std::uint64_t StoreEnsemble::generative_calls() const noexcept {
  std::uint64_t total = 0;
  for (const auto& c : copies_) total += c.ledger().generative_calls();
  return total;
}

EnsembleEstimates estimate_all(StoreEnsemble& ensemble, const std::vector<DeterministicPolicy>& policies,
                               std::size_t step_cap) {
  EnsembleEstimates out;
  out.estimates.assign(policies.size(), 0.0);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    for (std::size_t p = 0; p < policies.size(); ++p) {
      out.estimates[p] += evaluate_policy(ensemble.copy(i), policies[p], step_cap).reward;
    }
  }
  for (double& e : out.estimates) e /= static_cast<double>(ensemble.size());
  out.generative_calls = ensemble.generative_calls();
  return out;
}

EnsembleEstimates estimate_fresh(const TabularMDP& mdp, const std::vector<DeterministicPolicy>& policies,
                                 std::size_t n, std::uint64_t seed, std::size_t step_cap) {
  if (n == 0) throw ValidationError("estimate_fresh: n must be positive");
  EnsembleEstimates out;
  out.estimates.assign(policies.size(), 0.0);
  const std::size_t n_states = mdp.n_states();
  for (std::size_t p = 0; p < policies.size(); ++p) {
    const DeterministicPolicy& pi = policies[p];
    require_ergodic(induce_chain(mdp, pi), "estimate_fresh");
    GenerativeModel model(mdp, derive_seed(seed, {p}));
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<RandomMap> maps;
      std::vector<std::vector<double>> rewards;
      auto map_at = [&](std::size_t) -> const RandomMap& {
        RandomMap f;
        f.image.resize(n_states);
        std::vector<double> r(n_states);
        for (std::size_t s = 0; s < n_states; ++s) {
          const Transition tr = model.sample(s, pi(s));
          f.image[s] = tr.next;
          r[s] = tr.reward;
        }
        maps.push_back(std::move(f));
        rewards.push_back(std::move(r));
        return maps.back();
      };
      const CoalescenceRecord rec = compose_until_constant(n_states, map_at, step_cap);
      out.estimates[p] += rewards[rec.t_c - 1][rec.state];
    }
    out.estimates[p] /= static_cast<double>(n);
    out.generative_calls += model.ledger().generative_calls();
  }
  return out;
}

}  // namespace cftp
