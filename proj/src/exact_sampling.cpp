#include "cftp/exact_sampling.hpp"

#include <algorithm>
#include <unordered_map>

#include "cftp/union_find.hpp"

namespace cftp {

bool RandomMap::is_constant() const noexcept {
  return std::all_of(image.begin(), image.end(), [&](std::size_t v) { return v == image.front(); });
}

RandomMap draw_random_map(const MarkovChain& chain, Rng& rng) {
  RandomMap f;
  f.image.resize(chain.n_states());
  for (std::size_t s = 0; s < chain.n_states(); ++s) f.image[s] = chain.sample_next(s, rng);
  return f;
}

RandomMap compose(const RandomMap& outer, const RandomMap& inner) {
  RandomMap out;
  out.image.resize(inner.size());
  for (std::size_t s = 0; s < inner.size(); ++s) out.image[s] = outer[inner[s]];
  return out;
}

RandomMap MapStore::composite(std::size_t depth, std::size_t n_states) const {
  RandomMap f;
  f.image.resize(n_states);
  std::iota(f.image.begin(), f.image.end(), std::size_t{0});
  // Apply the oldest map first: s -> f_{-depth}(s) -> ... -> f_{-1}(.).
  for (std::size_t s = 0; s < n_states; ++s) {
    std::size_t x = s;
    for (std::size_t t = depth; t >= 1; --t) x = at(t)[x];
    f.image[s] = x;
  }
  return f;
}

RandomMap PastMapSource::map(std::size_t t) const {
  RandomMap f;
  f.image.resize(chain_->n_states());
  for (std::size_t x = 0; x < f.image.size(); ++x) f.image[x] = entry(t, x);
  return f;
}

namespace {

CoalescenceRecord cftp_representatives(const MarkovChain& chain, const PastMapSource& source, std::size_t step_cap) {
  const std::size_t n = chain.n_states();
  std::unordered_map<std::uint64_t, std::size_t> drawn;
  auto entry = [&](std::size_t t, std::size_t x) {
    const std::uint64_t key = static_cast<std::uint64_t>(t) * n + x;
    auto it = drawn.find(key);
    if (it != drawn.end()) return it->second;
    const std::size_t v = source.entry(t, x);
    drawn.emplace(key, v);
    return v;
  };

  std::vector<std::size_t> lineages;
  std::vector<char> occupied(n);
  for (std::size_t depth = 1;; depth *= 2) {
    const std::size_t d = std::min(depth, step_cap);
    lineages.resize(n);
    std::iota(lineages.begin(), lineages.end(), std::size_t{0});
    for (std::size_t t = d; t >= 1; --t) {
      // Advance one representative per occupied state, then drop duplicates.
      std::fill(occupied.begin(), occupied.end(), 0);
      std::size_t kept = 0;
      for (std::size_t x : lineages) {
        const std::size_t y = entry(t, x);
        if (!occupied[y]) {
          occupied[y] = 1;
          lineages[kept++] = y;
        }
      }
      lineages.resize(kept);
    }
    if (lineages.size() == 1) return {d, lineages.front(), drawn.size()};
    if (d == step_cap) break;
  }
  throw StepCapExceeded("coupling from the past did not coalesce", step_cap);
}

}  // namespace

CoalescenceRecord cftp(const MarkovChain& chain, Rng& rng, std::size_t step_cap, CftpMode mode, CftpTrace* trace) {
  require_ergodic(chain, "cftp");
  const PastMapSource source(chain, rng.next_u64());
  const std::size_t n = chain.n_states();
  if (mode == CftpMode::representatives) return cftp_representatives(chain, source, step_cap);

  MapStore local;
  MapStore& store = trace ? trace->maps : local;
  auto map_at = [&](std::size_t t) -> const RandomMap& {
    if (t > store.size()) store.append(source.map(t));
    return store.at(t);
  };
  CoalescenceRecord rec;
  if (trace) {
    // Re-run the incremental composition while recording each composite.
    RandomMap composite;
    composite.image.resize(n);
    std::iota(composite.image.begin(), composite.image.end(), std::size_t{0});
    for (std::size_t t = 1;; ++t) {
      if (t > step_cap) throw StepCapExceeded("coupling from the past did not coalesce", step_cap);
      composite = compose(composite, map_at(t));
      trace->composites.push_back(composite);
      if (composite.is_constant()) {
        rec = {t, composite[0], 0};
        break;
      }
    }
  } else {
    rec = compose_until_constant(n, map_at, step_cap);
  }
  rec.calls = static_cast<std::uint64_t>(rec.t_c) * n;
  return rec;
}

CoalescenceRecord two_chain_coalesce(const MarkovChain& chain, std::size_t i, std::size_t j, PairCoupling coupling,
                                     Rng& rng, std::size_t step_cap) {
  require_ergodic(chain, "two_chain_coalesce");
  const std::size_t n = chain.n_states();
  if (i >= n || j >= n) throw ValidationError("two_chain_coalesce: start state out of range");
  CoalescenceRecord rec;
  std::size_t x = i;
  std::size_t y = j;
  while (x != y) {
    if (rec.t_c == step_cap) throw StepCapExceeded("two_chain_coalesce: chains did not meet", step_cap);
    if (coupling == PairCoupling::independent) {
      x = chain.sample_next(x, rng);
      y = chain.sample_next(y, rng);
      rec.calls += 2;
    } else {
      const RandomMap f = draw_random_map(chain, rng);
      x = f[x];
      y = f[y];
      rec.calls += n;
    }
    ++rec.t_c;
  }
  rec.state = x;
  return rec;
}

MarkovChain lower_bound_chain(std::size_t n_states, double epsilon) {
  if (n_states == 0) throw ValidationError("lower_bound_chain: n_states must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("lower_bound_chain: epsilon must lie in (0, 1)");
  const auto n = static_cast<Eigen::Index>(n_states);
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(n, n, epsilon / static_cast<double>(n_states));
  p.diagonal().array() += 1.0 - epsilon;
  return MarkovChain(std::move(p));
}

GrandCouplingResult grand_coupling_sim(const MarkovChain& chain, Rng& rng, std::size_t step_cap) {
  require_ergodic(chain, "grand_coupling_sim");
  const std::size_t n = chain.n_states();
  GrandCouplingResult out;
  out.class_counts.push_back(n);

  DisjointSets classes(n);
  std::vector<std::size_t> position(n);  // indexed by lineage root
  std::iota(position.begin(), position.end(), std::size_t{0});
  std::vector<std::size_t> roots(n);
  std::iota(roots.begin(), roots.end(), std::size_t{0});
  std::vector<std::size_t> owner(n);
  std::vector<char> has_owner(n);

  while (roots.size() > 1) {
    if (out.merge_time == step_cap) throw StepCapExceeded("grand_coupling_sim: chains did not merge", step_cap);
    const RandomMap f = draw_random_map(chain, rng);
    out.calls += n;
    ++out.merge_time;
    std::fill(has_owner.begin(), has_owner.end(), 0);
    std::vector<std::size_t> survivors;
    survivors.reserve(roots.size());
    for (std::size_t r : roots) {
      const std::size_t y = f[position[r]];
      if (has_owner[y]) {
        const std::size_t keep = classes.unite(owner[y], r);
        position[keep] = y;
        owner[y] = keep;
      } else {
        has_owner[y] = 1;
        owner[y] = r;
        position[r] = y;
      }
    }
    for (std::size_t y = 0; y < n; ++y) {
      if (has_owner[y]) survivors.push_back(classes.find(owner[y]));
    }
    roots.swap(survivors);
    out.class_counts.push_back(roots.size());
  }
  out.final_state = position[roots.front()];
  return out;
}

}  // namespace cftp
