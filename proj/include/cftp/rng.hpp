#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

namespace cftp {

/// SplitMix64 finalizer. Used both as a seed expander and as the mixing step of
/// the counter-based stream derivation below.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a path of stream indices, e.g.
/// derive_seed(master, {replicate, past_time}). Distinct paths give
/// statistically independent streams; the mapping is a pure function.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::span<const std::uint64_t> path) noexcept {
  std::uint64_t h = splitmix64(parent ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x3c6ef372fe94f82bULL));
  return h;
}
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) noexcept {
  return derive_seed(parent, std::span<const std::uint64_t>(path.begin(), path.size()));
}

/// Maps 64 random bits to a double in [0, 1) with 53 bits of resolution.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// xoshiro256** generator. All distributions used in this library are derived
/// from next_u64() by the helpers below so that streams are bit-reproducible
/// across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept {
    std::uint64_t x = seed;
    for (auto& w : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      w = splitmix64(x);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform() noexcept { return to_unit(next_u64()); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Index drawn from a probability vector by inverse CDF.
  std::size_t categorical(std::span<const double> probs) noexcept {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.empty() ? 0 : probs.size() - 1;
  }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) noexcept {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

  /// Child generator for a stream index; does not advance this generator.
  Rng split(std::uint64_t stream) const noexcept { return Rng(derive_seed(s_[0] ^ rotl(s_[2], 17), {stream})); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace cftp
