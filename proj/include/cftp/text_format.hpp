#pragma once

#include <iosfwd>
#include <string>

#include "cftp/model.hpp"

namespace cftp {

// Plain-text matrix format:
//
//   states n actions m features k
//   <P^0: n rows of n numbers> ... <P^(m-1)>
//   <rewards: n rows of m numbers>
//   <features: n rows of k numbers>
//   [reward bernoulli|deterministic]
//
// Reals are written with 17 significant digits, so reading back what was
// written reproduces every double exactly. The trailing reward-mode line is
// optional on input and defaults to bernoulli.

void write_mdp(std::ostream& os, const TabularMDP& mdp);
TabularMDP read_mdp(std::istream& is);

void write_chain(std::ostream& os, const MarkovChain& chain);
/// Reads a single-action document; throws ValidationError otherwise.
MarkovChain read_chain(std::istream& is);

void save_mdp(const std::string& path, const TabularMDP& mdp);
TabularMDP load_mdp(const std::string& path);

/// %.17g formatting; parses back to the identical double.
std::string format_exact(double v);

}  // namespace cftp
