#pragma once

#include <cstddef>

#include "cftp/errors.hpp"

namespace cftp::detail {

// Two trajectories from s0. The first synchronized step uses the given first
// actions, later steps use follow(state). on_step(xa, aa, xb, ab) runs before
// each pair of transitions; step(x, a) draws one next state, independently for
// each trajectory. Returns the number of steps until both trajectories occupy
// the same state.
template <class Step, class Follow, class OnStep>
std::size_t run_paired(Step&& step, std::size_t s0, std::size_t first_a, std::size_t first_b, Follow&& follow,
                       OnStep&& on_step, std::size_t step_cap) {
  std::size_t xa = s0;
  std::size_t xb = s0;
  std::size_t aa = first_a;
  std::size_t ab = first_b;
  for (std::size_t t = 1; t <= step_cap; ++t) {
    on_step(xa, aa, xb, ab);
    xa = step(xa, aa);
    xb = step(xb, ab);
    if (xa == xb) return t;
    aa = follow(xa);
    ab = follow(xb);
  }
  throw StepCapExceeded("paired trajectories did not coalesce", step_cap);
}

}  // namespace cftp::detail
