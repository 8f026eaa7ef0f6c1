#include "cftp/hedge.hpp"

#include <algorithm>
#include <cmath>

#include "cftp/errors.hpp"

namespace cftp {

HedgeState::HedgeState(std::size_t k, double beta)
    : log_weights_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k))), beta_(beta) {
  if (k == 0) throw ValidationError("HedgeState: need at least one expert");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("HedgeState: learning rate must be finite and >= 0");
}

HedgeState HedgeState::start(std::size_t k, std::size_t horizon) {
  if (horizon == 0) throw ValidationError("HedgeState: horizon must be positive");
  return HedgeState(k, std::sqrt(std::log(static_cast<double>(k)) / static_cast<double>(horizon)));
}

Eigen::VectorXd HedgeState::weights() const {
  const double top = log_weights_.maxCoeff();
  Eigen::VectorXd w = (log_weights_.array() - top).exp().matrix();
  return w / w.sum();
}

HedgeState hedge_step(const HedgeState& state, const Eigen::VectorXd& loss) {
  if (loss.size() != state.log_weights_.size()) throw ValidationError("hedge_step: loss length != k");
  for (Eigen::Index i = 0; i < loss.size(); ++i) {
    if (!(loss[i] >= 0.0 && loss[i] <= 1.0)) {
      throw ValidationError("hedge_step: loss entry " + std::to_string(i) + " outside [0, 1]");
    }
  }
  HedgeState next = state;
  next.log_weights_ -= state.beta_ * loss;
  next.log_weights_.array() -= next.log_weights_.maxCoeff();
  ++next.round_;
  return next;
}

RescaledLoss rescale_loss(const Eigen::VectorXd& g, double bound) {
  if (!(bound > 0.0)) throw ValidationError("rescale_loss: bound must be positive");
  RescaledLoss out;
  out.values = ((g.array() + bound) / (2.0 * bound)).matrix();
  out.clamped.assign(static_cast<std::size_t>(g.size()), false);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (std::isnan(g[i])) throw ValidationError("rescale_loss: NaN loss");
    double& v = out.values[i];
    if (v < 0.0 || v > 1.0) {
      v = std::clamp(v, 0.0, 1.0);
      out.clamped[static_cast<std::size_t>(i)] = true;
      ++out.n_clamped;
    }
  }
  return out;
}

}  // namespace cftp
