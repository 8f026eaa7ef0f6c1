#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cftp {

/// Exponential-weights state over k experts. Weights are held in the log
/// domain and re-centred on their maximum after every update, so long
/// horizons cannot underflow; the normalized weights are unaffected.
class HedgeState {
 public:
  HedgeState(std::size_t k, double beta);

  /// Uniform weights with beta = sqrt(log k / horizon).
  static HedgeState start(std::size_t k, std::size_t horizon);

  std::size_t k() const noexcept { return static_cast<std::size_t>(log_weights_.size()); }
  double beta() const noexcept { return beta_; }
  std::size_t round() const noexcept { return round_; }
  const Eigen::VectorXd& log_weights() const noexcept { return log_weights_; }

  /// w_i = W_i / sum_j W_j.
  Eigen::VectorXd weights() const;

 private:
  friend HedgeState hedge_step(const HedgeState& state, const Eigen::VectorXd& loss);
  Eigen::VectorXd log_weights_;
  double beta_;
  std::size_t round_ = 0;
};

/// W_i <- W_i exp(-beta loss_i). Losses must lie in [0, 1]; anything else
/// throws ValidationError.
HedgeState hedge_step(const HedgeState& state, const Eigen::VectorXd& loss);

struct RescaledLoss {
  Eigen::VectorXd values;     ///< (g + B) / 2B, clamped to [0, 1]
  std::vector<bool> clamped;  ///< per coordinate: was clamping needed
  std::size_t n_clamped = 0;
};

/// Shift-and-scale of a loss bounded by B in magnitude onto [0, 1].
RescaledLoss rescale_loss(const Eigen::VectorXd& g, double bound);

}  // namespace cftp
