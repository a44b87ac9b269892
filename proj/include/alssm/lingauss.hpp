#ifndef ALSSM_LINGAUSS_HPP
#define ALSSM_LINGAUSS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "alssm/common.hpp"
#include "alssm/dists.hpp"

namespace alssm {

struct GaussianBelief {
  Vector mean;
  Matrix cov;
};

struct StepCache {
  Matrix K;          // Kalman gain, nx x ny
  Matrix L;          // smoother gain, nx x nx (filled by the backward pass)
  Vector innovation; // y - C xhat_pred - m
};

// Full parameter set theta of the state-space model. `al` holds one
// ALParams per observation component; baselines that use Gaussian noise
// leave it empty.
struct ModelParams {
  Matrix A;       // nx x nx transition
  Matrix C;       // ny x nx measurement
  Vector b;       // nx transition bias
  Matrix Q;       // nx x nx process covariance
  Vector pi1;     // nx initial mean
  Matrix Sigma1;  // nx x nx initial covariance
  std::vector<ALParams> al;

  Index nx() const { return A.rows(); }
  Index ny() const { return C.rows(); }
  void validate(bool require_al = true) const;
};

// Fixed Gaussian measurement noise (mean, diagonal covariance) for the
// Kalman baseline and the SV quasi-likelihood fit.
struct GaussianMeasurement {
  Vector mean;    // ny
  Vector r_diag;  // ny, entries > 0
};

struct RunResult {
  std::vector<GaussianBelief> predicted;
  std::vector<GaussianBelief> filtered;
  std::vector<GaussianBelief> smoothed;  // empty for filter-only runs
  int iterations = 0;                    // smoother outer iterations
  long fb_passes = 0;                    // forward-backward passes consumed
  bool converged = true;
  std::vector<int> step_iterations;      // per-step inner-loop counts (filters)
  std::vector<std::uint8_t> step_converged;
  double cpu_seconds = 0.0;
};

GaussianBelief predict_step(const ModelParams& params, const GaussianBelief& prev);

// Measurement update with time-varying noise mean m and diagonal covariance
// r_diag. Joseph-form covariance; innovation covariance solved via Cholesky
// with a jitter retry.
std::pair<GaussianBelief, StepCache> update_step(const GaussianBelief& pred,
                                                 const Matrix& C, const Vector& y,
                                                 const Vector& m,
                                                 const Vector& r_diag);

// RTS backward recursion. Returns smoothed beliefs and the gains L_k
// (k = 1..T-1); smoothed[T-1] equals filtered[T-1].
std::pair<std::vector<GaussianBelief>, std::vector<Matrix>> rts_backward_pass(
    const std::vector<GaussianBelief>& filtered,
    const std::vector<GaussianBelief>& predicted, const Matrix& A);

// One forward pass + one backward pass with fixed Gaussian noise; the exact
// posterior for the Gaussian model. The measurement update at k=1 is applied
// against (pi1, Sigma1).
RunResult kalman_smoother(const ModelParams& params, const GaussianMeasurement& noise,
                          const std::vector<Vector>& y);

// Forward pass only.
RunResult kalman_filter(const ModelParams& params, const GaussianMeasurement& noise,
                        const std::vector<Vector>& y);

// Windowed innovation-based adaptive-covariance baseline (scalar observation):
//   r_k = mean of last n_win squared innovations - C Sigma_pred C^T,
// clamped below at variance_floor; base_variance until the window fills.
struct AdaptiveFilterConfig {
  int n_win = 30;
  double base_variance = 0.5;
  double variance_floor = 1e-8;

  void validate() const;
};

RunResult adaptive_filter(const AdaptiveFilterConfig& config,
                          const ModelParams& params, const std::vector<Vector>& y);

}  // namespace alssm

#endif  // ALSSM_LINGAUSS_HPP
