#ifndef ALSSM_ALINF_HPP
#define ALSSM_ALINF_HPP

#include <utility>
#include <vector>

#include "alssm/lingauss.hpp"

namespace alssm {

// Per-step variational quantities. Each matrix is T x ny.
struct VariationalState {
  Matrix e_lambda;      // E[lambda_{k,i}] > 0
  Matrix e_inv_lambda;  // E[1/lambda_{k,i}]
  Matrix u;             // residual second moments, >= 0
  Matrix m;             // effective noise means
  Matrix r;             // effective noise variances, > 0
};

// Smoothed moments consumed by the M-step.
struct SufficientStats {
  std::vector<Vector> x_smooth;      // T
  std::vector<Matrix> sigma_smooth;  // T
  std::vector<Matrix> P;             // T,   P_k = Sigma_{k|T} + x x^T
  std::vector<Matrix> P_cross;       // T-1, P_{k,k-1} = L_{k-1} Sigma_{k|T} + x_k x_{k-1}^T
  std::vector<Matrix> L;             // T-1 smoother gains
  Matrix u;                          // T x ny
  Matrix e_lambda;                   // T x ny
  Matrix e_inv_lambda;               // T x ny
};

struct InferenceConfig {
  double tol = 1e-6;        // relative combined mean+cov delta
  int max_iters = 200;      // smoother outer iterations
  int max_step_iters = 50;  // fast-filter per-step inner iterations
  double lambda_init = 1.0;

  void validate() const;
};

// Effective Gaussian noise implied by E[lambda]:
//   r = sigma^2 / (E[lambda] p (1-p)),  m = mu + (1/2 - p) sigma / (E[lambda] p (1-p)).
// Returns (m, r).
std::pair<double, double> effective_noise(const ALParams& al, double e_lambda);

struct SmootherOutput {
  RunResult run;
  VariationalState vs;
  SufficientStats stats;
};

// One forward-backward pass at the current E[lambda] (T x ny, updated in
// place from the new smoothed residuals before returning). Building block of
// both the converged smoother and the single-loop EM.
SmootherOutput smoother_single_pass(const ModelParams& params,
                                    const std::vector<Vector>& y, Matrix& e_lambda);

// Iterated MFVB smoother: forward pass with effective noise, RTS backward
// pass, then the lambda update, repeated until the combined relative change
// of smoothed means and covariances falls below cfg.tol.
SmootherOutput al_smoother(const ModelParams& params, const std::vector<Vector>& y,
                           const InferenceConfig& cfg);
// Warm-started variant: e_lambda_init must be T x ny (used by the exact
// filter and the double-loop EM).
SmootherOutput al_smoother(const ModelParams& params, const std::vector<Vector>& y,
                           const InferenceConfig& cfg, Matrix e_lambda_init);

// Batch filter: runs the smoother on each expanding window y_{1:k} and keeps
// the last filtered belief; lambda estimates are warm-started between windows.
RunResult exact_al_filter(const ModelParams& params, const std::vector<Vector>& y,
                          const InferenceConfig& cfg);

// Sequential filter with the Gaussian approximation of the predictive
// distribution; per-step inner loop over (effective noise -> update -> u ->
// lambda) until the filtered belief stabilizes.
std::pair<RunResult, VariationalState> fast_al_filter(const ModelParams& params,
                                                      const std::vector<Vector>& y,
                                                      const InferenceConfig& cfg);

}  // namespace alssm

#endif  // ALSSM_ALINF_HPP
