#ifndef ALSSM_LEARN_HPP
#define ALSSM_LEARN_HPP

#include <vector>

#include "alssm/alinf.hpp"

namespace alssm {

// true = parameter frozen at its initial value.
struct ParamMask {
  bool A = false;
  bool C = false;
  bool mu = false;
  bool p = false;
  bool sigma = false;
  bool b = false;
  bool Q = false;
  bool pi1 = false;
  bool Sigma1 = false;

  bool any_free() const {
    return !(A && C && mu && p && sigma && b && Q && pi1 && Sigma1);
  }
};

struct LearnConfig {
  enum class Mode { single_loop, double_loop };
  Mode mode = Mode::single_loop;
  ParamMask fixed;
  double outer_tol = 1e-5;  // sup relative parameter change
  int outer_max_iters = 500;
  // double-loop inner loops (E-step smoother, M-step cycles)
  double e_tol = 1e-6;
  int e_max_iters = 200;
  double m_tol = 1e-8;
  int m_max_iters = 50;
  double lambda_init = 1.0;

  void validate() const;
};

struct EmTraceRow {
  int iteration = 0;
  long fb_passes = 0;      // cumulative forward-backward passes
  double q_value = 0.0;    // expected complete-data objective after the M-step
  double max_rel_delta = 0.0;
};

struct EmResult {
  ModelParams theta;
  std::vector<EmTraceRow> trace;
  long fb_passes = 0;
  bool converged = false;
};

// Expected complete-data log-likelihood up to theta-independent constants
// (the E[log lambda] and E[1/lambda] entropy-side terms drop).
double q_objective(const ModelParams& theta, const SufficientStats& stats,
                   const std::vector<Vector>& y);

// Sequential closed-form updates for sigma, mu, pi1, Sigma1, A, C, Q, b (in
// that order, each using the latest values); masked parameters untouched.
// The asymmetry p is updated separately via p_update_mm.
struct MStepInfo {
  bool a_ridge_used = false;
};

ModelParams m_step_closed_forms(const SufficientStats& stats,
                                const std::vector<Vector>& y,
                                const ModelParams& theta_old, const ParamMask& mask,
                                MStepInfo* info = nullptr);

// Coefficients of the p-objective h(p) and its concave surrogate:
//   h(p) = (T/2) log p(1-p) - a1 (1/2-p)^2 / (2p(1-p)) - a2 p - a3 p(1-p).
struct MStepContext {
  double alpha1 = 0.0;  // sum_k E[1/lambda_k]            (> 0)
  double alpha2 = 0.0;  // sum_k (y_k - C x_k - mu)/sigma
  double alpha3 = 0.0;  // sum_k E[lambda_k] u_k / (2 sigma^2)  (> 0)
  double zeta1 = 0.0;   // -alpha2 - alpha3 (1 - 2 p_anchor)
  double zeta2 = 0.0;   // -alpha1 / 2                      (< 0)
};

MStepContext make_mstep_context(const SufficientStats& stats,
                                const std::vector<Vector>& y,
                                const ModelParams& theta, Index component,
                                double p_anchor);

double h_of_p(const MStepContext& ctx, double T, double p);
double surrogate_h(const MStepContext& ctx, double T, double p, double p_anchor);

// Maximizes the surrogate via the quartic stationarity equation (companion
// matrix roots, Newton-polished, filtered into (0,1)); guaranteed
// h(p_new) >= h(p_old). Clamped to [1e-4, 1-1e-4].
double p_update_mm(const MStepContext& ctx, double T, double p_old,
                   bool* used_grid_fallback = nullptr);

// One forward-backward pass per outer iteration, then one M-step.
EmResult single_loop_em(const std::vector<Vector>& y, const ModelParams& theta0,
                        const LearnConfig& cfg);

// Smoother run to convergence per E-step, M-step cycled to convergence.
// With e_max_iters = m_max_iters = 1 this reduces to single_loop_em.
EmResult double_loop_em(const std::vector<Vector>& y, const ModelParams& theta0,
                        const LearnConfig& cfg);

// ---------------------------------------------------------------------------
// Gaussian-noise EM baseline (used by the Gaussian Kalman smoother cells and
// the SV quasi-likelihood fit).

struct GaussianLearnConfig {
  ParamMask fixed;           // p/mu/sigma entries ignored
  bool fix_noise_mean = true;
  bool fix_noise_var = false;
  double outer_tol = 1e-5;
  int outer_max_iters = 500;
};

struct GaussianEmResult {
  ModelParams theta;  // al left empty
  GaussianMeasurement noise;
  std::vector<EmTraceRow> trace;
  long fb_passes = 0;
  bool converged = false;
};

GaussianEmResult gaussian_em(const std::vector<Vector>& y,
                             const ModelParams& theta0,
                             const GaussianMeasurement& noise0,
                             const GaussianLearnConfig& cfg);

// Default theta initialization for the CLI: A = 0.9 I, C from a least-squares
// fit against Gaussian-prefit proxy states, p = 0.5, sigma from residual MAD.
ModelParams default_init(const std::vector<Vector>& y, Index nx);

}  // namespace alssm

#endif  // ALSSM_LEARN_HPP
