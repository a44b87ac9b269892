#include "alssm/learn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>

namespace alssm {

namespace {

constexpr double kPClampLo = 1e-4;
constexpr double kPClampHi = 1.0 - 1e-4;
constexpr double kEigFloor = 1e-10;

Matrix eigenvalue_floor(const Matrix& m, double floor_value) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
  Vector ev = es.eigenvalues().cwiseMax(floor_value);
  return symmetrize(es.eigenvectors() * ev.asDiagonal() *
                    es.eigenvectors().transpose());
}

double logdet_spd(const Matrix& m, const char* name) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string("q_objective: ") + name +
                         " is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

// u_{k,i} evaluated at the given theta (it depends on C and mu).
double u_at(const ModelParams& theta, const SufficientStats& stats,
            const std::vector<Vector>& y, std::size_t k, Index i) {
  double resid =
      y[k](i) - theta.C.row(i).dot(stats.x_smooth[k]) - theta.al[i].mu;
  double cvc = theta.C.row(i) * stats.sigma_smooth[k] * theta.C.row(i).transpose();
  return resid * resid + std::max(cvc, 0.0);
}

bool all_finite(const ModelParams& theta) {
  auto ok = [](const Matrix& m) { return m.allFinite(); };
  if (!ok(theta.A) || !ok(theta.C) || !ok(theta.Q) || !ok(theta.Sigma1) ||
      !theta.b.allFinite() || !theta.pi1.allFinite())
    return false;
  for (const auto& a : theta.al)
    if (!std::isfinite(a.mu) || !std::isfinite(a.p) || !std::isfinite(a.sigma) ||
        a.sigma <= 0.0 || a.p <= 0.0 || a.p >= 1.0)
      return false;
  return true;
}

double rel_change(const Matrix& a, const Matrix& b) {
  double scale = std::max(1e-12, a.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

double rel_change(double a, double b) {
  return std::abs(a - b) / std::max(1e-12, std::abs(a));
}

double max_param_delta(const ModelParams& a, const ModelParams& b,
                       const ParamMask& mask) {
  double d = 0.0;
  if (!mask.A) d = std::max(d, rel_change(a.A, b.A));
  if (!mask.C) d = std::max(d, rel_change(a.C, b.C));
  if (!mask.b) d = std::max(d, rel_change(Matrix(a.b), Matrix(b.b)));
  if (!mask.Q) d = std::max(d, rel_change(a.Q, b.Q));
  if (!mask.pi1) d = std::max(d, rel_change(Matrix(a.pi1), Matrix(b.pi1)));
  if (!mask.Sigma1) d = std::max(d, rel_change(a.Sigma1, b.Sigma1));
  for (std::size_t i = 0; i < a.al.size(); ++i) {
    if (!mask.mu) d = std::max(d, rel_change(a.al[i].mu, b.al[i].mu));
    if (!mask.p) d = std::max(d, rel_change(a.al[i].p, b.al[i].p));
    if (!mask.sigma) d = std::max(d, rel_change(a.al[i].sigma, b.al[i].sigma));
  }
  return d;
}

}  // namespace

void LearnConfig::validate() const {
  require(fixed.any_free(), "LearnConfig: at least one parameter must be free");
  require(outer_tol > 0.0 && outer_max_iters >= 1, "LearnConfig: bad outer loop");
  require(e_max_iters >= 1 && m_max_iters >= 1, "LearnConfig: bad inner caps");
  require(lambda_init > 0.0, "LearnConfig: lambda_init must be > 0");
}

double q_objective(const ModelParams& theta, const SufficientStats& stats,
                   const std::vector<Vector>& y) {
  theta.validate();
  std::size_t T = y.size();
  require(stats.x_smooth.size() == T, "q_objective: stats/observation mismatch");
  Index nx = theta.nx();
  Index ny = theta.ny();

  // E1: transition term, via the aggregate sum of M_k.
  Matrix sum_P_tail = Matrix::Zero(nx, nx);   // sum_{k=2}^T P_k
  Matrix sum_P_head = Matrix::Zero(nx, nx);   // sum_{k=2}^T P_{k-1}
  Matrix sum_Pc = Matrix::Zero(nx, nx);       // sum_{k=2}^T P_{k,k-1}
  Vector sum_x_tail = Vector::Zero(nx);
  Vector sum_x_head = Vector::Zero(nx);
  for (std::size_t k = 1; k < T; ++k) {
    sum_P_tail += stats.P[k];
    sum_P_head += stats.P[k - 1];
    sum_Pc += stats.P_cross[k - 1];
    sum_x_tail += stats.x_smooth[k];
    sum_x_head += stats.x_smooth[k - 1];
  }
  const Matrix& A = theta.A;
  const Vector& b = theta.b;
  Matrix M = sum_P_tail - sum_Pc * A.transpose() - A * sum_Pc.transpose() +
             A * sum_P_head * A.transpose() - b * sum_x_tail.transpose() -
             sum_x_tail * b.transpose() + A * sum_x_head * b.transpose() +
             b * sum_x_head.transpose() * A.transpose() +
             static_cast<double>(T - 1) * b * b.transpose();
  Eigen::LLT<Matrix> lltQ(theta.Q);
  if (lltQ.info() != Eigen::Success)
    throw NumericalError("q_objective: Q is not positive definite");
  double E1 = 0.5 * lltQ.solve(M).trace();

  // E2: measurement term.
  double E2 = 0.0;
  for (Index i = 0; i < ny; ++i) {
    const ALParams& al = theta.al[i];
    double pq = al.p * (1.0 - al.p);
    for (std::size_t k = 0; k < T; ++k) {
      double u = u_at(theta, stats, y, k, i);
      double inv_r = pq * stats.e_lambda(static_cast<Index>(k), i) /
                     (al.sigma * al.sigma);
      double resid = theta.C.row(i).dot(stats.x_smooth[k]) + al.mu - y[k](i);
      E2 += 0.5 * (u * inv_r + resid * (1.0 - 2.0 * al.p) / al.sigma +
                   (0.5 - al.p) * (0.5 - al.p) / pq *
                       stats.e_inv_lambda(static_cast<Index>(k), i));
    }
  }

  // E3: initial-state term.
  Eigen::LLT<Matrix> lltS1(theta.Sigma1);
  if (lltS1.info() != Eigen::Success)
    throw NumericalError("q_objective: Sigma1 is not positive definite");
  Matrix S1inv_P1 = lltS1.solve(stats.P[0]);
  Vector S1inv_x1 = lltS1.solve(stats.x_smooth[0]);
  double E3 = 0.5 * (S1inv_P1.trace() - 2.0 * theta.pi1.dot(S1inv_x1) +
                     theta.pi1.dot(lltS1.solve(theta.pi1)));

  double out = -E1 - E2 - E3 - 0.5 * logdet_spd(theta.Sigma1, "Sigma1") -
               0.5 * static_cast<double>(T - 1) * logdet_spd(theta.Q, "Q");
  for (Index i = 0; i < ny; ++i) {
    const ALParams& al = theta.al[i];
    out += -static_cast<double>(T) * std::log(al.sigma) +
           0.5 * static_cast<double>(T) * std::log(al.p * (1.0 - al.p));
  }
  return out;
}

ModelParams m_step_closed_forms(const SufficientStats& stats,
                                const std::vector<Vector>& y,
                                const ModelParams& theta_old,
                                const ParamMask& mask, MStepInfo* info) {
  std::size_t T = y.size();
  require(T >= 2, "m_step_closed_forms: need T >= 2");
  ModelParams theta = theta_old;
  Index nx = theta.nx();
  Index ny = theta.ny();
  double Td = static_cast<double>(T);

  // sigma, then mu, per component.
  for (Index i = 0; i < ny; ++i) {
    ALParams& al = theta.al[i];
    double pq = al.p * (1.0 - al.p);
    if (!mask.sigma) {
      double G = 0.0, S2 = 0.0;
      for (std::size_t k = 0; k < T; ++k) {
        G += theta.C.row(i).dot(stats.x_smooth[k]) + al.mu - y[k](i);
        S2 += u_at(theta, stats, y, k, i) * pq *
              stats.e_lambda(static_cast<Index>(k), i);
      }
      double half_term = (0.5 - al.p) * G / Td;
      double disc = half_term * half_term + 4.0 * S2 / Td;
      if (disc < 0.0)
        throw NumericalError("m_step: negative discriminant in sigma update");
      al.sigma = 0.5 * (half_term + std::sqrt(disc));
      if (!(al.sigma > 0.0))
        throw NumericalError("m_step: sigma update produced a non-positive value");
    }
    if (!mask.mu) {
      double num = Td * (1.0 - 2.0 * al.p) / (2.0 * al.sigma);
      double den = 0.0;
      for (std::size_t k = 0; k < T; ++k) {
        double r = al.sigma * al.sigma /
                   (pq * stats.e_lambda(static_cast<Index>(k), i));
        num += (theta.C.row(i).dot(stats.x_smooth[k]) - y[k](i)) / r;
        den += 1.0 / r;
      }
      al.mu = -num / den;
    }
  }

  if (!mask.pi1) theta.pi1 = stats.x_smooth[0];
  if (!mask.Sigma1) {
    Matrix S1 = stats.P[0] - stats.x_smooth[0] * stats.x_smooth[0].transpose();
    theta.Sigma1 = eigenvalue_floor(S1, kEigFloor);
  }

  Matrix sum_P_head = Matrix::Zero(nx, nx);
  Matrix sum_Pc = Matrix::Zero(nx, nx);
  Vector sum_x_head = Vector::Zero(nx);
  Vector sum_x_tail = Vector::Zero(nx);
  Matrix sum_P_tail = Matrix::Zero(nx, nx);
  for (std::size_t k = 1; k < T; ++k) {
    sum_P_head += stats.P[k - 1];
    sum_P_tail += stats.P[k];
    sum_Pc += stats.P_cross[k - 1];
    sum_x_head += stats.x_smooth[k - 1];
    sum_x_tail += stats.x_smooth[k];
  }

  if (!mask.A) {
    Matrix num = sum_Pc - theta.b * sum_x_head.transpose();
    Eigen::LLT<Matrix> llt(symmetrize(sum_P_head));
    if (llt.info() != Eigen::Success) {
      Matrix ridged = symmetrize(sum_P_head);
      ridged.diagonal().array() += kEigFloor;
      llt.compute(ridged);
      if (info) info->a_ridge_used = true;
      if (llt.info() != Eigen::Success)
        throw NumericalError("m_step: singular state second-moment sum in A update");
    }
    theta.A = llt.solve(num.transpose()).transpose();
  }

  if (!mask.C) {
    for (Index i = 0; i < ny; ++i) {
      const ALParams& al = theta.al[i];
      double pq = al.p * (1.0 - al.p);
      Vector num = Vector::Zero(nx);
      Matrix den = Matrix::Zero(nx, nx);
      for (std::size_t k = 0; k < T; ++k) {
        double r = al.sigma * al.sigma /
                   (pq * stats.e_lambda(static_cast<Index>(k), i));
        num += ((y[k](i) - al.mu) / r - (1.0 - 2.0 * al.p) / (2.0 * al.sigma)) *
               stats.x_smooth[k];
        den += stats.P[k] / r;
      }
      Eigen::LLT<Matrix> llt(symmetrize(den));
      if (llt.info() != Eigen::Success)
        throw NumericalError("m_step: singular weighted second-moment sum in C update");
      theta.C.row(i) = llt.solve(num).transpose();
    }
  }

  if (!mask.Q) {
    const Matrix& A = theta.A;
    const Vector& b = theta.b;
    Matrix M = sum_P_tail - sum_Pc * A.transpose() - A * sum_Pc.transpose() +
               A * sum_P_head * A.transpose() - b * sum_x_tail.transpose() -
               sum_x_tail * b.transpose() + A * sum_x_head * b.transpose() +
               b * sum_x_head.transpose() * A.transpose() +
               static_cast<double>(T - 1) * b * b.transpose();
    theta.Q = eigenvalue_floor(M / static_cast<double>(T - 1), kEigFloor);
  }

  if (!mask.b) theta.b = (sum_x_tail - theta.A * sum_x_head) / static_cast<double>(T - 1);

  return theta;
}

MStepContext make_mstep_context(const SufficientStats& stats,
                                const std::vector<Vector>& y,
                                const ModelParams& theta, Index component,
                                double p_anchor) {
  const ALParams& al = theta.al[component];
  MStepContext ctx;
  for (std::size_t k = 0; k < y.size(); ++k) {
    ctx.alpha1 += stats.e_inv_lambda(static_cast<Index>(k), component);
    ctx.alpha2 +=
        (y[k](component) - theta.C.row(component).dot(stats.x_smooth[k]) - al.mu) /
        al.sigma;
    ctx.alpha3 += stats.e_lambda(static_cast<Index>(k), component) *
                  u_at(theta, stats, y, k, component) /
                  (2.0 * al.sigma * al.sigma);
  }
  ctx.zeta1 = -ctx.alpha2 - ctx.alpha3 * (1.0 - 2.0 * p_anchor);
  ctx.zeta2 = -0.5 * ctx.alpha1;
  return ctx;
}

double h_of_p(const MStepContext& ctx, double T, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw NumericalError("h_of_p: p must lie in (0,1)");
  double w = p * (1.0 - p);
  return 0.5 * T * std::log(w) - ctx.alpha1 * (0.5 - p) * (0.5 - p) / (2.0 * w) -
         ctx.alpha2 * p - ctx.alpha3 * w;
}

double surrogate_h(const MStepContext& ctx, double T, double p, double p_anchor) {
  if (!(p > 0.0 && p < 1.0))
    throw NumericalError("surrogate_h: p must lie in (0,1)");
  double w = p * (1.0 - p);
  return 0.5 * T * std::log(w) - ctx.alpha1 * (0.5 - p) * (0.5 - p) / (2.0 * w) -
         ctx.alpha2 * p -
         ctx.alpha3 * (p * (1.0 - 2.0 * p_anchor) + p_anchor * p_anchor);
}

namespace {

// d h_tilde / dp multiplied by p^2 (1-p)^2, expanded as a polynomial in p.
// With zeta1 = -(alpha2 + alpha3 (1 - 2 p_anchor)), zeta2 = -alpha1/2:
//   zeta1 p^4 + (T - 2 zeta1) p^3 + (zeta1 - 3T/2) p^2 + ((T+zeta2)/2) p - zeta2/4.
std::array<double, 5> quartic_coeffs(double T, double zeta1, double zeta2) {
  return {zeta1, T - 2.0 * zeta1, zeta1 - 1.5 * T, 0.5 * (T + zeta2),
          -0.25 * zeta2};
}

double poly_eval(const std::array<double, 5>& c, double x) {
  double v = 0.0;
  for (double ci : c) v = v * x + ci;
  return v;
}

double poly_deriv_eval(const std::array<double, 5>& c, double x) {
  double v = 0.0;
  for (int i = 0; i < 4; ++i) v = v * x + c[static_cast<std::size_t>(i)] * (4 - i);
  return v;
}

std::vector<double> real_roots_in_unit_interval(const std::array<double, 5>& c) {
  // Trim (near-)zero leading coefficients down to the true degree.
  std::vector<double> coeffs(c.begin(), c.end());
  double scale = 0.0;
  for (double ci : coeffs) scale = std::max(scale, std::abs(ci));
  if (scale == 0.0) return {};
  std::size_t lead = 0;
  while (lead + 1 < coeffs.size() && std::abs(coeffs[lead]) < 1e-14 * scale) ++lead;
  coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<long>(lead));
  std::size_t deg = coeffs.size() - 1;
  if (deg == 0) return {};

  Matrix companion = Matrix::Zero(static_cast<Index>(deg), static_cast<Index>(deg));
  for (std::size_t i = 0; i < deg; ++i)
    companion(0, static_cast<Index>(i)) = -coeffs[i + 1] / coeffs[0];
  for (std::size_t i = 1; i < deg; ++i)
    companion(static_cast<Index>(i), static_cast<Index>(i - 1)) = 1.0;
  Eigen::EigenSolver<Matrix> es(companion, false);

  std::vector<double> roots;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z.real()))) continue;
    double x = z.real();
    if (x <= 1e-12 || x >= 1.0 - 1e-12) continue;
    roots.push_back(x);
  }
  return roots;
}

}  // namespace

double p_update_mm(const MStepContext& ctx, double T, double p_old,
                   bool* used_grid_fallback) {
  if (!(p_old > 0.0 && p_old < 1.0))
    throw NumericalError("p_update_mm: p_old must lie in (0,1)");
  if (used_grid_fallback) *used_grid_fallback = false;
  double zeta1 = -ctx.alpha2 - ctx.alpha3 * (1.0 - 2.0 * p_old);
  double zeta2 = -0.5 * ctx.alpha1;
  auto coeffs = quartic_coeffs(T, zeta1, zeta2);

  std::vector<double> roots = real_roots_in_unit_interval(coeffs);
  // Newton polish on the quartic.
  for (double& x : roots) {
    for (int it = 0; it < 8; ++it) {
      double f = poly_eval(coeffs, x);
      double df = poly_deriv_eval(coeffs, x);
      if (df == 0.0) break;
      double step = f / df;
      double next = x - step;
      if (!(next > 0.0 && next < 1.0)) break;
      x = next;
      if (std::abs(step) < 1e-15) break;
    }
  }

  double best = -1.0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (double x : roots) {
    double v = surrogate_h(ctx, T, x, p_old);
    if (v > best_val) {
      best_val = v;
      best = x;
    }
  }
  if (best < 0.0) {
    // The intermediate-value argument guarantees an interior root; if the
    // eigensolver missed it, fall back to a dense grid on the surrogate.
    if (used_grid_fallback) *used_grid_fallback = true;
    const int n_grid = 100000;
    for (int g = 1; g < n_grid; ++g) {
      double x = static_cast<double>(g) / n_grid;
      if (x <= kPClampLo || x >= kPClampHi) continue;
      double v = surrogate_h(ctx, T, x, p_old);
      if (v > best_val) {
        best_val = v;
        best = x;
      }
    }
  }
  return std::clamp(best, kPClampLo, kPClampHi);
}

namespace {

ModelParams full_m_step(const SufficientStats& stats, const std::vector<Vector>& y,
                        const ModelParams& theta_old, const ParamMask& mask) {
  ModelParams theta = m_step_closed_forms(stats, y, theta_old, mask);
  if (!mask.p) {
    for (Index i = 0; i < theta.ny(); ++i) {
      double anchor = theta.al[i].p;
      MStepContext ctx = make_mstep_context(stats, y, theta, i, anchor);
      theta.al[i].p =
          p_update_mm(ctx, static_cast<double>(y.size()), anchor, nullptr);
    }
  }
  return theta;
}

EmResult em_driver(const std::vector<Vector>& y, const ModelParams& theta0,
                   const LearnConfig& cfg, int e_cap, int m_cap) {
  cfg.validate();
  ModelParams theta = theta0;
  theta.validate();
  require(y.size() >= 2, "em: need at least two observations");

  InferenceConfig smoother_cfg;
  smoother_cfg.tol = cfg.e_tol;
  smoother_cfg.max_iters = e_cap;
  smoother_cfg.lambda_init = cfg.lambda_init;

  EmResult res;
  Matrix e_lambda = Matrix::Constant(static_cast<Index>(y.size()), theta.ny(),
                                     cfg.lambda_init);
  for (int outer = 0; outer < cfg.outer_max_iters; ++outer) {
    // E-step: warm-started smoother (a single pass when e_cap == 1).
    SmootherOutput e_out = al_smoother(theta, y, smoother_cfg, e_lambda);
    e_lambda = e_out.vs.e_lambda;
    res.fb_passes += e_out.run.fb_passes;

    // M-step: cycle the sequential updates.
    ModelParams theta_new = theta;
    for (int cycle = 0; cycle < m_cap; ++cycle) {
      ModelParams next = full_m_step(e_out.stats, y, theta_new, cfg.fixed);
      double d = max_param_delta(next, theta_new, cfg.fixed);
      theta_new = std::move(next);
      if (d < cfg.m_tol) break;
    }
    if (!all_finite(theta_new))
      throw NumericalError("em: parameters diverged to non-finite values at outer iteration " +
                           std::to_string(outer + 1));

    double delta = max_param_delta(theta_new, theta, cfg.fixed);
    theta = std::move(theta_new);
    res.trace.push_back({outer + 1, res.fb_passes,
                         q_objective(theta, e_out.stats, y), delta});
    if (delta < cfg.outer_tol) {
      res.converged = true;
      break;
    }
  }
  res.theta = std::move(theta);
  return res;
}

}  // namespace

EmResult single_loop_em(const std::vector<Vector>& y, const ModelParams& theta0,
                        const LearnConfig& cfg) {
  return em_driver(y, theta0, cfg, 1, 1);
}

EmResult double_loop_em(const std::vector<Vector>& y, const ModelParams& theta0,
                        const LearnConfig& cfg) {
  return em_driver(y, theta0, cfg, cfg.e_max_iters, cfg.m_max_iters);
}

// ---------------------------------------------------------------------------

GaussianEmResult gaussian_em(const std::vector<Vector>& y,
                             const ModelParams& theta0,
                             const GaussianMeasurement& noise0,
                             const GaussianLearnConfig& cfg) {
  ModelParams theta = theta0;
  theta.validate(false);
  GaussianMeasurement noise = noise0;
  std::size_t T = y.size();
  require(T >= 2, "gaussian_em: need at least two observations");
  require(noise.mean.size() == theta.ny() && noise.r_diag.size() == theta.ny(),
          "gaussian_em: noise dimension mismatch");
  Index nx = theta.nx();
  Index ny = theta.ny();

  GaussianEmResult res;
  for (int outer = 0; outer < cfg.outer_max_iters; ++outer) {
    RunResult run = kalman_filter(theta, noise, y);
    auto [smoothed, gains] = rts_backward_pass(run.filtered, run.predicted, theta.A);
    run.smoothed = std::move(smoothed);
    res.fb_passes += 1;

    std::vector<Matrix> P(T);
    std::vector<Matrix> Pc(T - 1);
    for (std::size_t k = 0; k < T; ++k) {
      P[k] = run.smoothed[k].cov +
             run.smoothed[k].mean * run.smoothed[k].mean.transpose();
      if (k > 0)
        Pc[k - 1] = run.smoothed[k].cov * gains[k - 1].transpose() +
                    run.smoothed[k].mean * run.smoothed[k - 1].mean.transpose();
    }

    ModelParams theta_new = theta;
    GaussianMeasurement noise_new = noise;
    Matrix sum_P_head = Matrix::Zero(nx, nx), sum_P_tail = Matrix::Zero(nx, nx),
           sum_Pc = Matrix::Zero(nx, nx);
    Vector sum_x_head = Vector::Zero(nx), sum_x_tail = Vector::Zero(nx);
    for (std::size_t k = 1; k < T; ++k) {
      sum_P_head += P[k - 1];
      sum_P_tail += P[k];
      sum_Pc += Pc[k - 1];
      sum_x_head += run.smoothed[k - 1].mean;
      sum_x_tail += run.smoothed[k].mean;
    }
    if (!cfg.fixed.pi1) theta_new.pi1 = run.smoothed[0].mean;
    if (!cfg.fixed.Sigma1)
      theta_new.Sigma1 = eigenvalue_floor(
          P[0] - run.smoothed[0].mean * run.smoothed[0].mean.transpose(), kEigFloor);
    if (!cfg.fixed.A) {
      Matrix num = sum_Pc - theta_new.b * sum_x_head.transpose();
      Eigen::LLT<Matrix> llt(symmetrize(sum_P_head));
      if (llt.info() != Eigen::Success)
        throw NumericalError("gaussian_em: singular A update");
      theta_new.A = llt.solve(num.transpose()).transpose();
    }
    if (!cfg.fixed.C) {
      for (Index i = 0; i < ny; ++i) {
        Vector num = Vector::Zero(nx);
        Matrix den = Matrix::Zero(nx, nx);
        for (std::size_t k = 0; k < T; ++k) {
          num += (y[k](i) - noise.mean(i)) * run.smoothed[k].mean;
          den += P[k];
        }
        Eigen::LLT<Matrix> llt(symmetrize(den));
        if (llt.info() != Eigen::Success)
          throw NumericalError("gaussian_em: singular C update");
        theta_new.C.row(i) = llt.solve(num).transpose();
      }
    }
    if (!cfg.fixed.Q) {
      const Matrix& A = theta_new.A;
      const Vector& b = theta_new.b;
      Matrix M = sum_P_tail - sum_Pc * A.transpose() - A * sum_Pc.transpose() +
                 A * sum_P_head * A.transpose() - b * sum_x_tail.transpose() -
                 sum_x_tail * b.transpose() + A * sum_x_head * b.transpose() +
                 b * sum_x_head.transpose() * A.transpose() +
                 static_cast<double>(T - 1) * b * b.transpose();
      theta_new.Q = eigenvalue_floor(M / static_cast<double>(T - 1), kEigFloor);
    }
    if (!cfg.fixed.b)
      theta_new.b = (sum_x_tail - theta_new.A * sum_x_head) /
                    static_cast<double>(T - 1);
    if (!cfg.fix_noise_mean) {
      for (Index i = 0; i < ny; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < T; ++k)
          acc += y[k](i) - theta_new.C.row(i).dot(run.smoothed[k].mean);
        noise_new.mean(i) = acc / static_cast<double>(T);
      }
    }
    if (!cfg.fix_noise_var) {
      for (Index i = 0; i < ny; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < T; ++k) {
          double resid = y[k](i) - theta_new.C.row(i).dot(run.smoothed[k].mean) -
                         noise_new.mean(i);
          double cvc = theta_new.C.row(i) * run.smoothed[k].cov *
                       theta_new.C.row(i).transpose();
          acc += resid * resid + std::max(cvc, 0.0);
        }
        noise_new.r_diag(i) = std::max(acc / static_cast<double>(T), kEigFloor);
      }
    }

    ParamMask gmask = cfg.fixed;
    gmask.mu = gmask.p = gmask.sigma = true;
    double delta = max_param_delta(theta_new, theta, gmask);
    delta = std::max(delta, rel_change(Matrix(noise_new.mean), Matrix(noise.mean)));
    delta = std::max(delta,
                     rel_change(Matrix(noise_new.r_diag), Matrix(noise.r_diag)));
    theta = std::move(theta_new);
    noise = std::move(noise_new);
    res.trace.push_back({outer + 1, res.fb_passes, 0.0, delta});
    if (delta < cfg.outer_tol) {
      res.converged = true;
      break;
    }
  }
  res.theta = std::move(theta);
  res.noise = std::move(noise);
  return res;
}

ModelParams default_init(const std::vector<Vector>& y, Index nx) {
  require(!y.empty(), "default_init: observation sequence must be non-empty");
  Index ny = y.front().size();
  std::size_t T = y.size();
  ModelParams theta;
  theta.A = 0.9 * Matrix::Identity(nx, nx);
  theta.b = Vector::Zero(nx);
  theta.Q = 0.1 * Matrix::Identity(nx, nx);
  theta.Sigma1 = Matrix::Identity(nx, nx);

  // Gaussian pre-fit with a flat measurement map to get proxy states.
  ModelParams pre = theta;
  pre.C = Matrix::Constant(ny, nx, 1.0 / static_cast<double>(nx));
  double var_y = 0.0;
  double mean_y = 0.0;
  for (const auto& yk : y) mean_y += yk.sum();
  mean_y /= static_cast<double>(T * ny);
  for (const auto& yk : y)
    var_y += (yk.array() - mean_y).square().sum();
  var_y = std::max(var_y / static_cast<double>(T * ny), 1e-6);
  pre.pi1 = Vector::Zero(nx);
  GaussianMeasurement pre_noise{Vector::Zero(ny), Vector::Constant(ny, var_y)};
  RunResult pre_run = kalman_smoother(pre, pre_noise, y);

  Matrix sum_yx = Matrix::Zero(ny, nx);
  Matrix sum_xx = Matrix::Zero(nx, nx);
  for (std::size_t k = 0; k < T; ++k) {
    sum_yx += y[k] * pre_run.smoothed[k].mean.transpose();
    sum_xx += pre_run.smoothed[k].mean * pre_run.smoothed[k].mean.transpose() +
              pre_run.smoothed[k].cov;
  }
  sum_xx.diagonal().array() += 1e-8 * std::max(1.0, sum_xx.trace());
  theta.C = sum_xx.llt().solve(sum_yx.transpose()).transpose();
  if (!theta.C.allFinite() || theta.C.cwiseAbs().maxCoeff() < 1e-8)
    theta.C = Matrix::Constant(ny, nx, 1.0 / static_cast<double>(nx));

  // AL noise init: p = 0.5, sigma from the residual MAD (Laplace calibration).
  theta.al.resize(static_cast<std::size_t>(ny));
  for (Index i = 0; i < ny; ++i) {
    std::vector<double> resid(T);
    for (std::size_t k = 0; k < T; ++k)
      resid[k] = std::abs(y[k](i) - theta.C.row(i).dot(pre_run.smoothed[k].mean));
    std::nth_element(resid.begin(), resid.begin() + static_cast<long>(T / 2),
                     resid.end());
    double mad = resid[T / 2];
    theta.al[static_cast<std::size_t>(i)] = {0.0, 0.5,
                                             std::max(mad / (2.0 * std::log(2.0)), 1e-3)};
  }

  // pi1: least-squares back-projection of the first observation.
  Matrix CtC = theta.C.transpose() * theta.C;
  CtC.diagonal().array() += 1e-8 * std::max(1.0, CtC.trace());
  theta.pi1 = CtC.llt().solve(theta.C.transpose() * y.front());
  return theta;
}

}  // namespace alssm
