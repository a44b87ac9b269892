#include "alssm/alinf.hpp"

#include <chrono>
#include <cmath>

namespace alssm {

void InferenceConfig::validate() const {
  require(tol > 0.0, "InferenceConfig: tol must be > 0");
  require(max_iters >= 1, "InferenceConfig: max_iters must be >= 1");
  require(max_step_iters >= 1, "InferenceConfig: max_step_iters must be >= 1");
  require(lambda_init > 0.0, "InferenceConfig: lambda_init must be > 0");
}

std::pair<double, double> effective_noise(const ALParams& al, double e_lambda) {
  double pq = al.p * (1.0 - al.p);
  double r = al.sigma * al.sigma / (e_lambda * pq);
  double m = al.mu + (0.5 - al.p) * al.sigma / (e_lambda * pq);
  return {m, r};
}

namespace {

// Effective (m, r) vectors for one step given per-component E[lambda].
void effective_noise_row(const std::vector<ALParams>& al,
                         const Eigen::Ref<const Eigen::RowVectorXd>& e_lambda_row,
                         Vector& m, Vector& r) {
  Index ny = static_cast<Index>(al.size());
  m.resize(ny);
  r.resize(ny);
  for (Index i = 0; i < ny; ++i) {
    auto [mi, ri] = effective_noise(al[i], e_lambda_row(i));
    m(i) = mi;
    r(i) = ri;
  }
}

// u_{k,i} from a belief (smoothed or filtered): squared residual plus the
// propagated state uncertainty.
void residual_second_moment(const ModelParams& params, const Vector& yk,
                            const GaussianBelief& belief,
                            Eigen::RowVectorXd& u_row) {
  u_row.resize(params.ny());
  for (Index i = 0; i < params.ny(); ++i) {
    double resid = yk(i) - params.C.row(i).dot(belief.mean) - params.al[i].mu;
    double cvc = params.C.row(i) * belief.cov * params.C.row(i).transpose();
    u_row(i) = resid * resid + std::max(cvc, 0.0);
  }
}

double lambda_from_u(const ALParams& al, double u) {
  double pq = al.p * (1.0 - al.p);
  return al.sigma / (2.0 * pq * std::sqrt(std::max(u, 1e-300)));
}

double inv_lambda_from_u(const ALParams& al, double u) {
  double pq = al.p * (1.0 - al.p);
  return 2.0 * pq * std::sqrt(std::max(u, 1e-300)) / al.sigma + 4.0 * pq;
}

// Relative combined delta of stacked means and covariances.
double belief_delta(const std::vector<GaussianBelief>& a,
                    const std::vector<GaussianBelief>& b) {
  double dm = 0.0, dc = 0.0, nm = 0.0, nc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dm += (a[k].mean - b[k].mean).squaredNorm();
    dc += (a[k].cov - b[k].cov).squaredNorm();
    nm += a[k].mean.squaredNorm();
    nc += a[k].cov.squaredNorm();
  }
  return (std::sqrt(dm) + std::sqrt(dc)) / (1.0 + std::sqrt(nm) + std::sqrt(nc));
}

}  // namespace

SmootherOutput smoother_single_pass(const ModelParams& params,
                                    const std::vector<Vector>& y,
                                    Matrix& e_lambda) {
  std::size_t T = y.size();
  Index ny = params.ny();
  SmootherOutput out;
  RunResult& run = out.run;
  run.predicted.resize(T);
  run.filtered.resize(T);

  GaussianBelief prior{params.pi1, params.Sigma1};
  Vector m, r;
  for (std::size_t k = 0; k < T; ++k) {
    run.predicted[k] =
        (k == 0) ? prior : predict_step(params, run.filtered[k - 1]);
    effective_noise_row(params.al, e_lambda.row(static_cast<Index>(k)), m, r);
    auto [post, cache] = update_step(run.predicted[k], params.C, y[k], m, r);
    run.filtered[k] = std::move(post);
  }
  auto [smoothed, gains] = rts_backward_pass(run.filtered, run.predicted, params.A);
  run.smoothed = std::move(smoothed);
  run.fb_passes = 1;
  run.iterations = 1;

  // Lambda refresh from the smoothed residuals.
  VariationalState& vs = out.vs;
  vs.u.resize(static_cast<Index>(T), ny);
  vs.e_lambda.resize(static_cast<Index>(T), ny);
  vs.e_inv_lambda.resize(static_cast<Index>(T), ny);
  vs.m.resize(static_cast<Index>(T), ny);
  vs.r.resize(static_cast<Index>(T), ny);
  Eigen::RowVectorXd u_row(ny);
  for (std::size_t k = 0; k < T; ++k) {
    Index ki = static_cast<Index>(k);
    residual_second_moment(params, y[k], run.smoothed[k], u_row);
    vs.u.row(ki) = u_row;
    for (Index i = 0; i < ny; ++i) {
      vs.e_lambda(ki, i) = lambda_from_u(params.al[i], vs.u(ki, i));
      vs.e_inv_lambda(ki, i) = inv_lambda_from_u(params.al[i], vs.u(ki, i));
      auto [mi, ri] = effective_noise(params.al[i], vs.e_lambda(ki, i));
      vs.m(ki, i) = mi;
      vs.r(ki, i) = ri;
    }
  }
  e_lambda = vs.e_lambda;

  SufficientStats& st = out.stats;
  st.x_smooth.resize(T);
  st.sigma_smooth.resize(T);
  st.P.resize(T);
  st.P_cross.resize(T - 1);
  st.L = std::move(gains);
  for (std::size_t k = 0; k < T; ++k) {
    st.x_smooth[k] = run.smoothed[k].mean;
    st.sigma_smooth[k] = run.smoothed[k].cov;
    st.P[k] = run.smoothed[k].cov +
              run.smoothed[k].mean * run.smoothed[k].mean.transpose();
    // Cov(x_k, x_{k-1} | y_{1:T}) = Sigma_{k|T} L_{k-1}^T (from the backward
    // recursion x_{k-1}|y = xhat_{k-1|k-1} + L_{k-1}(x_k - xhat_{k|k-1}) + ...).
    if (k > 0)
      st.P_cross[k - 1] = run.smoothed[k].cov * st.L[k - 1].transpose() +
                          run.smoothed[k].mean * run.smoothed[k - 1].mean.transpose();
  }
  st.u = vs.u;
  st.e_lambda = vs.e_lambda;
  st.e_inv_lambda = vs.e_inv_lambda;
  return out;
}

SmootherOutput al_smoother(const ModelParams& params, const std::vector<Vector>& y,
                           const InferenceConfig& cfg, Matrix e_lambda) {
  params.validate();
  cfg.validate();
  require(!y.empty(), "al_smoother: observation sequence must be non-empty");
  require(e_lambda.rows() == static_cast<Index>(y.size()) &&
              e_lambda.cols() == params.ny(),
          "al_smoother: e_lambda_init must be T x ny");
  auto start = std::chrono::steady_clock::now();

  SmootherOutput out;
  std::vector<GaussianBelief> prev_smoothed;
  long passes = 0;
  bool converged = false;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    out = smoother_single_pass(params, y, e_lambda);
    ++passes;
    if (!prev_smoothed.empty() &&
        belief_delta(out.run.smoothed, prev_smoothed) < cfg.tol) {
      converged = true;
      out.run.iterations = iter + 1;
      break;
    }
    prev_smoothed = out.run.smoothed;
    out.run.iterations = iter + 1;
  }
  out.run.fb_passes = passes;
  out.run.converged = converged;
  out.run.cpu_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

SmootherOutput al_smoother(const ModelParams& params, const std::vector<Vector>& y,
                           const InferenceConfig& cfg) {
  Matrix e_lambda = Matrix::Constant(static_cast<Index>(y.size()),
                                     params.C.rows(), cfg.lambda_init);
  return al_smoother(params, y, cfg, std::move(e_lambda));
}

RunResult exact_al_filter(const ModelParams& params, const std::vector<Vector>& y,
                          const InferenceConfig& cfg) {
  params.validate();
  cfg.validate();
  require(!y.empty(), "exact_al_filter: observation sequence must be non-empty");
  auto start = std::chrono::steady_clock::now();

  std::size_t T = y.size();
  Index ny = params.ny();
  RunResult res;
  res.filtered.resize(T);
  res.predicted.resize(T);
  res.step_iterations.resize(T);
  res.step_converged.assign(T, 1);

  Matrix warm(0, ny);
  std::vector<Vector> window;
  window.reserve(T);
  for (std::size_t k = 0; k < T; ++k) {
    window.push_back(y[k]);
    Matrix e_lambda(static_cast<Index>(k) + 1, ny);
    if (k > 0) e_lambda.topRows(static_cast<Index>(k)) = warm;
    e_lambda.row(static_cast<Index>(k)).setConstant(cfg.lambda_init);
    SmootherOutput win = al_smoother(params, window, cfg, std::move(e_lambda));
    res.filtered[k] = win.run.filtered.back();
    res.predicted[k] = win.run.predicted.back();
    res.step_iterations[k] = win.run.iterations;
    res.step_converged[k] = win.run.converged ? 1 : 0;
    res.fb_passes += win.run.fb_passes;
    warm = win.vs.e_lambda;
  }
  res.converged = true;
  for (auto c : res.step_converged) res.converged = res.converged && c;
  res.cpu_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::pair<RunResult, VariationalState> fast_al_filter(const ModelParams& params,
                                                      const std::vector<Vector>& y,
                                                      const InferenceConfig& cfg) {
  params.validate();
  cfg.validate();
  require(!y.empty(), "fast_al_filter: observation sequence must be non-empty");
  auto start = std::chrono::steady_clock::now();

  std::size_t T = y.size();
  Index ny = params.ny();
  RunResult res;
  res.predicted.resize(T);
  res.filtered.resize(T);
  res.step_iterations.resize(T);
  res.step_converged.assign(T, 1);
  VariationalState vs;
  vs.e_lambda.resize(static_cast<Index>(T), ny);
  vs.e_inv_lambda.resize(static_cast<Index>(T), ny);
  vs.u.resize(static_cast<Index>(T), ny);
  vs.m.resize(static_cast<Index>(T), ny);
  vs.r.resize(static_cast<Index>(T), ny);

  GaussianBelief prior{params.pi1, params.Sigma1};
  Vector m, r;
  Eigen::RowVectorXd lam(ny), u_row(ny);
  for (std::size_t k = 0; k < T; ++k) {
    Index ki = static_cast<Index>(k);
    res.predicted[k] =
        (k == 0) ? prior : predict_step(params, res.filtered[k - 1]);
    lam.setConstant(cfg.lambda_init);
    GaussianBelief post = res.predicted[k];
    bool step_ok = false;
    int used = cfg.max_step_iters;
    for (int j = 0; j < cfg.max_step_iters; ++j) {
      effective_noise_row(params.al, lam, m, r);
      auto [next, cache] = update_step(res.predicted[k], params.C, y[k], m, r);
      residual_second_moment(params, y[k], next, u_row);
      for (Index i = 0; i < ny; ++i)
        lam(i) = lambda_from_u(params.al[i], u_row(i));
      double delta = ((next.mean - post.mean).norm() + (next.cov - post.cov).norm()) /
                     (1.0 + post.mean.norm() + post.cov.norm());
      post = std::move(next);
      if (delta < cfg.tol) {
        step_ok = true;
        used = j + 1;
        break;
      }
    }
    res.filtered[k] = std::move(post);
    res.step_iterations[k] = used;
    res.step_converged[k] = step_ok ? 1 : 0;
    for (Index i = 0; i < ny; ++i) {
      vs.u(ki, i) = u_row(i);
      vs.e_lambda(ki, i) = lam(i);
      vs.e_inv_lambda(ki, i) = inv_lambda_from_u(params.al[i], u_row(i));
      auto [mi, ri] = effective_noise(params.al[i], lam(i));
      vs.m(ki, i) = mi;
      vs.r(ki, i) = ri;
    }
  }
  res.converged = true;
  for (auto c : res.step_converged) res.converged = res.converged && c;
  res.cpu_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(res), std::move(vs)};
}

}  // namespace alssm
