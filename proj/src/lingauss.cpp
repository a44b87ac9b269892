#include "alssm/lingauss.hpp"

#include <cmath>
#include <deque>

namespace alssm {

namespace {

void check_symmetric_psd(const Matrix& m, const char* name) {
  require(m.rows() == m.cols(), std::string(name) + " must be square");
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
          std::string(name) + " must be symmetric (tolerance 1e-10)");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -1e-10,
          std::string(name) + " must be positive semidefinite");
}

}  // namespace

void ModelParams::validate(bool require_al) const {
  Index n = A.rows();
  require(n > 0 && A.cols() == n, "A must be square and non-empty");
  require(C.cols() == n, "C column count must match state dimension");
  require(C.rows() > 0, "C must have at least one row");
  require(b.size() == n, "b size must match state dimension");
  require(pi1.size() == n, "pi1 size must match state dimension");
  check_symmetric_psd(Q, "Q");
  require(Q.rows() == n, "Q dimension must match state dimension");
  check_symmetric_psd(Sigma1, "Sigma1");
  require(Sigma1.rows() == n, "Sigma1 dimension must match state dimension");
  if (require_al)
    require(static_cast<Index>(al.size()) == C.rows(),
            "al must hold one entry per observation component");
  if (!al.empty()) {
    require(static_cast<Index>(al.size()) == C.rows(),
            "al must hold one entry per observation component");
    for (const auto& a : al) a.validate();
  }
}

void AdaptiveFilterConfig::validate() const {
  require(n_win >= 1, "AdaptiveFilterConfig: n_win must be >= 1");
  require(base_variance > 0.0, "AdaptiveFilterConfig: base_variance must be > 0");
  require(variance_floor > 0.0, "AdaptiveFilterConfig: variance_floor must be > 0");
}

GaussianBelief predict_step(const ModelParams& params, const GaussianBelief& prev) {
  require(prev.mean.size() == params.nx() && prev.cov.rows() == params.nx(),
          "predict_step: belief dimension mismatch");
  GaussianBelief out;
  out.mean = params.A * prev.mean + params.b;
  out.cov = symmetrize(params.A * prev.cov * params.A.transpose() + params.Q);
  return out;
}

std::pair<GaussianBelief, StepCache> update_step(const GaussianBelief& pred,
                                                 const Matrix& C, const Vector& y,
                                                 const Vector& m,
                                                 const Vector& r_diag) {
  Index nx = pred.mean.size();
  Index ny = C.rows();
  require(C.cols() == nx, "update_step: C column count mismatch");
  require(y.size() == ny && m.size() == ny && r_diag.size() == ny,
          "update_step: observation dimension mismatch");
  require(r_diag.minCoeff() > 0.0, "update_step: noise variances must be > 0");

  Matrix S = C * pred.cov * C.transpose();
  S.diagonal() += r_diag;
  S = symmetrize(S);

  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success) {
    // Jitter retry for near-singular innovation covariance.
    Matrix S2 = S;
    S2.diagonal().array() += 1e-12 * std::max(1.0, S.trace());
    llt.compute(S2);
    if (llt.info() != Eigen::Success)
      throw NumericalError("update_step: innovation covariance not positive definite");
  }

  StepCache cache;
  cache.innovation = y - C * pred.mean - m;
  cache.K = llt.solve(C * pred.cov).transpose();  // nx x ny
  cache.L = Matrix();                             // filled by the backward pass

  GaussianBelief post;
  post.mean = pred.mean + cache.K * cache.innovation;
  Matrix I_KC = Matrix::Identity(nx, nx) - cache.K * C;
  post.cov = symmetrize(I_KC * pred.cov * I_KC.transpose() +
                        cache.K * r_diag.asDiagonal() * cache.K.transpose());
  return {post, cache};
}

std::pair<std::vector<GaussianBelief>, std::vector<Matrix>> rts_backward_pass(
    const std::vector<GaussianBelief>& filtered,
    const std::vector<GaussianBelief>& predicted, const Matrix& A) {
  require(!filtered.empty() && filtered.size() == predicted.size(),
          "rts_backward_pass: sequences must be aligned and non-empty");
  std::size_t T = filtered.size();
  std::vector<GaussianBelief> smoothed(T);
  std::vector<Matrix> gains(T > 0 ? T - 1 : 0);
  smoothed[T - 1] = filtered[T - 1];
  for (std::size_t k = T - 1; k-- > 0;) {
    Eigen::LLT<Matrix> llt(predicted[k + 1].cov);
    if (llt.info() != Eigen::Success) {
      Matrix jittered = predicted[k + 1].cov;
      jittered.diagonal().array() += 1e-12 * std::max(1.0, jittered.trace());
      llt.compute(jittered);
      if (llt.info() != Eigen::Success)
        throw NumericalError("rts_backward_pass: singular predicted covariance");
    }
    Matrix L = llt.solve(A * filtered[k].cov).transpose();  // Sigma_f A^T P_pred^{-1}
    smoothed[k].mean =
        filtered[k].mean + L * (smoothed[k + 1].mean - predicted[k + 1].mean);
    smoothed[k].cov = symmetrize(
        filtered[k].cov +
        L * (smoothed[k + 1].cov - predicted[k + 1].cov) * L.transpose());
    gains[k] = std::move(L);
  }
  return {std::move(smoothed), std::move(gains)};
}

namespace {

RunResult gaussian_forward(const ModelParams& params,
                           const GaussianMeasurement& noise,
                           const std::vector<Vector>& y) {
  params.validate(false);
  require(!y.empty(), "kalman: observation sequence must be non-empty");
  require(noise.mean.size() == params.ny() && noise.r_diag.size() == params.ny(),
          "kalman: noise dimension mismatch");
  std::size_t T = y.size();
  RunResult res;
  res.predicted.resize(T);
  res.filtered.resize(T);
  GaussianBelief prior{params.pi1, params.Sigma1};
  for (std::size_t k = 0; k < T; ++k) {
    res.predicted[k] = (k == 0) ? prior : predict_step(params, res.filtered[k - 1]);
    auto [post, cache] =
        update_step(res.predicted[k], params.C, y[k], noise.mean, noise.r_diag);
    res.filtered[k] = std::move(post);
  }
  return res;
}

}  // namespace

RunResult kalman_filter(const ModelParams& params, const GaussianMeasurement& noise,
                        const std::vector<Vector>& y) {
  return gaussian_forward(params, noise, y);
}

RunResult kalman_smoother(const ModelParams& params,
                          const GaussianMeasurement& noise,
                          const std::vector<Vector>& y) {
  RunResult res = gaussian_forward(params, noise, y);
  auto [smoothed, gains] = rts_backward_pass(res.filtered, res.predicted, params.A);
  res.smoothed = std::move(smoothed);
  res.iterations = 1;
  res.fb_passes = 1;
  return res;
}

RunResult adaptive_filter(const AdaptiveFilterConfig& config,
                          const ModelParams& params, const std::vector<Vector>& y) {
  config.validate();
  params.validate(false);
  require(params.ny() == 1, "adaptive_filter: scalar observations only");
  require(static_cast<int>(y.size()) > config.n_win,
          "adaptive_filter: need T > n_win");

  std::size_t T = y.size();
  RunResult res;
  res.predicted.resize(T);
  res.filtered.resize(T);
  GaussianBelief prior{params.pi1, params.Sigma1};
  std::deque<double> window;
  Vector m = Vector::Zero(1);
  for (std::size_t k = 0; k < T; ++k) {
    res.predicted[k] = (k == 0) ? prior : predict_step(params, res.filtered[k - 1]);
    double cpc = (params.C * res.predicted[k].cov * params.C.transpose())(0, 0);
    double r;
    if (static_cast<int>(window.size()) < config.n_win) {
      r = config.base_variance;
    } else {
      double mean_sq = 0.0;
      for (double d : window) mean_sq += d * d;
      mean_sq /= config.n_win;
      r = std::max(mean_sq - cpc, config.variance_floor);
    }
    double innovation = y[k](0) - (params.C * res.predicted[k].mean)(0);
    window.push_back(innovation);
    if (static_cast<int>(window.size()) > config.n_win) window.pop_front();

    Vector r_diag = Vector::Constant(1, r);
    auto [post, cache] = update_step(res.predicted[k], params.C, y[k], m, r_diag);
    res.filtered[k] = std::move(post);
  }
  return res;
}

}  // namespace alssm
