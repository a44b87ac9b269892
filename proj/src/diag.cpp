#include "alssm/diag.hpp"

#include <cmath>

#include "alssm/common.hpp"

namespace alssm {

void ScalarPrior::validate() const {
  require(std::isfinite(mean), "ScalarPrior: mean must be finite");
  require(var > 0.0, "ScalarPrior: var must be > 0");
}

double log_norm_cdf(double z) {
  if (z > -10.0) return std::log(0.5 * std::erfc(-z * M_SQRT1_2));
  // Tail: log phi(z) + log of the Mills ratio via the Laplace continued
  // fraction  m(t) = 1 / (t + 1/(t + 2/(t + 3/(t + ...)))),  t = -z.
  double t = -z;
  double cf = 0.0;
  for (int k = 80; k >= 1; --k) cf = static_cast<double>(k) / (t + cf);
  double mills = 1.0 / (t + cf);
  return -0.5 * z * z - 0.5 * std::log(2.0 * M_PI) + std::log(mills);
}

double exact_scalar_update(const ScalarPrior& prior, const ALParams& al, double y) {
  prior.validate();
  al.validate();
  double p = al.p, s = al.sigma, S = prior.var;
  double e = y - prior.mean - al.mu;  // effective innovation
  double sqrt_S = std::sqrt(S);

  // g(x) = w1 + w2 with
  //   w1 = exp(p^2 S/(2 s^2) - p e/s)       Phi( e/sqrt(S) - p sqrt(S)/s)
  //   w2 = exp((1-p)^2 S/(2 s^2) + (1-p)e/s) Phi(-e/sqrt(S) - (1-p) sqrt(S)/s)
  // and d log g / dx = (p w1 - (1-p) w2) / (s (w1 + w2)).
  double log_w1 = p * p * S / (2.0 * s * s) - p * e / s +
                  log_norm_cdf(e / sqrt_S - p * sqrt_S / s);
  double log_w2 = (1.0 - p) * (1.0 - p) * S / (2.0 * s * s) + (1.0 - p) * e / s +
                  log_norm_cdf(-e / sqrt_S - (1.0 - p) * sqrt_S / s);
  double hi = std::max(log_w1, log_w2);
  if (!std::isfinite(hi))
    throw NumericalError("exact_scalar_update: non-finite g evaluation");
  double a = std::exp(log_w1 - hi);
  double b = std::exp(log_w2 - hi);
  double dlogg = (p * a - (1.0 - p) * b) / (s * (a + b));
  return S * dlogg;
}

double fast_filter_single_update(const ScalarPrior& prior, const ALParams& al,
                                 double y, double tol, int max_iters) {
  prior.validate();
  al.validate();
  double lambda = 1.0;
  double xk = prior.mean, Sk = prior.var;
  for (int j = 0; j < max_iters; ++j) {
    double pq = al.p * (1.0 - al.p);
    double r = al.sigma * al.sigma / (lambda * pq);
    double m = al.mu + (0.5 - al.p) * al.sigma / (lambda * pq);
    double K = prior.var / (prior.var + r);
    double xn = prior.mean + K * (y - prior.mean - m);
    double Sn = prior.var - K * prior.var;
    double u = (y - xn - al.mu) * (y - xn - al.mu) + Sn;
    lambda = al.sigma / (2.0 * pq * std::sqrt(u));
    double delta = std::abs(xn - xk) + std::abs(Sn - Sk);
    xk = xn;
    Sk = Sn;
    if (delta < tol * (1.0 + std::abs(xk) + Sk)) break;
  }
  return xk - prior.mean;
}

std::vector<ResponseRow> response_curve(const ScalarPrior& prior, const ALParams& al,
                                        const std::vector<double>& innovation_grid) {
  prior.validate();
  al.validate();
  ALMoments mom = al_moments(al);
  double K = prior.var / (prior.var + mom.variance);
  std::vector<ResponseRow> rows;
  rows.reserve(innovation_grid.size());
  for (double d : innovation_grid) {
    require(std::isfinite(d), "response_curve: innovation grid must be finite");
    ResponseRow row;
    row.innovation = d;
    row.exact = exact_scalar_update(prior, al, prior.mean + d);
    row.fast_al = fast_filter_single_update(prior, al, prior.mean + d);
    row.kalman = K * (d - mom.mean);  // moment-matched Gaussian noise
    rows.push_back(row);
  }
  return rows;
}

std::vector<AdaptationRow> adaptation_curve(const ALParams& al,
                                            const std::vector<double>& u_grid) {
  al.validate();
  std::vector<AdaptationRow> rows;
  rows.reserve(u_grid.size());
  for (double u : u_grid) {
    require(u >= 0.0, "adaptation_curve: u must be >= 0");
    AdaptationRow row;
    row.sqrt_u = std::sqrt(u);
    row.r = 2.0 * al.sigma * row.sqrt_u;
    row.m = al.mu + (1.0 - 2.0 * al.p) * row.sqrt_u;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace alssm
