#ifndef ALSSM_DISTS_HPP
#define ALSSM_DISTS_HPP

#include <cstddef>
#include <variant>
#include <vector>

#include "alssm/rng.hpp"

namespace alssm {

// Asymmetric Laplace AL(mu, p, sigma):
//   f(v) = p(1-p)/sigma * exp(-(|v-mu| + (2p-1)(v-mu)) / (2 sigma)),
// right tail rate p/sigma, left tail rate (1-p)/sigma.
struct ALParams {
  double mu = 0.0;
  double p = 0.5;
  double sigma = 1.0;

  void validate() const;  // requires 0 < p < 1, sigma > 0
};

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;
};

struct ALMoments {
  double mean = 0.0;
  double variance = 0.0;
  double third_central = 0.0;
  double fourth_central = 0.0;
};

double al_logpdf(const ALParams& params, double v);

// d log f(v) / dv; undefined at the kink v == mu (throws NumericalError so a
// silent one-sided convention cannot mask a bug).
double al_influence(const ALParams& params, double v);

// Two-sided exponential decomposition: with probability 1-p emit
// mu + Exp(rate p/sigma), else mu - Exp(rate (1-p)/sigma).
double al_draw(const ALParams& params, Rng& rng);
std::vector<double> al_sample(const ALParams& params, Rng& rng, std::size_t n);
std::vector<double> al_sample(const ALParams& params, std::uint64_t seed,
                              std::size_t n);

// Closed-form central moments (cumulants of the difference of the two
// exponentials plus the mixture mean).
ALMoments al_moments(const ALParams& params);

// Lemma of the scale-mixture construction: v | lambda is Gaussian with
//   mean mu + (1/2 - p) sigma / (lambda p (1-p)),
//   var  sigma^2 / (lambda p (1-p)).
MeanVar al_conditional_given_lambda(const ALParams& params, double lambda);

// Variational posterior of the auxiliary scale: inverse Gaussian with
//   mean sigma / (2 p (1-p) sqrt(u)),  shape 1 / (4 p (1-p)).
struct InvGaussianParams {
  double mean = 1.0;
  double shape = 1.0;

  void validate() const;
};

InvGaussianParams lambda_posterior(const ALParams& params, double u);

// (E[lambda], E[1/lambda]) = (mean, 1/mean + 1/shape).
struct InvGaussianExpectations {
  double e_lambda = 0.0;
  double e_inv_lambda = 0.0;
};

InvGaussianExpectations inv_gaussian_expectations(const InvGaussianParams& ig);

// ---------------------------------------------------------------------------
// Measurement-noise families used by the benchmark harness.

struct GaussianNoise {
  double mean = 0.0;
  double sd = 1.0;
};

struct LaplaceNoise {
  double mean = 0.0;
  double scale = 1.0;  // density (1/2b) exp(-|v-mean|/b)
};

struct StudentTNoise {
  double mean = 0.0;
  double scale = 1.0;
  double nu = 5.0;  // > 2 so the variance is finite
};

struct SkewNormalNoise {
  double location = 0.0;
  double scale = 1.0;
  double shape = 0.0;  // Azzalini alpha
};

// Normal variance-mean mixture v = location + scale*(beta W + sqrt(W) Z),
// W ~ InverseGamma(nu/2, nu/2).
struct GhSkewTNoise {
  double location = 0.0;
  double scale = 1.0;
  double beta = 0.0;
  double nu = 6.0;  // > 2 (and > 4 for finite variance when beta != 0)
};

struct ContaminatedGaussianNoise {
  std::vector<double> weights;    // in [0,1], summing to 1
  std::vector<double> means;
  std::vector<double> variances;  // > 0
};

struct NoiseSpec {
  std::variant<GaussianNoise, LaplaceNoise, StudentTNoise, SkewNormalNoise,
               GhSkewTNoise, ALParams, ContaminatedGaussianNoise>
      family;

  void validate() const;
};

double noise_draw(const NoiseSpec& spec, Rng& rng);
std::vector<double> noise_sample(const NoiseSpec& spec, Rng& rng, std::size_t n);
std::vector<double> noise_sample(const NoiseSpec& spec, std::uint64_t seed,
                                 std::size_t n);

}  // namespace alssm

#endif  // ALSSM_DISTS_HPP
