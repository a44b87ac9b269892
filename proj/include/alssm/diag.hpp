#ifndef ALSSM_DIAG_HPP
#define ALSSM_DIAG_HPP

#include <vector>

#include "alssm/dists.hpp"

namespace alssm {

// Gaussian prior over the scalar state at one step.
struct ScalarPrior {
  double mean = 0.0;
  double var = 1.0;

  void validate() const;
};

// log Phi(z), accurate over the whole real line. Direct erfc up to moderate
// tails, Mills-ratio continued fraction beyond; mixing huge exponentials
// with tiny CDF tails is exactly where the exact-Bayes evaluation lives.
double log_norm_cdf(double z);

// Exact posterior-mean update for the scalar model: prior N(mean, var),
// likelihood AL(mu, p, sigma) around the observation. Computed from the
// analytic derivative of log g (the two exponential-times-CDF terms),
// evaluated in the log domain.
double exact_scalar_update(const ScalarPrior& prior, const ALParams& al, double y);

// Single-step fixed point of the fast filter's inner loop from the given
// prior (used by the response curve and its tests).
double fast_filter_single_update(const ScalarPrior& prior, const ALParams& al,
                                 double y, double tol = 1e-12, int max_iters = 500);

struct ResponseRow {
  double innovation = 0.0;
  double exact = 0.0;    // exact-Bayes posterior-mean shift
  double fast_al = 0.0;  // fast AL-filter fixed-point shift
  double kalman = 0.0;   // Gaussian update with moment-matched noise
};

// State-update response against innovation for the three rules; plot-ready.
std::vector<ResponseRow> response_curve(const ScalarPrior& prior, const ALParams& al,
                                        const std::vector<double>& innovation_grid);

struct AdaptationRow {
  double sqrt_u = 0.0;
  double r = 0.0;
  double m = 0.0;
};

// Effective-noise adaptation r = 2 sigma sqrt(u), m = mu + (1-2p) sqrt(u).
std::vector<AdaptationRow> adaptation_curve(const ALParams& al,
                                            const std::vector<double>& u_grid);

}  // namespace alssm

#endif  // ALSSM_DIAG_HPP
