#ifndef ALSSM_BENCH_HPP
#define ALSSM_BENCH_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alssm/learn.hpp"

namespace alssm {

struct Scenario {
  ModelParams model;
  NoiseSpec noise;
  int T = 1000;

  void validate() const;
};

struct SimData {
  std::vector<Vector> states;        // T x nx
  std::vector<Vector> observations;  // T x ny
};

// x_1 ~ N(pi1, Sigma1); x_{k+1} = A x_k + b + w_k; y_k = C x_k + v_k with
// v_k drawn component-wise from the noise spec. Separate sub-streams for the
// initial state, the process noise, and the measurement noise.
SimData simulate(const Scenario& scenario, std::uint64_t seed);

struct MetricEntry {
  double rmse = 0.0;
  double emax = 0.0;
  double mape = 0.0;
  long mape_skipped = 0;  // zero-truth entries excluded from MAPE
  double cpu_seconds = 0.0;
  long fb_passes = 0;
};

MetricEntry metrics(const std::vector<Vector>& estimates,
                    const std::vector<Vector>& truth);

// Worker pool over independent cells; results land at their cell index so
// aggregation never depends on completion order. Worker count comes from
// ALSSM_THREADS when set, logical cores otherwise.
int worker_count();
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Experiment I: applicability across noise families (two-state rotation
// model), univariate cells plus the observation-dimension sweep.

struct Exp1Config {
  int T_train = 1500;
  int T_eval = 1500;
  int n_seeds = 10;
  std::uint64_t seed0 = 1;
  double q = 0.05;
  std::vector<std::pair<std::string, NoiseSpec>> families;  // empty = defaults
  std::vector<int> ny_sweep;                                // empty = {1..10}
  NoiseSpec sweep_noise;  // per-sensor noise for the sweep (gh_skew_t default)
  bool run_sweep = true;

  static Exp1Config defaults();
};

struct Exp1Cell {
  std::string family;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricEntry al;
  MetricEntry gauss;
  ALParams learned_al;  // first component
};

struct Exp1SweepCell {
  int ny = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricEntry al;
};

struct Exp1Result {
  std::vector<Exp1Cell> cells;
  std::vector<Exp1SweepCell> sweep;
};

Exp1Result run_experiment1(const Exp1Config& config);

// ---------------------------------------------------------------------------
// Experiment II: robustness to contaminated Gaussian noise on the random-walk
// model; learns (p, sigma) with mu fixed at 0, then compares filters.

struct Exp2Config {
  int T = 1000;
  int n_train = 10;
  int n_test = 50;
  std::uint64_t train_seed0 = 100;
  std::uint64_t test_seed0 = 900;
  double q = 0.05;
  double r = 0.01;
  double outlier_weight = 0.2;
  double outlier_mean = 2.0;
  double outlier_var_factor = 50.0;
  AdaptiveFilterConfig adaptive;
  int exact_test_count = -1;  // -1 = all test seeds

  static Exp2Config defaults();
};

struct Exp2Learned {
  std::vector<double> p_values;       // per training seed
  std::vector<double> sigma_values;
  std::vector<double> sigma_l_values; // Laplace variant (p frozen at 0.5)
  std::vector<double> r_values;       // Gaussian EM measurement variance
  double p_median = 0.0;
  double sigma_median = 0.0;
  double sigma_l_median = 0.0;
  double r_median = 0.0;
};

struct Exp2Result {
  Exp2Learned learned;
  // method -> per-test-seed metrics (methods: fast_al, exact_al, laplace,
  // kalman, adaptive)
  std::map<std::string, std::vector<MetricEntry>> test_metrics;
  std::map<std::string, double> median_rmse;
  std::map<std::string, double> median_emax;
  std::map<std::string, double> median_cpu;
};

Exp2Result run_experiment2(const Exp2Config& config);

// ---------------------------------------------------------------------------
// Stochastic volatility application: ln(y^2) linearization with the noise
// fixed to AL(0.48, 0.8, 0.47) or N(-1.27, pi^2/2); learns (phi, gamma,
// sigma_eta) with C = 1 fixed and recovers sigma_k = exp(h_{k|T}/2).

struct SvConfig {
  ALParams al_noise{0.48, 0.8, 0.47};
  double gauss_mean = -1.27;
  double gauss_var = 0.0;  // 0 = pi^2/2
  double outer_tol = 1e-5;
  int outer_max_iters = 500;
};

struct SvFit {
  double phi = 0.0;
  double gamma = 0.0;
  double sigma_eta2 = 0.0;
  std::vector<double> volatility;  // exp(h_{k|T}/2)
  long fb_passes = 0;
  double cpu_seconds = 0.0;
};

struct SvResult {
  SvFit al;
  SvFit gauss;
  std::vector<double> log_y2;
  std::optional<double> mape_al;     // against a supplied reference series
  std::optional<double> mape_gauss;
};

// Demeaned log returns -> ln(y^2) (|return| floored at 1e-12), then both fits.
std::vector<double> log_squared_returns(const std::vector<double>& prices);
SvResult run_sv(const std::vector<double>& prices, const SvConfig& config,
                const std::vector<double>* reference_volatility = nullptr);
// Same fits on an already-transformed ln(y^2) series.
SvResult run_sv_on_log_y2(const std::vector<double>& log_y2, const SvConfig& config,
                          const std::vector<double>* reference_volatility = nullptr);

}  // namespace alssm

#endif  // ALSSM_BENCH_HPP
