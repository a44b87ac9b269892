#include "alssm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace alssm {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid) - 1, v.end());
  return 0.5 * (hi + v[mid - 1]);
}

Matrix rotation2(double angle) {
  Matrix A(2, 2);
  A << std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle);
  return A;
}

}  // namespace

void Scenario::validate() const {
  model.validate(false);
  noise.validate();
  require(T >= 1, "Scenario: T must be >= 1");
}

SimData simulate(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  const ModelParams& m = scenario.model;
  Index nx = m.nx();
  Index ny = m.ny();
  Rng init_rng(seed, 0x1);
  Rng process_rng(seed, 0x2);
  Rng meas_rng(seed, 0x3);

  // Symmetric PSD square roots; exact for semidefinite (including zero)
  // covariances where a plain Cholesky would need jitter.
  auto psd_sqrt = [](const Matrix& mat) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(mat));
    if (es.info() != Eigen::Success)
      throw NumericalError("simulate: covariance eigendecomposition failed");
    Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return Matrix(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
  };
  Matrix cholS1 = psd_sqrt(m.Sigma1);
  Matrix cholQ = psd_sqrt(m.Q);

  auto draw_normal_vec = [nx](Rng& rng) {
    Vector z(nx);
    for (Index i = 0; i < nx; ++i) z(i) = rng.normal();
    return z;
  };

  SimData data;
  data.states.resize(static_cast<std::size_t>(scenario.T));
  data.observations.resize(static_cast<std::size_t>(scenario.T));
  data.states[0] = m.pi1 + cholS1 * draw_normal_vec(init_rng);
  for (int k = 1; k < scenario.T; ++k)
    data.states[static_cast<std::size_t>(k)] =
        m.A * data.states[static_cast<std::size_t>(k - 1)] + m.b +
        cholQ * draw_normal_vec(process_rng);
  for (int k = 0; k < scenario.T; ++k) {
    Vector v(ny);
    for (Index i = 0; i < ny; ++i) v(i) = noise_draw(scenario.noise, meas_rng);
    data.observations[static_cast<std::size_t>(k)] =
        m.C * data.states[static_cast<std::size_t>(k)] + v;
  }
  return data;
}

MetricEntry metrics(const std::vector<Vector>& estimates,
                    const std::vector<Vector>& truth) {
  require(!estimates.empty() && estimates.size() == truth.size(),
          "metrics: estimate/truth lengths differ");
  MetricEntry out;
  double sq_sum = 0.0;
  double mape_sum = 0.0;
  long mape_count = 0;
  std::size_t entries = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    require(estimates[k].size() == truth[k].size(), "metrics: dimension mismatch");
    for (Index i = 0; i < truth[k].size(); ++i) {
      double err = std::abs(estimates[k](i) - truth[k](i));
      sq_sum += err * err;
      out.emax = std::max(out.emax, err);
      ++entries;
      if (truth[k](i) != 0.0) {
        mape_sum += std::abs(estimates[k](i) / truth[k](i) - 1.0);
        ++mape_count;
      } else {
        ++out.mape_skipped;
      }
    }
  }
  out.rmse = std::sqrt(sq_sum / static_cast<double>(entries));
  out.mape = mape_count > 0 ? mape_sum / static_cast<double>(mape_count) : 0.0;
  return out;
}

int worker_count() {
  if (const char* env = std::getenv("ALSSM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Experiment I

Exp1Config Exp1Config::defaults() {
  Exp1Config cfg;
  cfg.families = {
      {"gaussian", NoiseSpec{GaussianNoise{0.0, 1.0}}},
      {"skew_normal", NoiseSpec{SkewNormalNoise{0.0, 1.0, 4.0}}},
      {"laplace", NoiseSpec{LaplaceNoise{0.0, 1.0}}},
      {"student_t", NoiseSpec{StudentTNoise{0.0, 1.0, 5.0}}},
      {"asymmetric_laplace", NoiseSpec{ALParams{0.0, 0.2, 0.3}}},
      {"gh_skew_t", NoiseSpec{GhSkewTNoise{0.0, 0.3, 40.0, 6.0}}},
  };
  cfg.ny_sweep = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  cfg.sweep_noise = NoiseSpec{GhSkewTNoise{0.0, 0.3, 40.0, 6.0}};
  return cfg;
}

namespace {

// Rows of C sampled from an isotropic Gaussian and normalized so that
// |C_{i,1} + C_{i,2}| = 1 (signed sum, as stated; rows with a tiny sum are
// resampled to keep the normalization well-conditioned).
Matrix sample_measurement_matrix(Index ny, Rng& rng) {
  Matrix C(ny, 2);
  for (Index i = 0; i < ny; ++i) {
    for (;;) {
      double c1 = rng.normal();
      double c2 = rng.normal();
      double s = c1 + c2;
      if (std::abs(s) < 0.1) continue;
      C(i, 0) = c1 / std::abs(s);
      C(i, 1) = c2 / std::abs(s);
      break;
    }
  }
  return C;
}

ModelParams exp1_model(const Exp1Config& cfg, Index ny, std::uint64_t seed) {
  ModelParams m;
  m.A = rotation2(0.2 * M_PI);
  Rng c_rng(seed, 0x10);
  m.C = sample_measurement_matrix(ny, c_rng);
  m.b = Vector::Zero(2);
  m.Q = cfg.q * Matrix::Identity(2, 2);
  m.pi1 = Vector::Zero(2);
  m.Sigma1 = Matrix::Identity(2, 2);
  return m;
}

std::vector<Vector> slice(const std::vector<Vector>& v, std::size_t from,
                          std::size_t to) {
  return {v.begin() + static_cast<long>(from), v.begin() + static_cast<long>(to)};
}

}  // namespace

Exp1Result run_experiment1(const Exp1Config& config) {
  Exp1Config cfg = config;
  if (cfg.families.empty()) cfg.families = Exp1Config::defaults().families;
  if (cfg.ny_sweep.empty()) cfg.ny_sweep = Exp1Config::defaults().ny_sweep;

  Exp1Result result;
  std::size_t n_cells = cfg.families.size() * static_cast<std::size_t>(cfg.n_seeds);
  result.cells.resize(n_cells);

  parallel_for(n_cells, [&](std::size_t idx) {
    std::size_t f = idx / static_cast<std::size_t>(cfg.n_seeds);
    std::uint64_t seed = cfg.seed0 + idx % static_cast<std::size_t>(cfg.n_seeds);
    Exp1Cell& cell = result.cells[idx];
    cell.family = cfg.families[f].first;
    cell.seed = seed;
    try {
      ModelParams truth = exp1_model(cfg, 1, seed);
      Scenario sc{truth, cfg.families[f].second, cfg.T_train + cfg.T_eval};
      SimData data = simulate(sc, seed);
      auto y_train = slice(data.observations, 0, static_cast<std::size_t>(cfg.T_train));

      // Noise parameters are learned on the training half; the system
      // matrices are treated as known, matching how the benchmark smoothers
      // are configured.
      ModelParams init = truth;
      init.al.assign(1, ALParams{0.0, 0.5, 1.0});
      LearnConfig lc;
      lc.fixed.A = lc.fixed.C = lc.fixed.b = lc.fixed.Q = true;
      lc.fixed.pi1 = lc.fixed.Sigma1 = true;
      EmResult em = single_loop_em(y_train, init, lc);
      cell.learned_al = em.theta.al[0];

      GaussianLearnConfig gc;
      gc.fixed = lc.fixed;
      gc.fix_noise_mean = false;
      GaussianMeasurement gn{Vector::Zero(1), Vector::Constant(1, 1.0)};
      GaussianEmResult gem = gaussian_em(y_train, init, gn, gc);

      InferenceConfig icfg;
      auto t0 = std::chrono::steady_clock::now();
      SmootherOutput al_out = al_smoother(em.theta, data.observations, icfg);
      double al_secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      t0 = std::chrono::steady_clock::now();
      RunResult g_out = kalman_smoother(gem.theta, gem.noise, data.observations);
      double g_secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      std::size_t from = static_cast<std::size_t>(cfg.T_train);
      std::size_t to = data.states.size();
      std::vector<Vector> truth_eval = slice(data.states, from, to);
      std::vector<Vector> al_means, g_means;
      for (std::size_t k = from; k < to; ++k) {
        al_means.push_back(al_out.run.smoothed[k].mean);
        g_means.push_back(g_out.smoothed[k].mean);
      }
      cell.al = metrics(al_means, truth_eval);
      cell.al.cpu_seconds = al_secs;
      cell.al.fb_passes = al_out.run.fb_passes + em.fb_passes;
      cell.gauss = metrics(g_means, truth_eval);
      cell.gauss.cpu_seconds = g_secs;
      cell.gauss.fb_passes = 1 + gem.fb_passes;
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  });

  if (cfg.run_sweep) {
    std::size_t n_sweep = cfg.ny_sweep.size() * static_cast<std::size_t>(cfg.n_seeds);
    result.sweep.resize(n_sweep);
    parallel_for(n_sweep, [&](std::size_t idx) {
      std::size_t d = idx / static_cast<std::size_t>(cfg.n_seeds);
      std::uint64_t seed = cfg.seed0 + idx % static_cast<std::size_t>(cfg.n_seeds);
      Exp1SweepCell& cell = result.sweep[idx];
      cell.ny = cfg.ny_sweep[d];
      cell.seed = seed;
      try {
        ModelParams truth = exp1_model(cfg, cell.ny, seed);
        Scenario sc{truth, cfg.sweep_noise, cfg.T_train + cfg.T_eval};
        SimData data = simulate(sc, seed);
        auto y_train = slice(data.observations, 0, static_cast<std::size_t>(cfg.T_train));

        ModelParams init = truth;
        init.al.assign(static_cast<std::size_t>(cell.ny), ALParams{0.0, 0.5, 1.0});
        LearnConfig lc;
        lc.fixed.A = lc.fixed.C = lc.fixed.b = lc.fixed.Q = true;
        lc.fixed.pi1 = lc.fixed.Sigma1 = true;
        EmResult em = single_loop_em(y_train, init, lc);

        InferenceConfig icfg;
        auto t0 = std::chrono::steady_clock::now();
        SmootherOutput al_out = al_smoother(em.theta, data.observations, icfg);
        double al_secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();

        std::size_t from = static_cast<std::size_t>(cfg.T_train);
        std::vector<Vector> truth_eval = slice(data.states, from, data.states.size());
        std::vector<Vector> al_means;
        for (std::size_t k = from; k < data.states.size(); ++k)
          al_means.push_back(al_out.run.smoothed[k].mean);
        cell.al = metrics(al_means, truth_eval);
        cell.al.cpu_seconds = al_secs;
        cell.al.fb_passes = al_out.run.fb_passes + em.fb_passes;
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
      }
    });
  }
  return result;
}

// ---------------------------------------------------------------------------
// Experiment II

Exp2Config Exp2Config::defaults() { return Exp2Config{}; }

namespace {

ModelParams exp2_model(const Exp2Config& cfg) {
  ModelParams m;
  m.A = Matrix::Identity(1, 1);
  m.C = Matrix::Identity(1, 1);
  m.b = Vector::Zero(1);
  m.Q = cfg.q * Matrix::Identity(1, 1);
  m.pi1 = Vector::Zero(1);
  m.Sigma1 = Matrix::Identity(1, 1);
  return m;
}

NoiseSpec exp2_noise(const Exp2Config& cfg) {
  ContaminatedGaussianNoise cg;
  cg.weights = {1.0 - cfg.outlier_weight, cfg.outlier_weight};
  cg.means = {0.0, cfg.outlier_mean};
  cg.variances = {cfg.r, cfg.outlier_var_factor * cfg.r};
  return NoiseSpec{std::move(cg)};
}

double robust_sigma_init(const std::vector<Vector>& y) {
  std::vector<double> eps(y.size() - 1);
  for (std::size_t k = 1; k < y.size(); ++k) eps[k - 1] = std::abs(y[k](0) - y[k - 1](0));
  std::nth_element(eps.begin(), eps.begin() + static_cast<long>(eps.size() / 2),
                   eps.end());
  return std::max(eps[eps.size() / 2] / (2.0 * std::log(2.0)), 1e-3);
}

}  // namespace

Exp2Result run_experiment2(const Exp2Config& cfg) {
  ModelParams model = exp2_model(cfg);
  NoiseSpec noise = exp2_noise(cfg);
  Exp2Result result;
  Exp2Learned& learned = result.learned;
  learned.p_values.resize(static_cast<std::size_t>(cfg.n_train));
  learned.sigma_values.resize(static_cast<std::size_t>(cfg.n_train));
  learned.sigma_l_values.resize(static_cast<std::size_t>(cfg.n_train));
  learned.r_values.resize(static_cast<std::size_t>(cfg.n_train));

  parallel_for(static_cast<std::size_t>(cfg.n_train), [&](std::size_t i) {
    std::uint64_t seed = cfg.train_seed0 + i;
    SimData data = simulate(Scenario{model, noise, cfg.T}, seed);

    // AL(0, p, sigma): mu fixed at zero; system matrices known.
    ModelParams init = model;
    init.al.assign(1, ALParams{0.0, 0.5, robust_sigma_init(data.observations)});
    LearnConfig lc;
    lc.fixed.A = lc.fixed.C = lc.fixed.b = lc.fixed.Q = true;
    lc.fixed.pi1 = lc.fixed.Sigma1 = true;
    lc.fixed.mu = true;
    EmResult em = single_loop_em(data.observations, init, lc);
    learned.p_values[i] = em.theta.al[0].p;
    learned.sigma_values[i] = em.theta.al[0].sigma;

    // Laplace variant: p frozen at 1/2.
    LearnConfig ll = lc;
    ll.fixed.p = true;
    EmResult eml = single_loop_em(data.observations, init, ll);
    learned.sigma_l_values[i] = eml.theta.al[0].sigma;

    // Gaussian EM for the Kalman baseline (zero noise mean).
    GaussianLearnConfig gc;
    gc.fixed = lc.fixed;
    GaussianMeasurement gn{Vector::Zero(1), Vector::Constant(1, 1.0)};
    GaussianEmResult gem = gaussian_em(data.observations, init, gn, gc);
    learned.r_values[i] = gem.noise.r_diag(0);
  });

  learned.p_median = median(learned.p_values);
  learned.sigma_median = median(learned.sigma_values);
  learned.sigma_l_median = median(learned.sigma_l_values);
  learned.r_median = median(learned.r_values);

  ModelParams theta_al = model;
  theta_al.al.assign(1, ALParams{0.0, learned.p_median, learned.sigma_median});
  ModelParams theta_lap = model;
  theta_lap.al.assign(1, ALParams{0.0, 0.5, learned.sigma_l_median});
  GaussianMeasurement kal_noise{Vector::Zero(1),
                                Vector::Constant(1, learned.r_median)};

  const std::vector<std::string> methods = {"fast_al", "exact_al", "laplace",
                                            "kalman", "adaptive"};
  for (const auto& m : methods)
    result.test_metrics[m].resize(static_cast<std::size_t>(cfg.n_test));

  int exact_count = cfg.exact_test_count < 0 ? cfg.n_test
                                             : std::min(cfg.exact_test_count, cfg.n_test);
  parallel_for(static_cast<std::size_t>(cfg.n_test), [&](std::size_t i) {
    std::uint64_t seed = cfg.test_seed0 + i;
    SimData data = simulate(Scenario{model, noise, cfg.T}, seed);
    InferenceConfig icfg;

    auto run_method = [&](const std::string& name,
                          const std::function<std::vector<Vector>()>& run,
                          long* fb = nullptr) {
      auto t0 = std::chrono::steady_clock::now();
      std::vector<Vector> est = run();
      MetricEntry entry = metrics(est, data.states);
      entry.cpu_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (fb) entry.fb_passes = *fb;
      result.test_metrics[name][i] = entry;
    };

    run_method("fast_al", [&] {
      auto [run, vs] = fast_al_filter(theta_al, data.observations, icfg);
      std::vector<Vector> est;
      for (const auto& fbel : run.filtered) est.push_back(fbel.mean);
      return est;
    });
    if (static_cast<int>(i) < exact_count) {
      run_method("exact_al", [&] {
        RunResult run = exact_al_filter(theta_al, data.observations, icfg);
        std::vector<Vector> est;
        for (const auto& fbel : run.filtered) est.push_back(fbel.mean);
        return est;
      });
    }
    run_method("laplace", [&] {
      auto [run, vs] = fast_al_filter(theta_lap, data.observations, icfg);
      std::vector<Vector> est;
      for (const auto& fbel : run.filtered) est.push_back(fbel.mean);
      return est;
    });
    run_method("kalman", [&] {
      RunResult run = kalman_filter(model, kal_noise, data.observations);
      std::vector<Vector> est;
      for (const auto& fbel : run.filtered) est.push_back(fbel.mean);
      return est;
    });
    run_method("adaptive", [&] {
      RunResult run = adaptive_filter(cfg.adaptive, model, data.observations);
      std::vector<Vector> est;
      for (const auto& fbel : run.filtered) est.push_back(fbel.mean);
      return est;
    });
  });

  for (const auto& m : methods) {
    std::vector<double> rmse, emax, cpu;
    std::size_t limit = (m == "exact_al") ? static_cast<std::size_t>(exact_count)
                                          : result.test_metrics[m].size();
    for (std::size_t i = 0; i < limit; ++i) {
      rmse.push_back(result.test_metrics[m][i].rmse);
      emax.push_back(result.test_metrics[m][i].emax);
      cpu.push_back(result.test_metrics[m][i].cpu_seconds);
    }
    result.median_rmse[m] = median(rmse);
    result.median_emax[m] = median(emax);
    result.median_cpu[m] = median(cpu);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Stochastic volatility

std::vector<double> log_squared_returns(const std::vector<double>& prices) {
  require(prices.size() >= 101, "sv: need at least 100 returns");
  std::vector<double> r(prices.size() - 1);
  for (std::size_t k = 1; k < prices.size(); ++k) {
    require(prices[k] > 0.0, "sv: prices must be positive");
    r[k - 1] = std::log(prices[k] / prices[k - 1]);
  }
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(r.size());
  std::vector<double> out(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    double d = r[k] - mean;
    double mag = std::max(std::abs(d), 1e-12);  // zero-return guard
    out[k] = std::log(mag * mag);
  }
  return out;
}

namespace {

ModelParams sv_base_model(const std::vector<double>& log_y2) {
  double mean = 0.0;
  for (double v : log_y2) mean += v;
  mean /= static_cast<double>(log_y2.size());
  ModelParams m;
  m.A = 0.9 * Matrix::Identity(1, 1);
  m.C = Matrix::Identity(1, 1);
  m.b = Vector::Zero(1);
  m.Q = 0.05 * Matrix::Identity(1, 1);
  m.pi1 = Vector::Constant(1, mean + 1.27);  // noise mean removed
  m.Sigma1 = Matrix::Identity(1, 1);
  return m;
}

std::vector<Vector> wrap_series(const std::vector<double>& values) {
  std::vector<Vector> out(values.size());
  for (std::size_t k = 0; k < values.size(); ++k)
    out[k] = Vector::Constant(1, values[k]);
  return out;
}

double mape_against(const std::vector<double>& estimate,
                    const std::vector<double>& reference) {
  require(estimate.size() == reference.size(), "sv: reference length mismatch");
  double acc = 0.0;
  long count = 0;
  for (std::size_t k = 0; k < estimate.size(); ++k) {
    if (reference[k] == 0.0) continue;
    acc += std::abs(estimate[k] / reference[k] - 1.0);
    ++count;
  }
  return count > 0 ? acc / static_cast<double>(count) : 0.0;
}

}  // namespace

SvResult run_sv_on_log_y2(const std::vector<double>& log_y2, const SvConfig& config,
                          const std::vector<double>* reference_volatility) {
  require(log_y2.size() >= 100, "sv: need at least 100 observations");
  SvResult result;
  result.log_y2 = log_y2;
  std::vector<Vector> y = wrap_series(log_y2);
  ModelParams base = sv_base_model(log_y2);

  {  // AL fit: measurement noise fixed, (phi, gamma, sigma_eta^2) learned.
    ModelParams init = base;
    init.al.assign(1, config.al_noise);
    LearnConfig lc;
    lc.fixed.C = true;
    lc.fixed.mu = lc.fixed.p = lc.fixed.sigma = true;
    lc.outer_tol = config.outer_tol;
    lc.outer_max_iters = config.outer_max_iters;
    auto t0 = std::chrono::steady_clock::now();
    EmResult em = single_loop_em(y, init, lc);
    InferenceConfig icfg;
    SmootherOutput smooth = al_smoother(em.theta, y, icfg);
    result.al.cpu_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.al.phi = em.theta.A(0, 0);
    result.al.gamma = em.theta.b(0);
    result.al.sigma_eta2 = em.theta.Q(0, 0);
    result.al.fb_passes = em.fb_passes + smooth.run.fb_passes;
    result.al.volatility.resize(y.size());
    for (std::size_t k = 0; k < y.size(); ++k)
      result.al.volatility[k] = std::exp(0.5 * smooth.run.smoothed[k].mean(0));
  }

  {  // Gaussian quasi-likelihood fit with N(-1.27, pi^2/2) fixed.
    double gvar = config.gauss_var > 0.0 ? config.gauss_var : M_PI * M_PI / 2.0;
    GaussianMeasurement gn{Vector::Constant(1, config.gauss_mean),
                           Vector::Constant(1, gvar)};
    GaussianLearnConfig gc;
    gc.fixed.C = true;
    gc.fix_noise_mean = true;
    gc.fix_noise_var = true;
    gc.outer_tol = config.outer_tol;
    gc.outer_max_iters = config.outer_max_iters;
    auto t0 = std::chrono::steady_clock::now();
    GaussianEmResult gem = gaussian_em(y, base, gn, gc);
    RunResult smooth = kalman_smoother(gem.theta, gem.noise, y);
    result.gauss.cpu_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.gauss.phi = gem.theta.A(0, 0);
    result.gauss.gamma = gem.theta.b(0);
    result.gauss.sigma_eta2 = gem.theta.Q(0, 0);
    result.gauss.fb_passes = gem.fb_passes + 1;
    result.gauss.volatility.resize(y.size());
    for (std::size_t k = 0; k < y.size(); ++k)
      result.gauss.volatility[k] = std::exp(0.5 * smooth.smoothed[k].mean(0));
  }

  if (reference_volatility) {
    result.mape_al = mape_against(result.al.volatility, *reference_volatility);
    result.mape_gauss = mape_against(result.gauss.volatility, *reference_volatility);
  }
  return result;
}

SvResult run_sv(const std::vector<double>& prices, const SvConfig& config,
                const std::vector<double>* reference_volatility) {
  return run_sv_on_log_y2(log_squared_returns(prices), config, reference_volatility);
}

}  // namespace alssm
