// Acceptance suite: one checkable criterion per entry, each printing a single
// PASS/FAIL line with the measured quantities.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "alssm/bench.hpp"
#include "alssm/diag.hpp"
#include "alssm/learn.hpp"
#include "oracles.hpp"

using namespace alssm;

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ModelParams random_walk_model(double q, std::vector<ALParams> al) {
  ModelParams m;
  m.A = Matrix::Identity(1, 1);
  m.C = Matrix::Identity(1, 1);
  m.b = Vector::Zero(1);
  m.Q = Matrix::Constant(1, 1, q);
  m.pi1 = Vector::Zero(1);
  m.Sigma1 = Matrix::Identity(1, 1);
  m.al = std::move(al);
  return m;
}

Matrix rotation2() {
  Matrix A(2, 2);
  double th = 0.2 * M_PI;
  A << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
  return A;
}

NoiseSpec contaminated_noise() {
  ContaminatedGaussianNoise cg;
  cg.weights = {0.8, 0.2};
  cg.means = {0.0, 2.0};
  cg.variances = {0.01, 0.5};
  return NoiseSpec{cg};
}

// ---------------------------------------------------------------------------

bool criterion_hierarchy(std::string& detail) {
  double worst = 0.0;
  for (double p : {0.05, 0.2, 0.5, 0.8, 0.95}) {
    for (double sigma : {0.3, 1.0, 3.0}) {
      ALParams al{0.0, p, sigma};
      for (double v = -10.0; v <= 10.0; v += 0.5) {
        double direct = std::exp(al_logpdf(al, v));
        double marginal = oracle::al_density_via_hierarchy(al, v);
        worst = std::max(worst, std::abs(direct - marginal));
      }
    }
  }
  std::ostringstream os;
  os << "max |marginalized - direct| = " << worst << " over 15 (p, sigma) pairs";
  detail = os.str();
  return worst < 1e-6;
}

bool criterion_grid_oracle(std::string& detail) {
  ALParams al{0.0, 0.2, 0.3};
  double q = 0.05;
  ModelParams model = random_walk_model(q, {al});
  SimData data = simulate(Scenario{model, NoiseSpec{al}, 50}, 2);
  std::vector<double> y(50);
  for (int k = 0; k < 50; ++k) y[static_cast<std::size_t>(k)] = data.observations[static_cast<std::size_t>(k)](0);

  InferenceConfig cfg;
  cfg.tol = 1e-9;
  cfg.max_iters = 500;
  SmootherOutput out = al_smoother(model, data.observations, cfg);
  std::vector<double> grid_means = oracle::grid_bayes_smoother(al, q, 0.0, 1.0, y, 2001);
  double rms = 0.0;
  for (int k = 0; k < 50; ++k) {
    double d = out.run.smoothed[static_cast<std::size_t>(k)].mean(0) -
               grid_means[static_cast<std::size_t>(k)];
    rms += d * d;
  }
  rms = std::sqrt(rms / 50.0);
  std::ostringstream os;
  os << "RMS(AL-smoother - grid oracle) = " << rms << " (limit 0.05)";
  detail = os.str();
  return rms < 0.05;
}

bool criterion_brute_force(std::string& detail) {
  Rng rng(404);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Index nx = 1 + static_cast<Index>(rng.uniform() * 3);
    Index ny = 1 + static_cast<Index>(rng.uniform() * 2);
    ModelParams m;
    m.A = Matrix::NullaryExpr(nx, nx, [&]() { return 0.4 * rng.normal(); });
    m.A *= 0.8 / std::max(0.8, m.A.cwiseAbs().rowwise().sum().maxCoeff());
    m.C = Matrix::NullaryExpr(ny, nx, [&]() { return rng.normal(); });
    m.b = Vector::NullaryExpr(nx, [&]() { return 0.2 * rng.normal(); });
    Matrix g = Matrix::NullaryExpr(nx, nx, [&]() { return rng.normal(); });
    m.Q = symmetrize(g * g.transpose() / nx) + 0.2 * Matrix::Identity(nx, nx);
    m.pi1 = Vector::NullaryExpr(nx, [&]() { return rng.normal(); });
    Matrix h = Matrix::NullaryExpr(nx, nx, [&]() { return rng.normal(); });
    m.Sigma1 = symmetrize(h * h.transpose() / nx) + 0.3 * Matrix::Identity(nx, nx);
    GaussianMeasurement noise{
        Vector::NullaryExpr(ny, [&]() { return 0.2 * rng.normal(); }),
        Vector::NullaryExpr(ny, [&]() { return 0.3 + rng.uniform(); })};
    std::size_t T = 2 + static_cast<std::size_t>(rng.uniform() * 4);
    std::vector<Vector> y;
    for (std::size_t k = 0; k < T; ++k)
      y.push_back(Vector::NullaryExpr(ny, [&]() { return rng.normal(); }));

    RunResult run = kalman_smoother(m, noise, y);
    auto smoothed = oracle::joint_smoothed(m, noise, y);
    auto filtered = oracle::joint_filtered(m, noise, y);
    for (std::size_t k = 0; k < T; ++k) {
      worst = std::max(worst,
                       (run.smoothed[k].mean - smoothed.means[k]).cwiseAbs().maxCoeff());
      worst = std::max(worst,
                       (run.smoothed[k].cov - smoothed.covs[k]).cwiseAbs().maxCoeff());
      worst = std::max(worst,
                       (run.filtered[k].mean - filtered.means[k]).cwiseAbs().maxCoeff());
      worst = std::max(worst,
                       (run.filtered[k].cov - filtered.covs[k]).cwiseAbs().maxCoeff());
    }
  }
  std::ostringstream os;
  os << "max |filter/smoother - joint-Gaussian conditioning| = " << worst
     << " over 10 random models, T <= 6";
  detail = os.str();
  return worst < 1e-8;
}

bool criterion_mm(std::string& detail) {
  Rng rng(505);
  double worst_descent = 0.0;
  double worst_quartic = 0.0;
  double worst_grid_gap = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    MStepContext ctx;
    ctx.alpha1 = 0.5 + 20.0 * rng.uniform();
    ctx.alpha2 = 15.0 * rng.normal();
    ctx.alpha3 = 0.5 + 20.0 * rng.uniform();
    double T = 5.0 + 100.0 * rng.uniform();
    double p_old = 0.05 + 0.9 * rng.uniform();
    double p_new = p_update_mm(ctx, T, p_old);

    worst_descent =
        std::max(worst_descent, h_of_p(ctx, T, p_old) - h_of_p(ctx, T, p_new));

    double z1 = -ctx.alpha2 - ctx.alpha3 * (1.0 - 2.0 * p_old);
    double z2 = -0.5 * ctx.alpha1;
    if (std::abs(z1) > 1e-9 && p_new > 2e-4 && p_new < 1.0 - 2e-4) {
      double quartic = std::pow(p_new, 4) + (T / z1 - 2.0) * std::pow(p_new, 3) +
                       (1.0 - 1.5 * T / z1) * p_new * p_new +
                       0.5 * (T + z2) / z1 * p_new - 0.25 * z2 / z1;
      worst_quartic = std::max(worst_quartic, std::abs(quartic));
    }

    double best_p = 0.0, best_v = -1e300;
    const int n_grid = 100000;
    for (int g2 = 1; g2 < n_grid; ++g2) {
      double p = static_cast<double>(g2) / n_grid;
      double v = surrogate_h(ctx, T, p, p_old);
      if (v > best_v) {
        best_v = v;
        best_p = p;
      }
    }
    worst_grid_gap = std::max(worst_grid_gap, std::abs(p_new - best_p));
  }
  std::ostringstream os;
  os << "worst h-descent = " << worst_descent << ", max |quartic(p_new)| = "
     << worst_quartic << ", max grid-argmax gap = " << worst_grid_gap;
  detail = os.str();
  return worst_descent <= 1e-10 && worst_quartic < 1e-8 && worst_grid_gap < 1e-4;
}

bool criterion_stationarity(std::string& detail) {
  Rng rng(606);
  double worst = 0.0;
  for (int fixture = 0; fixture < 50; ++fixture) {
    Index nx = 1 + static_cast<Index>(rng.uniform() * 2);
    std::size_t T = 5 + static_cast<std::size_t>(rng.uniform() * 4);
    ModelParams theta;
    theta.A = Matrix::NullaryExpr(nx, nx, [&]() { return 0.3 * rng.normal(); });
    theta.C = Matrix::NullaryExpr(1, nx, [&]() { return rng.normal(); });
    theta.b = Vector::NullaryExpr(nx, [&]() { return 0.2 * rng.normal(); });
    Matrix g = Matrix::NullaryExpr(nx, nx, [&]() { return rng.normal(); });
    theta.Q = symmetrize(g * g.transpose() / nx) + 0.3 * Matrix::Identity(nx, nx);
    theta.pi1 = Vector::NullaryExpr(nx, [&]() { return rng.normal(); });
    Matrix h = Matrix::NullaryExpr(nx, nx, [&]() { return rng.normal(); });
    theta.Sigma1 =
        symmetrize(h * h.transpose() / nx) + 0.4 * Matrix::Identity(nx, nx);
    theta.al = {{0.3 * rng.normal(), 0.15 + 0.7 * rng.uniform(), 0.3 + rng.uniform()}};

    SufficientStats stats;
    std::vector<Vector> y(T);
    stats.x_smooth.resize(T);
    stats.sigma_smooth.resize(T);
    stats.P.resize(T);
    stats.P_cross.resize(T - 1);
    stats.L.resize(T - 1);
    stats.u.resize(static_cast<Index>(T), 1);
    stats.e_lambda.resize(static_cast<Index>(T), 1);
    stats.e_inv_lambda.resize(static_cast<Index>(T), 1);
    for (std::size_t k = 0; k < T; ++k) {
      stats.x_smooth[k] = Vector::NullaryExpr(nx, [&]() { return rng.normal(); });
      Matrix s = Matrix::NullaryExpr(nx, nx, [&]() { return rng.normal(); });
      stats.sigma_smooth[k] =
          symmetrize(s * s.transpose() / nx) + 0.5 * Matrix::Identity(nx, nx);
      stats.P[k] = stats.sigma_smooth[k] +
                   stats.x_smooth[k] * stats.x_smooth[k].transpose();
      y[k] = Vector::NullaryExpr(1, [&]() { return rng.normal(); });
      double el = 0.4 + 2.0 * rng.uniform();
      stats.e_lambda(static_cast<Index>(k), 0) = el;
      stats.e_inv_lambda(static_cast<Index>(k), 0) = 1.0 / el + rng.uniform();
      stats.u(static_cast<Index>(k), 0) = 0.1 + rng.uniform();
    }
    for (std::size_t k = 1; k < T; ++k) {
      stats.L[k - 1] =
          Matrix::NullaryExpr(nx, nx, [&]() { return 0.2 * rng.normal(); });
      stats.P_cross[k - 1] = stats.sigma_smooth[k] * stats.L[k - 1].transpose() +
                             stats.x_smooth[k] * stats.x_smooth[k - 1].transpose();
    }

    auto fd = [&](const ModelParams& at,
                  const std::function<void(ModelParams&, double)>& bump) {
      const double step = 1e-6;
      ModelParams plus = at, minus = at;
      bump(plus, step);
      bump(minus, -step);
      return (q_objective(plus, stats, y) - q_objective(minus, stats, y)) /
             (2.0 * step);
    };

    ParamMask mask;
    mask.A = mask.C = mask.mu = mask.p = mask.sigma = true;
    mask.b = mask.Q = mask.pi1 = mask.Sigma1 = true;
    using Bump = std::function<void(ModelParams&, double)>;
    std::vector<std::pair<std::string, Bump>> order = {
        {"sigma", [](ModelParams& t, double hh) { t.al[0].sigma += hh; }},
        {"mu", [](ModelParams& t, double hh) { t.al[0].mu += hh; }},
        {"pi1", [](ModelParams& t, double hh) { t.pi1(0) += hh; }},
        {"Sigma1", [](ModelParams& t, double hh) { t.Sigma1(0, 0) += hh; }},
        {"A", [](ModelParams& t, double hh) { t.A(0, 0) += hh; }},
        {"C", [](ModelParams& t, double hh) { t.C(0, 0) += hh; }},
        {"Q", [](ModelParams& t, double hh) { t.Q(0, 0) += hh; }},
        {"b", [](ModelParams& t, double hh) { t.b(0) += hh; }},
    };
    for (const auto& [name, bump] : order) {
      if (name == "sigma") mask.sigma = false;
      if (name == "mu") mask.mu = false;
      if (name == "pi1") mask.pi1 = false;
      if (name == "Sigma1") mask.Sigma1 = false;
      if (name == "A") mask.A = false;
      if (name == "C") mask.C = false;
      if (name == "Q") mask.Q = false;
      if (name == "b") mask.b = false;
      ModelParams updated = m_step_closed_forms(stats, y, theta, mask);
      double scale = std::max(1.0, std::abs(q_objective(updated, stats, y)));
      worst = std::max(worst, std::abs(fd(updated, bump)) / scale);
    }
  }
  std::ostringstream os;
  os << "max relative finite-difference partial after update = " << worst;
  detail = os.str();
  return worst < 1e-5;
}

bool criterion_recovery(std::string& detail) {
  const int n_seeds = 10;
  std::vector<double> p_hat(n_seeds), sigma_hat(n_seeds), a_err(n_seeds);
  Matrix A_true = rotation2();
  parallel_for(n_seeds, [&](std::size_t i) {
    std::uint64_t seed = 1000 + i;
    ModelParams truth;
    truth.A = A_true;
    Rng c_rng(seed, 0x10);
    for (;;) {
      double c1 = c_rng.normal(), c2 = c_rng.normal();
      if (std::abs(c1 + c2) < 0.1) continue;
      truth.C = Matrix(1, 2);
      truth.C << c1 / std::abs(c1 + c2), c2 / std::abs(c1 + c2);
      break;
    }
    truth.b = Vector::Zero(2);
    truth.Q = 0.05 * Matrix::Identity(2, 2);
    truth.pi1 = Vector::Zero(2);
    truth.Sigma1 = Matrix::Identity(2, 2);
    truth.al = {{0.0, 0.2, 0.3}};
    SimData data = simulate(Scenario{truth, NoiseSpec{truth.al[0]}, 3000}, seed);

    ModelParams init = truth;
    init.A = 0.9 * A_true;  // warm init selects the data-generating mode
    double mad;
    {
      std::vector<double> eps(data.observations.size() - 1);
      for (std::size_t k = 1; k < data.observations.size(); ++k)
        eps[k - 1] = std::abs(data.observations[k](0) - data.observations[k - 1](0));
      std::nth_element(eps.begin(), eps.begin() + static_cast<long>(eps.size() / 2),
                       eps.end());
      mad = std::max(eps[eps.size() / 2] / (2.0 * std::log(2.0)), 1e-3);
    }
    init.al = {{0.0, 0.5, mad}};
    LearnConfig cfg;
    cfg.fixed.C = cfg.fixed.b = cfg.fixed.Q = true;
    cfg.fixed.pi1 = cfg.fixed.Sigma1 = true;
    cfg.fixed.mu = true;  // location known to be zero, as in the robustness study
    EmResult res = single_loop_em(data.observations, init, cfg);
    p_hat[i] = res.theta.al[0].p;
    sigma_hat[i] = res.theta.al[0].sigma;
    a_err[i] = (res.theta.A - A_true).norm();
  });
  double pm = median_of(p_hat), sm = median_of(sigma_hat), am = median_of(a_err);
  std::ostringstream os;
  os << "median learned p = " << pm << " (target 0.2 +/- 0.05), sigma = " << sm
     << " (target 0.3 +/- 10%), |A_hat - A|_F = " << am << " (limit 0.1)";
  detail = os.str();
  return std::abs(pm - 0.2) < 0.05 && std::abs(sm - 0.3) / 0.3 < 0.10 && am < 0.1;
}

bool criterion_single_vs_double(std::string& detail) {
  ModelParams model = random_walk_model(0.05, {{0.0, 0.5, 0.3}});
  NoiseSpec noise = contaminated_noise();
  int ok_count = 0;
  long total_single = 0, total_double = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SimData data = simulate(Scenario{model, noise, 1000}, 7000 + seed);
    ModelParams init = model;
    LearnConfig base;
    base.fixed.A = base.fixed.C = base.fixed.b = base.fixed.Q = true;
    base.fixed.pi1 = base.fixed.Sigma1 = base.fixed.mu = true;

    LearnConfig dbl_cfg = base;
    EmResult dbl = double_loop_em(data.observations, init, dbl_cfg);
    double q_target = dbl.trace.back().q_value - 1e-3;

    LearnConfig single_cfg = base;
    single_cfg.outer_tol = 1e-9;
    single_cfg.outer_max_iters = 5000;
    EmResult single = single_loop_em(data.observations, init, single_cfg);
    long crossing = -1;
    for (const auto& row : single.trace) {
      if (row.q_value >= q_target) {
        crossing = row.fb_passes;
        break;
      }
    }
    total_double += dbl.fb_passes;
    total_single += crossing < 0 ? 10 * single.fb_passes : crossing;
    if (crossing >= 0 && crossing * 2 <= dbl.fb_passes) ++ok_count;
  }
  std::ostringstream os;
  os << "total passes to reach the double-loop objective (+/- 1e-3): single = "
     << total_single << ", double = " << total_double << " (bound: <= half); "
     << ok_count << "/10 individual seeds within half";
  detail = os.str();
  return 2 * total_single <= total_double;
}

Exp2Result shared_exp2() {
  Exp2Config cfg;
  cfg.n_train = 10;
  cfg.n_test = 50;
  cfg.T = 1000;
  return run_experiment2(cfg);
}

bool criterion_robustness_ordering(std::string& detail) {
  Exp2Result res = shared_exp2();
  double p = res.learned.p_median, s = res.learned.sigma_median;
  bool orderings =
      res.median_rmse["fast_al"] < res.median_rmse["laplace"] &&
      res.median_rmse["laplace"] < res.median_rmse["kalman"] &&
      res.median_rmse["fast_al"] < res.median_rmse["adaptive"] &&
      res.median_emax["fast_al"] < res.median_emax["laplace"] &&
      res.median_emax["laplace"] < res.median_emax["kalman"] &&
      res.median_emax["fast_al"] < res.median_emax["adaptive"];
  bool ranges = p > 0.1 && p < 0.4 && s > 0.08 && s < 0.3;
  std::ostringstream os;
  os << "median RMSE fast/laplace/kalman/adaptive = " << res.median_rmse["fast_al"]
     << "/" << res.median_rmse["laplace"] << "/" << res.median_rmse["kalman"] << "/"
     << res.median_rmse["adaptive"] << "; EMax = " << res.median_emax["fast_al"]
     << "/" << res.median_emax["laplace"] << "/" << res.median_emax["kalman"] << "/"
     << res.median_emax["adaptive"] << "; learned p = " << p << ", sigma = " << s;
  detail = os.str();
  return orderings && ranges;
}

bool criterion_fast_vs_exact(std::string& detail) {
  Exp2Result res = shared_exp2();
  double rmse_fast = res.median_rmse["fast_al"];
  double rmse_exact = res.median_rmse["exact_al"];
  double cpu_ratio = res.median_cpu["exact_al"] / res.median_cpu["fast_al"];
  double rel = std::abs(rmse_fast - rmse_exact) / rmse_exact;
  std::ostringstream os;
  os << "median RMSE fast = " << rmse_fast << ", exact = " << rmse_exact
     << " (rel diff " << rel << ", limit 0.05); CPU(exact)/CPU(fast) = " << cpu_ratio
     << " (limit >= 10)";
  detail = os.str();
  return rel < 0.05 && cpu_ratio >= 10.0;
}

bool criterion_table2(std::string& detail) {
  ALMoments m = al_moments({0.48, 0.8, 0.47});
  const double table[4] = {-1.28, 5.84, -25.33, 283.68};
  double got[4] = {m.mean, m.variance, m.third_central, m.fourth_central};
  double rel[4];
  bool ok = true;
  for (int i = 0; i < 4; ++i) {
    rel[i] = std::abs(got[i] - table[i]) / std::abs(table[i]);
    ok = ok && rel[i] < 0.01;
  }
  double gv = M_PI * M_PI / 2.0;
  bool gauss_ok = std::abs(gv - 4.9348022) < 1e-6 &&
                  std::abs(3.0 * gv * gv - 73.0568183) < 1e-6;
  std::ostringstream os;
  os << "AL row rel errors = {" << rel[0] << ", " << rel[1] << ", " << rel[2] << ", "
     << rel[3] << "} vs limit 0.01 (computed fourth central moment "
     << got[3] << " vs table 283.68); Gaussian row " << (gauss_ok ? "exact" : "WRONG");
  detail = os.str();
  return ok && gauss_ok;
}

bool criterion_multivariate_trend(std::string& detail) {
  Exp1Config cfg = Exp1Config::defaults();
  cfg.families.clear();
  cfg.run_sweep = true;
  cfg.ny_sweep = {1, 10};
  cfg.n_seeds = 10;
  Exp1Result res = run_experiment1(cfg);
  std::vector<double> rmse1, rmse10;
  for (const auto& cell : res.sweep) {
    if (!cell.ok) continue;
    (cell.ny == 1 ? rmse1 : rmse10).push_back(cell.al.rmse);
  }
  double m1 = median_of(rmse1), m10 = median_of(rmse10);
  std::ostringstream os;
  os << "median smoothed RMSE: ny=1 -> " << m1 << ", ny=10 -> " << m10 << " ("
     << rmse1.size() << "/" << rmse10.size() << " cells ok)";
  detail = os.str();
  return rmse1.size() == 10 && rmse10.size() == 10 && m10 < m1;
}

bool criterion_exact_bayes(std::string& detail) {
  double worst = 0.0;
  for (double p : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
    ALParams al{0.0, p, 1.0};
    ScalarPrior prior{0.0, 1.0};
    for (double d = -20.0; d <= 20.0; d += 1.0) {
      double closed = exact_scalar_update(prior, al, d);
      double quad = oracle::posterior_mean_quadrature(0.0, 1.0, al, d);
      worst = std::max(worst, std::abs(closed - quad));
    }
  }
  ALParams al{0.0, 0.2, 1.0};
  ScalarPrior prior{0.0, 1.0};
  double at50 = exact_scalar_update(prior, al, 50.0);
  double at500 = exact_scalar_update(prior, al, 500.0);
  double plateau = std::abs(at500 - at50) / std::abs(at50);

  std::vector<double> grid;
  for (double d = -20.0; d <= 20.0; d += 0.5) grid.push_back(d);
  auto rows = response_curve(prior, al, grid);
  ALMoments mom = al_moments(al);
  double slope = prior.var / (prior.var + mom.variance);
  double worst_lin = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double local = (rows[i].kalman - rows[i - 1].kalman) /
                   (rows[i].innovation - rows[i - 1].innovation);
    worst_lin = std::max(worst_lin, std::abs(local - slope));
  }
  double bound = prior.var * std::max(al.p, 1.0 - al.p) / al.sigma + 1e-6;
  bool bounded = true;
  for (const auto& r : rows) bounded = bounded && std::abs(r.exact) <= bound;

  std::ostringstream os;
  os << "max |closed - quadrature| = " << worst
     << " (limit 1e-5); plateau 50->500 change = " << plateau
     << " (limit 0.01); Kalman slope deviation = " << worst_lin;
  detail = os.str();
  return worst < 1e-5 && plateau < 0.01 && worst_lin < 1e-12 && bounded;
}

bool criterion_sv(std::string& detail) {
  const int n_seeds = 10;
  std::vector<double> mape_al(n_seeds), mape_g(n_seeds), phi_err(n_seeds);
  std::vector<double> inf_al(n_seeds), inf_g(n_seeds);  // true-theta smoothing
  parallel_for(n_seeds, [&](std::size_t i) {
    Rng rng(8000 + i);
    int T = 1500;
    double phi = 0.95, gamma = -0.5, se = 0.2;
    std::vector<double> h(static_cast<std::size_t>(T));
    h[0] = gamma / (1.0 - phi) + se / std::sqrt(1.0 - phi * phi) * rng.normal();
    for (int k = 1; k < T; ++k)
      h[static_cast<std::size_t>(k)] =
          phi * h[static_cast<std::size_t>(k - 1)] + gamma + se * rng.normal();
    std::vector<double> log_y2(static_cast<std::size_t>(T)),
        truth(static_cast<std::size_t>(T));
    for (int k = 0; k < T; ++k) {
      double z = rng.normal();
      log_y2[static_cast<std::size_t>(k)] =
          h[static_cast<std::size_t>(k)] + std::log(std::max(z * z, 1e-24));
      truth[static_cast<std::size_t>(k)] = std::exp(0.5 * h[static_cast<std::size_t>(k)]);
    }
    SvResult res = run_sv_on_log_y2(log_y2, SvConfig{}, &truth);
    mape_al[i] = *res.mape_al;
    mape_g[i] = *res.mape_gauss;
    phi_err[i] = std::abs(res.al.phi - phi);

    // Companion diagnostic: the same comparison with the data-generating
    // (phi, gamma, sigma_eta) held fixed, isolating inference quality from
    // the EM fit.
    ModelParams m_true;
    m_true.A = Matrix::Constant(1, 1, phi);
    m_true.C = Matrix::Identity(1, 1);
    m_true.b = Vector::Constant(1, gamma);
    m_true.Q = Matrix::Constant(1, 1, se * se);
    m_true.pi1 = Vector::Constant(1, gamma / (1.0 - phi));
    m_true.Sigma1 = Matrix::Constant(1, 1, se * se / (1.0 - phi * phi));
    m_true.al = {{0.48, 0.8, 0.47}};
    std::vector<Vector> y(log_y2.size());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = Vector::Constant(1, log_y2[k]);
    SmootherOutput al_out = al_smoother(m_true, y, InferenceConfig{});
    GaussianMeasurement gn{Vector::Constant(1, -1.27),
                           Vector::Constant(1, M_PI * M_PI / 2.0)};
    RunResult g_out = kalman_smoother(m_true, gn, y);
    double acc_al = 0.0, acc_g = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      acc_al += std::abs(std::exp(0.5 * al_out.run.smoothed[k].mean(0)) / truth[k] - 1.0);
      acc_g += std::abs(std::exp(0.5 * g_out.smoothed[k].mean(0)) / truth[k] - 1.0);
    }
    inf_al[i] = acc_al / static_cast<double>(y.size());
    inf_g[i] = acc_g / static_cast<double>(y.size());
  });
  double ma = median_of(mape_al), mg = median_of(mape_g), pe = median_of(phi_err);
  std::ostringstream os;
  os << "median volatility MAPE with learned theta: AL fit = " << ma
     << ", Gaussian fit = " << mg << "; median |phi_hat - 0.95| = " << pe
     << " | inference-only (true theta) MAPE: AL = " << median_of(inf_al)
     << ", Gaussian = " << median_of(inf_g);
  detail = os.str();
  return ma < mg && pe < 0.05;
}

struct Criterion {
  int id;
  std::string name;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria = {
      {1, "hierarchy correctness (scale-mixture marginalization)", criterion_hierarchy},
      {2, "oracle equivalence of the AL-smoother (grid Bayes)", criterion_grid_oracle},
      {3, "brute-force equivalence of the Gaussian core", criterion_brute_force},
      {4, "MM guarantee for the asymmetry update", criterion_mm},
      {5, "M-step stationarity", criterion_stationarity},
      {6, "parameter recovery on the rotation model", criterion_recovery},
      {7, "single- vs double-loop pass efficiency", criterion_single_vs_double},
      {8, "robustness ordering on contaminated data", criterion_robustness_ordering},
      {9, "fast vs exact filter agreement and cost", criterion_fast_vs_exact},
      {10, "closed-form noise moment table", criterion_table2},
      {11, "multivariate RMSE trend", criterion_multivariate_trend},
      {12, "exact-Bayes response diagnostic", criterion_exact_bayes},
      {13, "stochastic-volatility fit ordering", criterion_sv},
  };

  int only = 0;
  if (argc > 1 && std::string(argv[1]) != "all") only = std::atoi(argv[1]);

  bool all_ok = true;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %2d: %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.id,
                c.name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
