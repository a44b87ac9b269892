#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "alssm/bench.hpp"
#include "alssm/diag.hpp"
#include "alssm/io.hpp"

namespace py = pybind11;
using namespace alssm;

namespace {

ModelParams params_from_str(const std::string& json_text) {
  return params_from_json(Json::parse(json_text));
}

std::vector<Vector> unstack(const Matrix& y) {
  std::vector<Vector> out(static_cast<std::size_t>(y.rows()));
  for (Index k = 0; k < y.rows(); ++k) out[static_cast<std::size_t>(k)] = y.row(k);
  return out;
}

Matrix stack_means(const std::vector<GaussianBelief>& beliefs) {
  if (beliefs.empty()) return Matrix(0, 0);
  Matrix out(static_cast<Index>(beliefs.size()), beliefs.front().mean.size());
  for (std::size_t k = 0; k < beliefs.size(); ++k)
    out.row(static_cast<Index>(k)) = beliefs[k].mean;
  return out;
}

Matrix stack_vars(const std::vector<GaussianBelief>& beliefs) {
  if (beliefs.empty()) return Matrix(0, 0);
  Matrix out(static_cast<Index>(beliefs.size()), beliefs.front().mean.size());
  for (std::size_t k = 0; k < beliefs.size(); ++k)
    out.row(static_cast<Index>(k)) = beliefs[k].cov.diagonal();
  return out;
}

py::dict run_to_dict(const RunResult& run) {
  py::dict d;
  d["filtered_mean"] = stack_means(run.filtered);
  d["filtered_var"] = stack_vars(run.filtered);
  if (!run.smoothed.empty()) {
    d["smoothed_mean"] = stack_means(run.smoothed);
    d["smoothed_var"] = stack_vars(run.smoothed);
  }
  d["iterations"] = run.iterations;
  d["fb_passes"] = run.fb_passes;
  d["converged"] = run.converged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_alssm, m) {
  m.doc() = "Robust state-space filtering, smoothing and learning under "
            "asymmetric-Laplace measurement noise";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<NumericalError>(m, "NumericalError");

  py::class_<ALParams>(m, "ALParams")
      .def(py::init<double, double, double>(), py::arg("mu"), py::arg("p"),
           py::arg("sigma"))
      .def_readwrite("mu", &ALParams::mu)
      .def_readwrite("p", &ALParams::p)
      .def_readwrite("sigma", &ALParams::sigma);

  m.def("al_logpdf", &al_logpdf, py::arg("params"), py::arg("v"));
  m.def("al_influence", &al_influence, py::arg("params"), py::arg("v"));
  m.def(
      "al_sample",
      [](const ALParams& p, std::uint64_t seed, std::size_t n) {
        return al_sample(p, seed, n);
      },
      py::arg("params"), py::arg("seed"), py::arg("n"));
  m.def("al_moments", [](const ALParams& p) {
    ALMoments mo = al_moments(p);
    return py::make_tuple(mo.mean, mo.variance, mo.third_central, mo.fourth_central);
  });
  m.def("al_conditional_given_lambda", [](const ALParams& p, double lam) {
    MeanVar mv = al_conditional_given_lambda(p, lam);
    return py::make_tuple(mv.mean, mv.variance);
  });
  m.def("inv_gaussian_expectations", [](double mean, double shape) {
    auto e = inv_gaussian_expectations({mean, shape});
    return py::make_tuple(e.e_lambda, e.e_inv_lambda);
  });
  m.def(
      "noise_sample",
      [](const std::string& spec_json, std::uint64_t seed, std::size_t n) {
        return noise_sample(noise_from_json(Json::parse(spec_json)), seed, n);
      },
      py::arg("spec_json"), py::arg("seed"), py::arg("n"));
  m.def("effective_noise", [](const ALParams& al, double e_lambda) {
    return effective_noise(al, e_lambda);
  });

  m.def(
      "fast_al_filter",
      [](const std::string& params_json, const Matrix& y, double tol, int max_iters) {
        InferenceConfig cfg;
        cfg.tol = tol;
        cfg.max_step_iters = max_iters;
        auto [run, vs] = fast_al_filter(params_from_str(params_json), unstack(y), cfg);
        py::dict d = run_to_dict(run);
        d["e_lambda"] = vs.e_lambda;
        d["u"] = vs.u;
        return d;
      },
      py::arg("params_json"), py::arg("y"), py::arg("tol") = 1e-6,
      py::arg("max_step_iters") = 50);

  m.def(
      "al_smoother",
      [](const std::string& params_json, const Matrix& y, double tol, int max_iters) {
        InferenceConfig cfg;
        cfg.tol = tol;
        cfg.max_iters = max_iters;
        SmootherOutput out = al_smoother(params_from_str(params_json), unstack(y), cfg);
        py::dict d = run_to_dict(out.run);
        d["e_lambda"] = out.vs.e_lambda;
        d["u"] = out.vs.u;
        return d;
      },
      py::arg("params_json"), py::arg("y"), py::arg("tol") = 1e-6,
      py::arg("max_iters") = 200);

  m.def(
      "exact_al_filter",
      [](const std::string& params_json, const Matrix& y, double tol) {
        InferenceConfig cfg;
        cfg.tol = tol;
        return run_to_dict(exact_al_filter(params_from_str(params_json), unstack(y), cfg));
      },
      py::arg("params_json"), py::arg("y"), py::arg("tol") = 1e-6);

  m.def(
      "kalman_smoother",
      [](const std::string& params_json, const Matrix& y, const Vector& noise_mean,
         const Vector& noise_var) {
        return run_to_dict(kalman_smoother(params_from_str(params_json),
                                           {noise_mean, noise_var}, unstack(y)));
      },
      py::arg("params_json"), py::arg("y"), py::arg("noise_mean"),
      py::arg("noise_var"));

  m.def(
      "adaptive_filter",
      [](const std::string& params_json, const Matrix& y, int n_win,
         double base_variance, double variance_floor) {
        AdaptiveFilterConfig cfg{n_win, base_variance, variance_floor};
        return run_to_dict(adaptive_filter(cfg, params_from_str(params_json), unstack(y)));
      },
      py::arg("params_json"), py::arg("y"), py::arg("n_win") = 30,
      py::arg("base_variance") = 0.5, py::arg("variance_floor") = 1e-8);

  m.def(
      "single_loop_em",
      [](const std::string& params_json, const Matrix& y, const std::string& mask_json,
         double outer_tol, int outer_max_iters) {
        LearnConfig cfg;
        cfg.fixed = mask_from_json(Json::parse(mask_json));
        cfg.outer_tol = outer_tol;
        cfg.outer_max_iters = outer_max_iters;
        EmResult res = single_loop_em(unstack(y), params_from_str(params_json), cfg);
        py::dict d;
        d["params_json"] = params_to_json(res.theta).dump();
        d["fb_passes"] = res.fb_passes;
        d["converged"] = res.converged;
        Matrix trace(static_cast<Index>(res.trace.size()), 4);
        for (std::size_t i = 0; i < res.trace.size(); ++i)
          trace.row(static_cast<Index>(i)) << res.trace[i].iteration,
              static_cast<double>(res.trace[i].fb_passes), res.trace[i].q_value,
              res.trace[i].max_rel_delta;
        d["trace"] = trace;
        return d;
      },
      py::arg("params_json"), py::arg("y"), py::arg("mask_json") = "{}",
      py::arg("outer_tol") = 1e-5, py::arg("outer_max_iters") = 500);

  m.def(
      "double_loop_em",
      [](const std::string& params_json, const Matrix& y, const std::string& mask_json,
         double outer_tol, int outer_max_iters) {
        LearnConfig cfg;
        cfg.fixed = mask_from_json(Json::parse(mask_json));
        cfg.outer_tol = outer_tol;
        cfg.outer_max_iters = outer_max_iters;
        EmResult res = double_loop_em(unstack(y), params_from_str(params_json), cfg);
        py::dict d;
        d["params_json"] = params_to_json(res.theta).dump();
        d["fb_passes"] = res.fb_passes;
        d["converged"] = res.converged;
        return d;
      },
      py::arg("params_json"), py::arg("y"), py::arg("mask_json") = "{}",
      py::arg("outer_tol") = 1e-5, py::arg("outer_max_iters") = 500);

  m.def(
      "exact_scalar_update",
      [](double prior_mean, double prior_var, const ALParams& al, double y) {
        return exact_scalar_update({prior_mean, prior_var}, al, y);
      },
      py::arg("prior_mean"), py::arg("prior_var"), py::arg("al"), py::arg("y"));

  m.def(
      "response_curve",
      [](double prior_mean, double prior_var, const ALParams& al,
         const std::vector<double>& grid) {
        auto rows = response_curve({prior_mean, prior_var}, al, grid);
        Matrix out(static_cast<Index>(rows.size()), 4);
        for (std::size_t i = 0; i < rows.size(); ++i)
          out.row(static_cast<Index>(i)) << rows[i].innovation, rows[i].exact,
              rows[i].fast_al, rows[i].kalman;
        return out;
      },
      py::arg("prior_mean"), py::arg("prior_var"), py::arg("al"), py::arg("grid"));

  m.def(
      "adaptation_curve",
      [](const ALParams& al, const std::vector<double>& u_grid) {
        auto rows = adaptation_curve(al, u_grid);
        Matrix out(static_cast<Index>(rows.size()), 3);
        for (std::size_t i = 0; i < rows.size(); ++i)
          out.row(static_cast<Index>(i)) << rows[i].sqrt_u, rows[i].r, rows[i].m;
        return out;
      },
      py::arg("al"), py::arg("u_grid"));

  m.def(
      "simulate",
      [](const std::string& params_json, const std::string& noise_json, int T,
         std::uint64_t seed) {
        Scenario sc{params_from_str(params_json),
                    noise_from_json(Json::parse(noise_json)), T};
        SimData data = simulate(sc, seed);
        Matrix states(static_cast<Index>(data.states.size()),
                      data.states.front().size());
        Matrix obs(static_cast<Index>(data.observations.size()),
                   data.observations.front().size());
        for (std::size_t k = 0; k < data.states.size(); ++k) {
          states.row(static_cast<Index>(k)) = data.states[k];
          obs.row(static_cast<Index>(k)) = data.observations[k];
        }
        return py::make_tuple(states, obs);
      },
      py::arg("params_json"), py::arg("noise_json"), py::arg("T"), py::arg("seed"));

  m.def(
      "metrics",
      [](const Matrix& estimates, const Matrix& truth) {
        MetricEntry e = metrics(unstack(estimates), unstack(truth));
        py::dict d;
        d["rmse"] = e.rmse;
        d["emax"] = e.emax;
        d["mape"] = e.mape;
        return d;
      },
      py::arg("estimates"), py::arg("truth"));

  m.def("default_init", [](const Matrix& y, Index nx) {
    return params_to_json(default_init(unstack(y), nx)).dump();
  });
}
