#include "alssm/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "alssm/bench.hpp"
#include "alssm/diag.hpp"
#include "alssm/io.hpp"

namespace alssm {

namespace {

namespace fs = std::filesystem;

struct CliOptions {
  std::string config_path;
  std::string data_path;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string method = "fast-al";
  std::string mode = "single";
  std::uint64_t seed = 0;
  std::string from_manifest;
};

std::vector<std::string> series_columns(const std::string& prefix, Index n) {
  std::vector<std::string> cols;
  for (Index i = 0; i < n; ++i) cols.push_back(prefix + "_" + std::to_string(i + 1));
  return cols;
}

// Writes a t-indexed table as CSV or JSON depending on --format.
void emit_series(const fs::path& out_dir, const std::string& stem,
                 const std::string& format,
                 const std::vector<std::string>& value_columns,
                 const std::vector<Vector>& series,
                 std::vector<std::string>& outputs) {
  if (format == "json") {
    Json j;
    Json cols = Json::array();
    cols.push_back("t");
    for (const auto& c : value_columns) cols.push_back(c);
    j["columns"] = std::move(cols);
    Json rows = Json::array();
    for (std::size_t k = 0; k < series.size(); ++k) {
      Json row = Json::array();
      row.push_back(k + 1);
      for (Index i = 0; i < series[k].size(); ++i) row.push_back(series[k](i));
      rows.push_back(std::move(row));
    }
    j["data"] = std::move(rows);
    write_json(out_dir / (stem + ".json"), j);
    outputs.push_back(stem + ".json");
  } else {
    write_series_csv(out_dir / (stem + ".csv"), value_columns, series);
    outputs.push_back(stem + ".csv");
  }
}

void write_string_table(const fs::path& path, const std::string& header,
                        const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << row[i];
    }
    out << "\n";
  }
}

std::string fmt(double v) { return format_double(v); }

ModelParams model_from_config(const Json& config) {
  if (config.contains("model")) return params_from_json(config.at("model"));
  return params_from_json(config);
}

std::vector<Vector> belief_table(const std::vector<GaussianBelief>& beliefs) {
  // xhat_1..nx, var_1..nx
  std::vector<Vector> rows(beliefs.size());
  for (std::size_t k = 0; k < beliefs.size(); ++k) {
    Index nx = beliefs[k].mean.size();
    Vector row(2 * nx);
    row.head(nx) = beliefs[k].mean;
    row.tail(nx) = beliefs[k].cov.diagonal();
    rows[k] = std::move(row);
  }
  return rows;
}

std::vector<Vector> lambda_table(const VariationalState& vs) {
  std::vector<Vector> rows(static_cast<std::size_t>(vs.e_lambda.rows()));
  Index ny = vs.e_lambda.cols();
  for (Index k = 0; k < vs.e_lambda.rows(); ++k) {
    Vector row(2 * ny);
    row.head(ny) = vs.e_lambda.row(k).transpose();
    row.tail(ny) = vs.u.row(k).transpose();
    rows[static_cast<std::size_t>(k)] = std::move(row);
  }
  return rows;
}

GaussianMeasurement gaussian_noise_from_config(const Json& config,
                                               const ModelParams& model) {
  if (config.contains("gaussian_noise")) {
    const Json& g = config.at("gaussian_noise");
    return {vector_from_json(g.at("mean"), "gaussian_noise.mean"),
            vector_from_json(g.at("r"), "gaussian_noise.r")};
  }
  // Moment-match the model's AL noise when no explicit variance is given.
  require(!model.al.empty(),
          "kalman method needs either model.al or config.gaussian_noise");
  Vector mean(model.ny()), r(model.ny());
  for (Index i = 0; i < model.ny(); ++i) {
    ALMoments m = al_moments(model.al[static_cast<std::size_t>(i)]);
    mean(i) = m.mean;
    r(i) = m.variance;
  }
  return {mean, r};
}

AdaptiveFilterConfig adaptive_from_config(const Json& config) {
  AdaptiveFilterConfig a;
  if (config.contains("adaptive")) {
    const Json& j = config.at("adaptive");
    if (j.contains("n_win")) a.n_win = j.at("n_win").get<int>();
    if (j.contains("base_variance")) a.base_variance = j.at("base_variance").get<double>();
    if (j.contains("variance_floor"))
      a.variance_floor = j.at("variance_floor").get<double>();
  }
  return a;
}

InferenceConfig inference_from_config(const Json& config) {
  InferenceConfig icfg;
  if (config.contains("inference")) {
    const Json& j = config.at("inference");
    if (j.contains("tol")) icfg.tol = j.at("tol").get<double>();
    if (j.contains("max_iters")) icfg.max_iters = j.at("max_iters").get<int>();
    if (j.contains("max_step_iters"))
      icfg.max_step_iters = j.at("max_step_iters").get<int>();
    if (j.contains("lambda_init")) icfg.lambda_init = j.at("lambda_init").get<double>();
  }
  return icfg;
}

int cmd_simulate(const CliOptions& opt, const Json& config) {
  Scenario sc;
  sc.model = model_from_config(config);
  sc.noise = noise_from_json(config.at("noise"));
  sc.T = config.contains("T") ? config.at("T").get<int>() : 1000;
  SimData data = simulate(sc, opt.seed);
  fs::create_directories(opt.out_dir);
  std::vector<std::string> outputs;
  emit_series(opt.out_dir, "states", opt.format,
              series_columns("x", sc.model.nx()), data.states, outputs);
  emit_series(opt.out_dir, "observations", opt.format,
              series_columns("y", sc.model.ny()), data.observations, outputs);
  write_manifest(opt.out_dir, "simulate", config, opt.seed, "", opt.format,
                 opt.data_path, outputs);
  return 0;
}

int cmd_filter(const CliOptions& opt, const Json& config) {
  ModelParams model = model_from_config(config);
  require(!opt.data_path.empty(), "filter: --data observations file required");
  std::vector<Vector> y = read_observations_csv(opt.data_path);
  InferenceConfig icfg = inference_from_config(config);
  fs::create_directories(opt.out_dir);
  std::vector<std::string> outputs;

  auto columns = [&](Index nx) {
    std::vector<std::string> cols = series_columns("xhat", nx);
    for (const auto& c : series_columns("var", nx)) cols.push_back(c);
    return cols;
  };

  if (opt.method == "fast-al" || opt.method == "laplace") {
    ModelParams m = model;
    if (opt.method == "laplace") {
      double sigma_l = config.contains("laplace_sigma")
                           ? config.at("laplace_sigma").get<double>()
                           : m.al.at(0).sigma;
      for (auto& a : m.al) {
        a.p = 0.5;
        a.sigma = sigma_l;
      }
    }
    auto [run, vs] = fast_al_filter(m, y, icfg);
    emit_series(opt.out_dir, "filtered", opt.format, columns(m.nx()),
                belief_table(run.filtered), outputs);
    std::vector<std::string> lcols = series_columns("e_lambda", m.ny());
    for (const auto& c : series_columns("u", m.ny())) lcols.push_back(c);
    emit_series(opt.out_dir, "lambda", opt.format, lcols, lambda_table(vs), outputs);
  } else if (opt.method == "exact-al") {
    RunResult run = exact_al_filter(model, y, icfg);
    emit_series(opt.out_dir, "filtered", opt.format, columns(model.nx()),
                belief_table(run.filtered), outputs);
  } else if (opt.method == "kalman") {
    GaussianMeasurement gn = gaussian_noise_from_config(config, model);
    RunResult run = kalman_filter(model, gn, y);
    emit_series(opt.out_dir, "filtered", opt.format, columns(model.nx()),
                belief_table(run.filtered), outputs);
  } else if (opt.method == "adaptive") {
    RunResult run = adaptive_filter(adaptive_from_config(config), model, y);
    emit_series(opt.out_dir, "filtered", opt.format, columns(model.nx()),
                belief_table(run.filtered), outputs);
  } else {
    throw ConfigError("unknown --method: " + opt.method);
  }
  write_manifest(opt.out_dir, "filter", config, opt.seed, opt.method, opt.format,
                 fs::absolute(opt.data_path).string(), outputs);
  return 0;
}

int cmd_smooth(const CliOptions& opt, const Json& config) {
  ModelParams model = model_from_config(config);
  require(!opt.data_path.empty(), "smooth: --data observations file required");
  std::vector<Vector> y = read_observations_csv(opt.data_path);
  InferenceConfig icfg = inference_from_config(config);
  fs::create_directories(opt.out_dir);
  std::vector<std::string> outputs;
  std::vector<std::string> cols = series_columns("xhat", model.nx());
  for (const auto& c : series_columns("var", model.nx())) cols.push_back(c);

  if (opt.method == "kalman") {
    GaussianMeasurement gn = gaussian_noise_from_config(config, model);
    RunResult run = kalman_smoother(model, gn, y);
    emit_series(opt.out_dir, "smoothed", opt.format, cols,
                belief_table(run.smoothed), outputs);
  } else {
    SmootherOutput out = al_smoother(model, y, icfg);
    emit_series(opt.out_dir, "smoothed", opt.format, cols,
                belief_table(out.run.smoothed), outputs);
    std::vector<std::string> lcols = series_columns("e_lambda", model.ny());
    for (const auto& c : series_columns("u", model.ny())) lcols.push_back(c);
    emit_series(opt.out_dir, "lambda", opt.format, lcols, lambda_table(out.vs),
                outputs);
    write_csv(fs::path(opt.out_dir) / "trace.csv", "iterations,fb_passes,converged",
              {{static_cast<double>(out.run.iterations),
                static_cast<double>(out.run.fb_passes),
                out.run.converged ? 1.0 : 0.0}});
    outputs.push_back("trace.csv");
  }
  write_manifest(opt.out_dir, "smooth", config, opt.seed, opt.method, opt.format,
                 fs::absolute(opt.data_path).string(), outputs);
  return 0;
}

int cmd_learn(const CliOptions& opt, const Json& config) {
  require(!opt.data_path.empty(), "learn: --data observations file required");
  std::vector<Vector> y = read_observations_csv(opt.data_path);
  ModelParams init;
  if (config.contains("init")) {
    init = params_from_json(config.at("init"));
  } else if (config.contains("model")) {
    init = params_from_json(config.at("model"));
  } else {
    Index nx = config.contains("nx") ? config.at("nx").get<Index>() : 1;
    init = default_init(y, nx);
  }
  LearnConfig lc;
  if (config.contains("mask")) lc.fixed = mask_from_json(config.at("mask"));
  if (config.contains("outer_tol")) lc.outer_tol = config.at("outer_tol").get<double>();
  if (config.contains("outer_max_iters"))
    lc.outer_max_iters = config.at("outer_max_iters").get<int>();
  std::string mode = config.contains("mode") ? config.at("mode").get<std::string>()
                                             : opt.mode;
  lc.mode = (mode == "double") ? LearnConfig::Mode::double_loop
                               : LearnConfig::Mode::single_loop;

  EmResult res = (lc.mode == LearnConfig::Mode::double_loop)
                     ? double_loop_em(y, init, lc)
                     : single_loop_em(y, init, lc);

  fs::create_directories(opt.out_dir);
  std::vector<std::string> outputs;
  write_json(fs::path(opt.out_dir) / "params.json", params_to_json(res.theta));
  outputs.push_back("params.json");
  std::vector<std::vector<double>> trace_rows;
  for (const auto& row : res.trace)
    trace_rows.push_back({static_cast<double>(row.iteration),
                          static_cast<double>(row.fb_passes), row.q_value,
                          row.max_rel_delta});
  write_csv(fs::path(opt.out_dir) / "trace.csv",
            "iteration,fb_passes,q_objective,max_rel_delta", trace_rows);
  outputs.push_back("trace.csv");
  write_manifest(opt.out_dir, "learn", config, opt.seed, mode, opt.format,
                 fs::absolute(opt.data_path).string(), outputs);
  return 0;
}

int cmd_diag(const CliOptions& opt, const Json& config) {
  ScalarPrior prior;
  if (config.contains("prior")) {
    prior.mean = config.at("prior").value("mean", 0.0);
    prior.var = config.at("prior").value("var", 1.0);
  }
  ALParams al{0.0, 0.2, 1.0};
  if (config.contains("al")) {
    al.mu = config.at("al").value("mu", 0.0);
    al.p = config.at("al").value("p", 0.2);
    al.sigma = config.at("al").value("sigma", 1.0);
  }
  auto grid_from = [&](const char* key, double lo, double hi, double step) {
    if (config.contains(key)) {
      const Json& g = config.at(key);
      lo = g.value("min", lo);
      hi = g.value("max", hi);
      step = g.value("step", step);
    }
    std::vector<double> grid;
    for (double v = lo; v <= hi + 1e-12; v += step) grid.push_back(v);
    return grid;
  };
  std::vector<double> innovations = grid_from("innovation_grid", -20.0, 20.0, 0.5);
  std::vector<double> u_grid = grid_from("u_grid", 0.0, 25.0, 0.25);

  fs::create_directories(opt.out_dir);
  std::vector<std::vector<double>> rows;
  for (const auto& r : response_curve(prior, al, innovations))
    rows.push_back({r.innovation, r.exact, r.fast_al, r.kalman});
  write_csv(fs::path(opt.out_dir) / "response.csv", "innovation,exact,fast_al,kalman",
            rows);
  rows.clear();
  for (const auto& r : adaptation_curve(al, u_grid))
    rows.push_back({r.sqrt_u, r.r, r.m});
  write_csv(fs::path(opt.out_dir) / "adaptation.csv", "sqrt_u,r,m", rows);
  write_manifest(opt.out_dir, "diag", config, opt.seed, "", opt.format,
                 opt.data_path, {"response.csv", "adaptation.csv"});
  return 0;
}

Exp1Config exp1_config_from_json(const Json& config) {
  Exp1Config cfg = Exp1Config::defaults();
  if (config.contains("T_train")) cfg.T_train = config.at("T_train").get<int>();
  if (config.contains("T_eval")) cfg.T_eval = config.at("T_eval").get<int>();
  if (config.contains("n_seeds")) cfg.n_seeds = config.at("n_seeds").get<int>();
  if (config.contains("seed0")) cfg.seed0 = config.at("seed0").get<std::uint64_t>();
  if (config.contains("q")) cfg.q = config.at("q").get<double>();
  if (config.contains("run_sweep")) cfg.run_sweep = config.at("run_sweep").get<bool>();
  if (config.contains("ny_sweep"))
    cfg.ny_sweep = config.at("ny_sweep").get<std::vector<int>>();
  if (config.contains("families")) {
    cfg.families.clear();
    for (const auto& f : config.at("families"))
      cfg.families.emplace_back(f.at("name").get<std::string>(),
                                noise_from_json(f.at("noise")));
  }
  if (config.contains("sweep_noise"))
    cfg.sweep_noise = noise_from_json(config.at("sweep_noise"));
  return cfg;
}

int cmd_exp1(const CliOptions& opt, const Json& config) {
  Exp1Config cfg = exp1_config_from_json(config);
  Exp1Result res = run_experiment1(cfg);
  fs::create_directories(opt.out_dir);
  std::vector<std::vector<std::string>> rows;
  for (const auto& cell : res.cells) {
    for (const char* method : {"al_smoother", "gaussian_ks"}) {
      const MetricEntry& m = std::string(method) == "al_smoother" ? cell.al : cell.gauss;
      rows.push_back({cell.family, std::to_string(cell.seed), method,
                      cell.ok ? "1" : "0", fmt(m.rmse), fmt(m.emax),
                      fmt(m.cpu_seconds), std::to_string(m.fb_passes),
                      cell.ok ? "" : cell.error});
    }
  }
  write_string_table(fs::path(opt.out_dir) / "metrics.csv",
                     "family,seed,method,ok,rmse,emax,cpu_seconds,fb_passes,error",
                     rows);
  rows.clear();
  for (const auto& cell : res.sweep)
    rows.push_back({std::to_string(cell.ny), std::to_string(cell.seed),
                    cell.ok ? "1" : "0", fmt(cell.al.rmse), fmt(cell.al.emax),
                    fmt(cell.al.cpu_seconds), cell.ok ? "" : cell.error});
  write_string_table(fs::path(opt.out_dir) / "sweep.csv",
                     "ny,seed,ok,rmse,emax,cpu_seconds,error", rows);
  write_manifest(opt.out_dir, "exp1", config, opt.seed, "", opt.format, opt.data_path,
                 {"metrics.csv", "sweep.csv"});
  return 0;
}

Exp2Config exp2_config_from_json(const Json& config) {
  Exp2Config cfg = Exp2Config::defaults();
  if (config.contains("T")) cfg.T = config.at("T").get<int>();
  if (config.contains("n_train")) cfg.n_train = config.at("n_train").get<int>();
  if (config.contains("n_test")) cfg.n_test = config.at("n_test").get<int>();
  if (config.contains("train_seed0"))
    cfg.train_seed0 = config.at("train_seed0").get<std::uint64_t>();
  if (config.contains("test_seed0"))
    cfg.test_seed0 = config.at("test_seed0").get<std::uint64_t>();
  if (config.contains("q")) cfg.q = config.at("q").get<double>();
  if (config.contains("r")) cfg.r = config.at("r").get<double>();
  if (config.contains("exact_test_count"))
    cfg.exact_test_count = config.at("exact_test_count").get<int>();
  return cfg;
}

int cmd_exp2(const CliOptions& opt, const Json& config) {
  Exp2Config cfg = exp2_config_from_json(config);
  Exp2Result res = run_experiment2(cfg);
  fs::create_directories(opt.out_dir);

  std::vector<std::vector<std::string>> rows;
  for (const auto& [method, entries] : res.test_metrics) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (method == "exact_al" && entries[i].cpu_seconds == 0.0 &&
          entries[i].rmse == 0.0)
        continue;  // exact filter not run on this seed
      rows.push_back({method, std::to_string(cfg.test_seed0 + i),
                      fmt(entries[i].rmse), fmt(entries[i].emax),
                      fmt(entries[i].cpu_seconds)});
    }
  }
  write_string_table(fs::path(opt.out_dir) / "metrics.csv",
                     "method,seed,rmse,emax,cpu_seconds", rows);

  rows.clear();
  for (const auto& [method, cpu] : res.median_cpu)
    rows.push_back({method, fmt(cpu)});
  write_string_table(fs::path(opt.out_dir) / "cpu_times.csv",
                     "method,median_cpu_seconds", rows);

  Json learned;
  learned["p_median"] = res.learned.p_median;
  learned["sigma_median"] = res.learned.sigma_median;
  learned["sigma_l_median"] = res.learned.sigma_l_median;
  learned["r_median"] = res.learned.r_median;
  learned["p_values"] = res.learned.p_values;
  learned["sigma_values"] = res.learned.sigma_values;
  learned["sigma_l_values"] = res.learned.sigma_l_values;
  learned["r_values"] = res.learned.r_values;
  write_json(fs::path(opt.out_dir) / "learned.json", learned);
  write_manifest(opt.out_dir, "exp2", config, opt.seed, "", opt.format, opt.data_path,
                 {"metrics.csv", "cpu_times.csv", "learned.json"});
  return 0;
}

int cmd_sv(const CliOptions& opt, const Json& config) {
  require(!opt.data_path.empty(), "sv: --data prices csv required");
  std::vector<double> prices = read_price_csv(opt.data_path);
  SvConfig cfg;
  if (config.contains("al")) {
    cfg.al_noise.mu = config.at("al").value("mu", cfg.al_noise.mu);
    cfg.al_noise.p = config.at("al").value("p", cfg.al_noise.p);
    cfg.al_noise.sigma = config.at("al").value("sigma", cfg.al_noise.sigma);
  }
  std::vector<double> reference;
  bool have_reference = false;
  if (config.contains("reference_csv")) {
    auto ref_rows = read_csv(config.at("reference_csv").get<std::string>());
    for (const auto& row : ref_rows) reference.push_back(row.back());
    have_reference = true;
  }
  SvResult res = run_sv(prices, cfg, have_reference ? &reference : nullptr);

  fs::create_directories(opt.out_dir);
  std::vector<std::string> outputs;
  std::vector<Vector> vol_rows(res.al.volatility.size());
  for (std::size_t k = 0; k < vol_rows.size(); ++k) {
    Vector row(3);
    row << res.log_y2[k], res.al.volatility[k], res.gauss.volatility[k];
    vol_rows[k] = row;
  }
  emit_series(opt.out_dir, "volatility", opt.format,
              {"log_y2", "sigma_al", "sigma_gaussian"}, vol_rows, outputs);

  auto fit_json = [](const SvFit& f) {
    Json j;
    j["phi"] = f.phi;
    j["gamma"] = f.gamma;
    j["sigma_eta2"] = f.sigma_eta2;
    j["fb_passes"] = f.fb_passes;
    j["cpu_seconds"] = f.cpu_seconds;
    return j;
  };
  write_json(fs::path(opt.out_dir) / "params_al.json", fit_json(res.al));
  write_json(fs::path(opt.out_dir) / "params_gaussian.json", fit_json(res.gauss));
  outputs.push_back("params_al.json");
  outputs.push_back("params_gaussian.json");

  ALMoments am = al_moments(cfg.al_noise);
  double gv = M_PI * M_PI / 2.0;
  std::vector<std::vector<std::string>> moment_rows = {
      {"al_fit", fmt(am.mean), fmt(am.variance), fmt(am.third_central),
       fmt(am.fourth_central)},
      {"gaussian_fit", fmt(-1.27), fmt(gv), fmt(0.0), fmt(3.0 * gv * gv)},
  };
  write_string_table(fs::path(opt.out_dir) / "moments.csv",
                     "noise,mean,variance,third_central,fourth_central", moment_rows);
  outputs.push_back("moments.csv");

  if (res.mape_al.has_value()) {
    write_string_table(fs::path(opt.out_dir) / "metrics.csv", "method,mape",
                       {{"fast_al", fmt(*res.mape_al)},
                        {"kalman", fmt(*res.mape_gauss)}});
    outputs.push_back("metrics.csv");
  }
  write_manifest(opt.out_dir, "sv", config, opt.seed, "", opt.format,
                 fs::absolute(opt.data_path).string(), outputs);
  return 0;
}

int dispatch(const std::string& command, const CliOptions& opt, const Json& config) {
  if (command == "simulate") return cmd_simulate(opt, config);
  if (command == "filter") return cmd_filter(opt, config);
  if (command == "smooth") return cmd_smooth(opt, config);
  if (command == "learn") return cmd_learn(opt, config);
  if (command == "diag") return cmd_diag(opt, config);
  if (command == "exp1") return cmd_exp1(opt, config);
  if (command == "exp2") return cmd_exp2(opt, config);
  if (command == "sv") return cmd_sv(opt, config);
  throw ConfigError("unknown command: " + command);
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"alssm: robust state-space filtering, smoothing and learning "
               "under asymmetric-Laplace measurement noise"};
  app.require_subcommand(0, 1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON config file");
  app.add_option("--data", opt.data_path, "input data file (observations/prices)");
  app.add_option("--seed", opt.seed, "RNG seed");
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--format", opt.format, "output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--method", opt.method,
                 "filter method: fast-al|exact-al|kalman|adaptive|laplace")
      ->check(CLI::IsMember({"fast-al", "exact-al", "kalman", "adaptive", "laplace"}));
  app.add_option("--mode", opt.mode, "EM mode: single|double")
      ->check(CLI::IsMember({"single", "double"}));
  app.add_option("--from-manifest", opt.from_manifest,
                 "replay a recorded run from its manifest.json");

  std::vector<std::string> commands = {"simulate", "filter", "smooth", "learn",
                                       "diag", "exp1", "exp2", "sv"};
  for (const auto& c : commands) app.add_subcommand(c)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help() << std::endl;
      return 0;
    }
    std::cerr << e.what() << "\n\n" << app.help() << std::endl;
    return 2;
  }

  try {
    if (!opt.from_manifest.empty()) {
      Json manifest = load_json(opt.from_manifest);
      CliOptions replay = opt;
      replay.seed = manifest.value("seed", std::uint64_t{0});
      replay.method = manifest.value("method", std::string("fast-al"));
      replay.format = manifest.value("format", std::string("csv"));
      replay.data_path = manifest.value("data", std::string());
      if (replay.method.empty()) replay.method = "fast-al";
      return dispatch(manifest.at("command").get<std::string>(), replay,
                      manifest.at("config"));
    }
    auto subs = app.get_subcommands();
    if (subs.empty()) {
      std::cerr << app.help() << std::endl;
      return 2;
    }
    Json config = Json::object();
    if (!opt.config_path.empty()) config = load_json(opt.config_path);
    return dispatch(subs.front()->get_name(), opt, config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
}

}  // namespace alssm
