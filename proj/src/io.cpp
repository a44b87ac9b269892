#include "alssm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace alssm {

namespace fs = std::filesystem;

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const char* name) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ConfigError(std::string(name) + ": expected a nested array");
  Index rows = static_cast<Index>(j.size());
  Index cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != cols)
      throw ConfigError(std::string(name) + ": ragged rows");
    for (Index k = 0; k < cols; ++k)
      m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j, const char* name) {
  if (!j.is_array()) throw ConfigError(std::string(name) + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i)
    v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

Json params_to_json(const ModelParams& theta) {
  Json j;
  j["nx"] = theta.nx();
  j["ny"] = theta.ny();
  j["A"] = matrix_to_json(theta.A);
  j["C"] = matrix_to_json(theta.C);
  j["b"] = vector_to_json(theta.b);
  j["Q"] = matrix_to_json(theta.Q);
  j["pi1"] = vector_to_json(theta.pi1);
  j["Sigma1"] = matrix_to_json(theta.Sigma1);
  Json al = Json::array();
  for (const auto& a : theta.al)
    al.push_back({{"mu", a.mu}, {"p", a.p}, {"sigma", a.sigma}});
  j["al"] = std::move(al);
  return j;
}

ModelParams params_from_json(const Json& j) {
  ModelParams theta;
  try {
    theta.A = matrix_from_json(j.at("A"), "A");
    theta.C = matrix_from_json(j.at("C"), "C");
    theta.b = vector_from_json(j.at("b"), "b");
    theta.Q = matrix_from_json(j.at("Q"), "Q");
    theta.pi1 = vector_from_json(j.at("pi1"), "pi1");
    theta.Sigma1 = matrix_from_json(j.at("Sigma1"), "Sigma1");
    if (j.contains("al")) {
      for (const auto& a : j.at("al"))
        theta.al.push_back({a.at("mu").get<double>(), a.at("p").get<double>(),
                            a.at("sigma").get<double>()});
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("model params: ") + e.what());
  }
  return theta;
}

Json noise_to_json(const NoiseSpec& spec) {
  Json j;
  std::visit(
      [&j](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) {
          j = {{"family", "gaussian"}, {"mean", f.mean}, {"sd", f.sd}};
        } else if constexpr (std::is_same_v<T, LaplaceNoise>) {
          j = {{"family", "laplace"}, {"mean", f.mean}, {"scale", f.scale}};
        } else if constexpr (std::is_same_v<T, StudentTNoise>) {
          j = {{"family", "student_t"},
               {"mean", f.mean},
               {"scale", f.scale},
               {"nu", f.nu}};
        } else if constexpr (std::is_same_v<T, SkewNormalNoise>) {
          j = {{"family", "skew_normal"},
               {"location", f.location},
               {"scale", f.scale},
               {"shape", f.shape}};
        } else if constexpr (std::is_same_v<T, GhSkewTNoise>) {
          j = {{"family", "gh_skew_t"},
               {"location", f.location},
               {"scale", f.scale},
               {"beta", f.beta},
               {"nu", f.nu}};
        } else if constexpr (std::is_same_v<T, ALParams>) {
          j = {{"family", "asymmetric_laplace"},
               {"mu", f.mu},
               {"p", f.p},
               {"sigma", f.sigma}};
        } else {
          j = {{"family", "contaminated_gaussian"},
               {"weights", f.weights},
               {"means", f.means},
               {"variances", f.variances}};
        }
      },
      spec.family);
  return j;
}

NoiseSpec noise_from_json(const Json& j) {
  NoiseSpec spec;
  try {
    std::string family = j.at("family").get<std::string>();
    auto get_or = [&j](const char* key, double fallback) {
      return j.contains(key) ? j.at(key).get<double>() : fallback;
    };
    if (family == "gaussian") {
      spec.family = GaussianNoise{get_or("mean", 0.0), get_or("sd", 1.0)};
    } else if (family == "laplace") {
      spec.family = LaplaceNoise{get_or("mean", 0.0), get_or("scale", 1.0)};
    } else if (family == "student_t") {
      spec.family =
          StudentTNoise{get_or("mean", 0.0), get_or("scale", 1.0), get_or("nu", 5.0)};
    } else if (family == "skew_normal") {
      spec.family = SkewNormalNoise{get_or("location", 0.0), get_or("scale", 1.0),
                                    get_or("shape", 0.0)};
    } else if (family == "gh_skew_t") {
      spec.family = GhSkewTNoise{get_or("location", 0.0), get_or("scale", 1.0),
                                 get_or("beta", 0.0), get_or("nu", 6.0)};
    } else if (family == "asymmetric_laplace") {
      spec.family =
          ALParams{get_or("mu", 0.0), get_or("p", 0.5), get_or("sigma", 1.0)};
    } else if (family == "contaminated_gaussian") {
      ContaminatedGaussianNoise cg;
      cg.weights = j.at("weights").get<std::vector<double>>();
      cg.means = j.at("means").get<std::vector<double>>();
      cg.variances = j.at("variances").get<std::vector<double>>();
      spec.family = std::move(cg);
    } else {
      throw ConfigError("unknown noise family: " + family);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("noise spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

Json mask_to_json(const ParamMask& mask) {
  return {{"A", mask.A},   {"C", mask.C},           {"mu", mask.mu},
          {"p", mask.p},   {"sigma", mask.sigma},   {"b", mask.b},
          {"Q", mask.Q},   {"pi1", mask.pi1},       {"Sigma1", mask.Sigma1}};
}

ParamMask mask_from_json(const Json& j) {
  ParamMask mask;
  auto get = [&j](const char* key, bool fallback) {
    return j.contains(key) ? j.at(key).get<bool>() : fallback;
  };
  mask.A = get("A", false);
  mask.C = get("C", false);
  mask.mu = get("mu", false);
  mask.p = get("p", false);
  mask.sigma = get("sigma", false);
  mask.b = get("b", false);
  mask.Q = get("Q", false);
  mask.pi1 = get("pi1", false);
  mask.Sigma1 = get("Sigma1", false);
  return mask;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << format_double(row[i]);
    }
    out << "\n";
  }
}

void write_series_csv(const fs::path& path,
                      const std::vector<std::string>& value_columns,
                      const std::vector<Vector>& series) {
  std::string header = "t";
  for (const auto& c : value_columns) header += "," + c;
  std::vector<std::vector<double>> rows;
  rows.reserve(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    std::vector<double> row;
    row.reserve(1 + static_cast<std::size_t>(series[k].size()));
    row.push_back(static_cast<double>(k + 1));
    for (Index i = 0; i < series[k].size(); ++i) row.push_back(series[k](i));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

std::vector<std::vector<double>> read_csv(const fs::path& path,
                                          std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  if (header) {
    header->clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header->push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ": non-numeric cell '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> read_price_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  std::vector<double> prices;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError(path.string() + ": row " + std::to_string(row_number) +
                        " is not 'date,price'");
    double price;
    try {
      price = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError(path.string() + ": row " + std::to_string(row_number) +
                        " has a non-numeric price");
    }
    if (!(price > 0.0))
      throw ConfigError(path.string() + ": row " + std::to_string(row_number) +
                        " has a non-positive price");
    prices.push_back(price);
  }
  return prices;
}

std::vector<Vector> read_observations_csv(const fs::path& path) {
  std::vector<std::string> header;
  auto rows = read_csv(path, &header);
  if (rows.empty()) throw ConfigError(path.string() + ": no data rows");
  bool has_t = !header.empty() && header.front() == "t";
  std::size_t offset = has_t ? 1 : 0;
  std::vector<Vector> y;
  y.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() <= offset)
      throw ConfigError(path.string() + ": row too short");
    Vector v(static_cast<Index>(row.size() - offset));
    for (std::size_t i = offset; i < row.size(); ++i)
      v(static_cast<Index>(i - offset)) = row[i];
    y.push_back(std::move(v));
  }
  return y;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const Json& config, std::uint64_t seed, const std::string& method,
                    const std::string& format, const std::string& data_path,
                    const std::vector<std::string>& outputs) {
  Json manifest;
  manifest["version"] = "alssm 0.1.0";
  manifest["command"] = command;
  manifest["seed"] = seed;
  if (!method.empty()) manifest["method"] = method;
  manifest["format"] = format;
  if (!data_path.empty()) manifest["data"] = data_path;
  manifest["config"] = config;
  manifest["config_hash"] = fnv1a_hex(config.dump());
  manifest["outputs"] = outputs;
  write_json(out_dir / "manifest.json", manifest);
}

Json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace alssm
