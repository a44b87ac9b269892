#ifndef ALSSM_IO_HPP
#define ALSSM_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "alssm/learn.hpp"

namespace alssm {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// JSON codecs. Matrices serialize as row-major nested arrays with explicit
// dims so the files stay language-portable.

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const char* name);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const char* name);

Json params_to_json(const ModelParams& theta);
ModelParams params_from_json(const Json& j);

Json noise_to_json(const NoiseSpec& spec);
NoiseSpec noise_from_json(const Json& j);

Json mask_to_json(const ParamMask& mask);
ParamMask mask_from_json(const Json& j);

// ---------------------------------------------------------------------------
// CSV helpers. Doubles print with %.17g so re-runs are byte-identical.

std::string format_double(double v);

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

// Series of vectors -> one row per time step, first column t (1-based).
void write_series_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& value_columns,
                      const std::vector<Vector>& series);

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* header = nullptr);

// `date,price` file; returns prices in row order, validating positivity.
std::vector<double> read_price_csv(const std::filesystem::path& path);

// Observations file produced by `simulate` (t,y_1..ny).
std::vector<Vector> read_observations_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Run manifest: embeds the resolved config so a run can be replayed
// byte-identically.

std::string fnv1a_hex(const std::string& text);

void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    const Json& config, std::uint64_t seed, const std::string& method,
                    const std::string& format, const std::string& data_path,
                    const std::vector<std::string>& outputs);

Json load_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace alssm

#endif  // ALSSM_IO_HPP
