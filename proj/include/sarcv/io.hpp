#pragma once

// File formats:
//   - JSON study configuration (schema-validated, unknown keys rejected),
//   - trajectory CSV: comment header carrying d, delta_n, T, R, seed, then
//     t,y0,...,y{d-1} rows,
//   - operator path CSV: t followed by row-major flattened entries,
//   - study CSV (n, delta_n, mean_err, stderr, bn_hat) plus a separate
//     timing CSV (wall time is not part of the deterministic outputs),
//   - JSON study summary embedding the fully resolved configuration.
// All floating-point values are written with %.17g, so equal doubles produce
// identical bytes.

#include <filesystem>
#include <string>

#include "sarcv/harness.hpp"
#include "sarcv/paths.hpp"

namespace sarcv::io {

std::string format_double(double v);

// --- JSON configuration ---------------------------------------------------

struct CliConfig {
  StudyConfig study;
  std::vector<double> deltas;  // `bn` sweep; defaults to 2^-4 .. 2^-10
  int sim_n = 64;              // `simulate`/`estimate` observation count
};

CliConfig parse_config_text(const std::string& text);
CliConfig parse_config_file(const std::filesystem::path& path);
// Fully resolved configuration (defaults expanded), as embedded in outputs.
std::string resolved_config_json(const CliConfig& cfg);

// --- CSV ---------------------------------------------------------------

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

void write_operator_path_csv(const std::filesystem::path& path, const OperatorPath& ops);
OperatorPath read_operator_path_csv(const std::filesystem::path& path);

// Grid function CSV: one header line with the grid nodes x_0,...,x_m, then
// one line with the values.
struct GridFunctionCsv {
  Vector nodes;
  Vector values;
};
void write_grid_function_csv(const std::filesystem::path& path, const Vector& nodes,
                             const Vector& values);
GridFunctionCsv read_grid_function_csv(const std::filesystem::path& path);

// Plain rectangular matrix CSV (comma-separated rows, no header).
void write_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

void write_study_csv(const std::filesystem::path& path, const StudyResult& result);
void write_timing_csv(const std::filesystem::path& path, const StudyResult& result);

void write_bn_csv(const std::filesystem::path& path, const BnSweepResult& result);

// --- JSON summaries ------------------------------------------------------

std::string study_summary_json(const StudyConfig& cfg, const StudyResult& result);
std::string bn_summary_json(const StudyConfig& cfg, const BnSweepResult& result);
std::string moment_report_json(const MomentReport& rep);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace sarcv::io
