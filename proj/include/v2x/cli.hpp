#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "v2x/config.hpp"

namespace v2x::cli {

enum class Mode { Analytic, MonteCarlo, Validate };
enum class Metric { Assoc, DlCov, SlCov, TotalCov, EffRate, Utility, TotalRate, Nu };

Mode parse_mode(const std::string& text);
Metric parse_metric(const std::string& text);
std::string to_string(Mode mode);
std::string to_string(Metric metric);

/// One `name=v1,v2,...` sweep over a NetworkConfig field.
struct Sweep {
  std::string parameter;
  std::vector<double> values;
};

Sweep parse_sweep(const std::string& text);

struct RunRequest {
  std::filesystem::path config_path;
  NetworkConfig config;  // filled from config_path by parse_args
  Mode mode = Mode::Analytic;
  Metric metric = Metric::Assoc;
  std::vector<double> taus;  // linear ratios
  std::vector<Sweep> sweeps;
  std::optional<std::uint64_t> seed;
  std::uint64_t n_samples = 100000;
  std::filesystem::path output_path;  // empty = CSV on stdout
  bool timestamp = true;
};

/// One output row. Unused numeric fields are NaN and print as empty cells.
struct Row {
  NetworkConfig config;
  std::string metric;
  double tau_or_epsilon;
  double value;
  double std_error_or_quad_error;
  std::optional<std::uint64_t> n_samples;
  std::optional<std::uint64_t> seed;
  double window_radius;
  double analytic;
  double quad_error;
  double mc_mean;
  double mc_std_error;
  double z_score;
  std::string verdict;  // "pass", "fail" or empty outside validate mode
  std::string error;
};

/// Cartesian product of the sweeps over `base`, first sweep outermost.
/// Values are not validated here.
std::vector<NetworkConfig> expand_sweeps(const NetworkConfig& base, const std::vector<Sweep>& sweeps);

/// pass iff |analytic - mc| <= 3 std_error + est_abs_error.
bool verdict_passes(double analytic, double est_abs_error, double mc_mean, double mc_std_error);

/// Evaluates every (config, tau) row in request order. Per-row failures are
/// recorded in Row::error.
std::vector<Row> run_rows(const RunRequest& req);

const std::vector<std::string>& csv_columns();
std::string format_csv(const std::vector<Row>& rows, bool timestamp);
std::string format_json(const std::vector<Row>& rows);

/// Parses flags (see --help). `env_seed` is the VANET_SEED fallback.
RunRequest parse_args(int argc, const char* const* argv, const char* env_seed);

/// Full driver: parse, run, write. Returns 0 on success, 1 on a fatal error,
/// 2 when some row failed validation or carries an error.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace v2x::cli
