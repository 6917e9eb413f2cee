#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sddelab/convergence.hpp"
#include "sddelab/problem.hpp"

namespace sddelab {

/// Initial function xi(t) = slope * t + intercept on [-tau, 0]; the config file
/// format is restricted to this affine family (every shipped preset fits it).
struct XiSpec {
  double slope = 0.0;
  double intercept = 1.0;

  friend bool operator==(const XiSpec&, const XiSpec&) = default;
};

/// Serializable mirror of TestProblemParams; defaults to the reference
/// ("table1") parameter set.
struct TestProblemSpec {
  double p = 2.0;
  double tau = 1.0;
  double a = -8.0;
  double b = 4.0;
  double beta1 = 0.0;
  double beta2 = 1.0;
  double beta3 = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
  XiSpec xi{1.0, 1.0};

  TestProblemParams params() const;

  friend bool operator==(const TestProblemSpec&, const TestProblemSpec&) = default;
};

enum class EmitKind { errors_csv, report_json, plot_data };

/// Where the coupled difference is measured: at the terminal time (the
/// reported tables' statistic) or as the supremum over the Euler grid.
enum class ErrorNorm { terminal, sup };

/// One convergence study: problem, Euler levels (exponents of n_per_tau),
/// oracle resolution, ensemble size, seeding and outputs.
struct ExperimentConfig {
  std::optional<std::string> preset;  // name recorded when built from a preset
  TestProblemSpec problem;
  std::vector<int> levels = {6, 7, 8, 9, 10, 11};  // h = tau / 2^N
  int fine_exponent = 15;                          // oracle grid: 2^F per tau
  std::int64_t num_paths = 2000;
  std::uint64_t seed = 42;
  double p = 2.0;
  std::string outputs = "results";
  std::vector<EmitKind> emit = {EmitKind::errors_csv, EmitKind::report_json, EmitKind::plot_data};
  int workers = 0;  // 0 = hardware concurrency
  ErrorNorm error_norm = ErrorNorm::terminal;
};

/// Named presets: "table1" (the reference study, l1 = l2 = 1), "table1_sqrt"
/// (l1 = l2 = 1/2), "zero_noise", "additive_noise" (dZ = dW), "zero".
ExperimentConfig config_from_preset(const std::string& name);
std::vector<std::string> preset_names();

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

/// Throws ConfigError naming the offending field. Enforces the oracle
/// separation rule fine_exponent >= max(levels) + 4, sorted levels, M >= 1.
void validate_config(const ExperimentConfig& config);

struct ExperimentResult {
  ConvergenceReport report;
  std::vector<std::string> files_written;
};

/// Runs the coupled study: per stream, one fine Brownian path drives the oracle
/// and, via exact coarsening, every Euler level. Streams are processed by a
/// worker pool; reduction order is fixed by stream id, so outputs are
/// byte-identical for any worker count. Writes the configured outputs.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Two-series plot data: (log2 n, log2 error) points plus a reference line of
/// slope -1/2 anchored at the first point. Requires >= 2 levels.
void emit_plot_data(const ConvergenceReport& report, const std::string& path);

std::string report_to_json(const ConvergenceReport& report);
void write_errors_csv(const ConvergenceReport& report, const std::string& path);

}  // namespace sddelab
