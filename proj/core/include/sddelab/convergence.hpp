#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sddelab/euler.hpp"
#include "sddelab/problem.hpp"

namespace sddelab {

/// Deterministic reduction independent of accumulation order concerns:
/// recursive pairwise summation over the given (fixed) order.
double pairwise_sum(std::span<const double> values);

/// (mean of |ref - approx|^p)^(1/p) over coupled pairs; the pairing is by
/// Brownian stream, so a length mismatch is a coupling violation and rejected.
double strong_error(std::span<const double> ref_terminals,
                    std::span<const double> euler_terminals, double p);

/// Vector-state variant; |.| is the Euclidean norm.
double strong_error(const std::vector<std::vector<double>>& ref_terminals,
                    const std::vector<std::vector<double>>& euler_terminals, double p);

struct RateFit {
  double slope = 0.0;
  double std_error = 0.0;
};

/// Ordinary least squares of log2(error) against log2(n). Under this convention
/// error ~ h^(1/2) fits slope -1/2. Requires >= 3 levels and positive errors.
RateFit fit_rate(std::span<const std::int64_t> levels, std::span<const double> errors);

struct MomentEstimate {
  double p = 2.0;
  double value = 0.0;        // estimate of E[ sup_t |X(t)|^p ]
  std::int64_t num_paths = 0;
  std::int64_t level = 0;    // n_per_tau shared by the ensemble
};

/// Monte Carlo estimate of the uniform moment E[sup_t |X_n(t)|^p] from an
/// ensemble of paths at one level.
MomentEstimate moment_estimate(std::span<const EulerPath> paths, double p);

struct IncrementScaling {
  std::optional<double> slope;  // empty when an estimate degenerates to zero
  std::vector<double> values;   // per-level estimates
};

/// Estimates E[ int_0^T |X_n(s) - X_n(kappa_n(s))|^p ds ] per level by sampling
/// s at grid midpoints, where X_n(s) is advanced by one half-step of the scheme
/// (the Brownian path is generated at twice the Euler resolution so the
/// half-increment is exact). Returns the fitted slope of log2(estimate) against
/// log2(n); the expected decay is n^(-p/2).
IncrementScaling increment_scaling(const SDDEProblem& problem, std::uint64_t seed,
                                   std::span<const std::int64_t> levels, std::int64_t num_paths,
                                   double p);

struct LevelSpec {
  std::int64_t n_per_tau = 0;
  double h = 0.0;
};

/// Per-level strong errors of one coupled Monte Carlo study, plus the fitted
/// log-log rate. `errors` are order-p errors at the terminal time; zero error
/// only happens in exact special cases and flips `degenerate`.
struct ConvergenceReport {
  std::vector<LevelSpec> levels;
  std::vector<double> errors;
  std::vector<double> mc_std_errors;  // delta-method standard error per level
  std::int64_t num_paths = 0;
  std::uint64_t seed = 0;
  std::optional<double> slope;
  std::optional<double> slope_std_error;
  double p = 2.0;
  bool degenerate = false;
};

}  // namespace sddelab
