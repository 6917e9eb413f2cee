#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sddelab/problem.hpp"

namespace sddelab {

/// Discrete trajectory of the explicit Euler scheme on the grid of step
/// h = tau / n_per_tau. States are stored row-major, (num_steps + 1) rows of
/// dim_state values; states[0] is xi(0). The coarsened noise that drove the
/// path is kept alongside it, one vector per noise column.
struct EulerPath {
  const SDDEProblem* problem = nullptr;
  std::int64_t n_per_tau = 0;
  double step = 0.0;
  std::int64_t num_steps = 0;
  std::vector<double> states;
  std::vector<std::vector<double>> noise;

  int dim() const noexcept { return problem->dim_state(); }
  std::span<const double> state(std::int64_t j) const {
    return {states.data() + static_cast<std::size_t>(j) * dim(), static_cast<std::size_t>(dim())};
  }
  double scalar_state(std::int64_t j) const { return states[static_cast<std::size_t>(j)]; }
  std::span<const double> terminal() const { return state(num_steps); }
  double terminal_scalar() const { return scalar_state(num_steps); }
  double time_of(std::int64_t j) const { return static_cast<double>(j) * step; }
};

/// Runs the explicit Euler scheme: X[j+1] = X[j] + beta(t_j, Y_j, X[j]) h
/// + alpha(t_j, Y_j, X[j]) dW_j, where each delayed value in Y_j is xi(delta(t_j))
/// when the delayed time is <= 0 and the stored state at the left grid snap of
/// delta(t_j) otherwise. The step is tied to the delay period (h = tau/n_per_tau,
/// n_per_tau a power of two), so constant lags that are multiples of h resolve
/// to exact grid indices.
///
/// `noise` holds the coarsened increments at step h, one vector per noise
/// column, each of length T/h. Throws IntegrationError on a non-finite state.
EulerPath integrate(const SDDEProblem& problem, std::vector<std::vector<double>> noise,
                    std::int64_t n_per_tau);

/// Single-noise-column convenience (dim_noise == 1).
EulerPath integrate(const SDDEProblem& problem, std::vector<double> noise,
                    std::int64_t n_per_tau);

/// Delayed-state lookup against a computed path: xi(t_query) for t_query <= 0
/// (no grid snap inside the initial segment), otherwise the stored state at the
/// left grid snap of t_query. Rejects t_query < -H and queries beyond the
/// computed prefix.
std::vector<double> lookup_delayed(const EulerPath& path, const InitialSegment& segment,
                                   double t_query);

namespace detail {

/// Maps a step index j to the delayed lookup for one DelaySpec, entirely in
/// integer arithmetic once constructed. initial_time(j) is meaningful only
/// when is_initial(j).
class DelayResolver {
 public:
  DelayResolver(const DelaySpec& spec, double step, std::int64_t n_per_tau);

  bool is_initial(std::int64_t j) const noexcept {
    return kind_ == DelayKind::constant_lag && j <= last_initial_;
  }
  double initial_time(std::int64_t j) const noexcept {
    return static_cast<double>(j) * step_ - lag_;
  }
  std::int64_t grid_index(std::int64_t j) const noexcept {
    if (kind_ == DelayKind::constant_lag) return j - lag_steps_ceil_;
    return (j / n_per_tau_) * n_per_tau_;
  }

 private:
  DelayKind kind_;
  double step_;
  double lag_ = 0.0;
  std::int64_t n_per_tau_;
  std::int64_t lag_steps_ceil_ = 0;  // ceil(lag / h)
  std::int64_t last_initial_ = -1;   // largest j with j*h <= lag
};

}  // namespace detail
}  // namespace sddelab
