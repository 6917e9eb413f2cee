#include "sddelab/convergence.hpp"

#include <cmath>
#include <stdexcept>

#include "sddelab/brownian.hpp"

namespace sddelab {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

double mean_abs_pow(std::span<const double> diffs_pow) {
  return pairwise_sum(diffs_pow) / static_cast<double>(diffs_pow.size());
}

}  // namespace

double strong_error(std::span<const double> ref_terminals,
                    std::span<const double> euler_terminals, double p) {
  if (ref_terminals.size() != euler_terminals.size()) {
    throw std::invalid_argument("strong_error: coupled sequences must have equal length");
  }
  if (ref_terminals.empty()) {
    throw std::invalid_argument("strong_error: at least one coupled pair required");
  }
  if (!(p > 0.0)) {
    throw std::invalid_argument("strong_error: p must be positive");
  }
  std::vector<double> dp(ref_terminals.size());
  for (std::size_t i = 0; i < dp.size(); ++i) {
    dp[i] = std::pow(std::abs(ref_terminals[i] - euler_terminals[i]), p);
  }
  return std::pow(mean_abs_pow(dp), 1.0 / p);
}

double strong_error(const std::vector<std::vector<double>>& ref_terminals,
                    const std::vector<std::vector<double>>& euler_terminals, double p) {
  if (ref_terminals.size() != euler_terminals.size()) {
    throw std::invalid_argument("strong_error: coupled sequences must have equal length");
  }
  if (ref_terminals.empty()) {
    throw std::invalid_argument("strong_error: at least one coupled pair required");
  }
  if (!(p > 0.0)) {
    throw std::invalid_argument("strong_error: p must be positive");
  }
  std::vector<double> dp(ref_terminals.size());
  for (std::size_t i = 0; i < dp.size(); ++i) {
    if (ref_terminals[i].size() != euler_terminals[i].size()) {
      throw std::invalid_argument("strong_error: state dimension mismatch");
    }
    double norm2 = 0.0;
    for (std::size_t c = 0; c < ref_terminals[i].size(); ++c) {
      const double d = ref_terminals[i][c] - euler_terminals[i][c];
      norm2 += d * d;
    }
    dp[i] = std::pow(norm2, 0.5 * p);
  }
  return std::pow(mean_abs_pow(dp), 1.0 / p);
}

RateFit fit_rate(std::span<const std::int64_t> levels, std::span<const double> errors) {
  if (levels.size() != errors.size()) {
    throw std::invalid_argument("fit_rate: levels and errors must have equal length");
  }
  if (levels.size() < 3) {
    throw std::invalid_argument("fit_rate: at least 3 levels required");
  }
  const std::size_t k = levels.size();
  std::vector<double> x(k), y(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (levels[i] <= 0) {
      throw std::invalid_argument("fit_rate: levels must be positive");
    }
    if (!(errors[i] > 0.0)) {
      throw std::invalid_argument("fit_rate: errors must be positive");
    }
    x[i] = std::log2(static_cast<double>(levels[i]));
    y[i] = std::log2(errors[i]);
  }

  const double xbar = pairwise_sum(x) / static_cast<double>(k);
  const double ybar = pairwise_sum(y) / static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("fit_rate: levels must not all coincide");
  }
  const double slope = sxy / sxx;
  const double intercept = ybar - slope * xbar;
  double ssr = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ssr += r * r;
  }
  const double std_error = std::sqrt(std::max(ssr, 0.0) / static_cast<double>(k - 2) / sxx);
  return {slope, std_error};
}

MomentEstimate moment_estimate(std::span<const EulerPath> paths, double p) {
  if (paths.empty()) {
    throw std::invalid_argument("moment_estimate: non-empty ensemble required");
  }
  if (!(p > 0.0)) {
    throw std::invalid_argument("moment_estimate: p must be positive");
  }
  const std::int64_t level = paths.front().n_per_tau;
  std::vector<double> sups(paths.size());
  for (std::size_t q = 0; q < paths.size(); ++q) {
    const EulerPath& path = paths[q];
    if (path.n_per_tau != level) {
      throw std::invalid_argument("moment_estimate: ensemble must share one level");
    }
    const int d = path.dim();
    double sup2 = 0.0;
    for (std::int64_t j = 0; j <= path.num_steps; ++j) {
      double norm2 = 0.0;
      const auto s = path.state(j);
      for (int i = 0; i < d; ++i) norm2 += s[i] * s[i];
      sup2 = std::max(sup2, norm2);
    }
    sups[q] = std::pow(sup2, 0.5 * p);
  }
  MomentEstimate estimate;
  estimate.p = p;
  estimate.value = pairwise_sum(sups) / static_cast<double>(sups.size());
  estimate.num_paths = static_cast<std::int64_t>(paths.size());
  estimate.level = level;
  return estimate;
}

IncrementScaling increment_scaling(const SDDEProblem& problem, std::uint64_t seed,
                                   std::span<const std::int64_t> levels, std::int64_t num_paths,
                                   double p) {
  if (levels.size() < 3) {
    throw std::invalid_argument("increment_scaling: at least 3 levels required");
  }
  if (num_paths < 1) {
    throw std::invalid_argument("increment_scaling: at least one path required");
  }
  if (problem.dim_noise() != 1 || problem.dim_state() != 1) {
    throw std::invalid_argument("increment_scaling: implemented for scalar problems");
  }

  const double tau = problem.period();
  const double T = problem.horizon();
  const std::int64_t periods = problem.num_periods();

  IncrementScaling result;
  result.values.reserve(levels.size());
  for (const std::int64_t n : levels) {
    if (n <= 0 || (n & (n - 1)) != 0) {
      throw std::invalid_argument("increment_scaling: levels must be powers of two");
    }
    const double h = tau / static_cast<double>(n);
    const std::int64_t fine_steps = periods * 2 * n;  // one midpoint per Euler step
    if ((fine_steps & (fine_steps - 1)) != 0) {
      throw std::invalid_argument(
          "increment_scaling: T/tau * 2n must be a power of two for path generation");
    }

    detail::DelayResolver resolver(problem.delays().front(), h, n);
    const std::int64_t steps = periods * n;

    std::vector<double> per_path(static_cast<std::size_t>(num_paths));
    std::vector<double> states(static_cast<std::size_t>(steps + 1));
    for (std::int64_t stream = 0; stream < num_paths; ++stream) {
      const BrownianPath path =
          generate_increments(seed, static_cast<std::uint64_t>(stream), 0.0, T, fine_steps);
      const auto fine = path.increments();

      states[0] = problem.initial().evaluate_scalar(0.0);
      double acc = 0.0;
      double y = 0.0, drift = 0.0, diff = 0.0;
      std::span<const double> ys{&y, 1};
      for (std::int64_t j = 0; j < steps; ++j) {
        const double t = static_cast<double>(j) * h;
        y = resolver.is_initial(j)
                ? problem.initial().evaluate_scalar(resolver.initial_time(j))
                : states[static_cast<std::size_t>(resolver.grid_index(j))];
        const double x = states[static_cast<std::size_t>(j)];
        std::span<const double> xs{&x, 1};
        problem.drift(t, ys, xs, {&drift, 1});
        problem.diffusion(t, ys, xs, {&diff, 1});

        const double dw_first = fine[static_cast<std::size_t>(2 * j)];
        const double dw_full = dw_first + fine[static_cast<std::size_t>(2 * j + 1)];
        const double x_mid = x + drift * (0.5 * h) + diff * dw_first;
        acc += std::pow(std::abs(x_mid - x), p) * h;
        states[static_cast<std::size_t>(j + 1)] = x + drift * h + diff * dw_full;
      }
      per_path[static_cast<std::size_t>(stream)] = acc;
    }
    result.values.push_back(pairwise_sum(per_path) / static_cast<double>(num_paths));
  }

  bool positive = true;
  for (double v : result.values) positive = positive && v > 0.0;
  if (positive) {
    result.slope = fit_rate(levels, result.values).slope;
  }
  return result;
}

}  // namespace sddelab
