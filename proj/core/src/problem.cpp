#include "sddelab/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace sddelab {

namespace {

// Largest integer m (as a double) with reconstruct(m) <= t, where
// reconstruct(m) = t0 + m/n. Starting from the floating floor, the correction
// loops re-anchor m on the reconstructed values themselves, which is what makes
// grid points exact fixed points of kappa.
double grid_floor(std::int64_t n, double t0, double t) {
  const double dn = static_cast<double>(n);
  double m = std::floor((t - t0) * dn);
  while (t0 + (m + 1.0) / dn <= t) m += 1.0;
  while (t0 + m / dn > t) m -= 1.0;
  return m;
}

// Largest integer m with m * unit <= t (unit > 0), robust at unit boundaries.
std::int64_t floor_units(double t, double unit) {
  double m = std::floor(t / unit);
  while ((m + 1.0) * unit <= t) m += 1.0;
  while (m * unit > t) m -= 1.0;
  return static_cast<std::int64_t>(m);
}

}  // namespace

double kappa(std::int64_t n, double t0, double t) {
  if (n <= 0) {
    throw std::invalid_argument("kappa: n must be positive");
  }
  if (t < t0) {
    throw std::invalid_argument("kappa: t must not precede t0");
  }
  const double m = grid_floor(n, t0, t);
  return t0 + m / static_cast<double>(n);
}

double signed_pow(double z, double l) {
  if (!(l > 0.0)) {
    throw std::invalid_argument("signed_pow: exponent must be positive");
  }
  if (l == 1.0) return z;
  const double mag = (l == 0.5) ? std::sqrt(std::abs(z)) : std::pow(std::abs(z), l);
  return std::copysign(mag, z);
}

double DelaySpec::evaluate(double t) const {
  switch (kind) {
    case DelayKind::constant_lag:
      return t - lag;
    case DelayKind::piecewise_floor:
      return static_cast<double>(floor_units(t, period)) * period;
  }
  throw std::logic_error("DelaySpec: unknown kind");
}

InitialSegment::InitialSegment(double history_length,
                               std::function<std::vector<double>(double)> evaluator,
                               double sup_bound)
    : history_(history_length), bound_(sup_bound), evaluator_(std::move(evaluator)) {
  if (!(history_ > 0.0)) {
    throw std::invalid_argument("InitialSegment: history length H must be positive");
  }
  if (!evaluator_) {
    throw std::invalid_argument("InitialSegment: evaluator required");
  }
  if (!std::isfinite(bound_)) {
    throw std::invalid_argument("InitialSegment: sup-norm bound must be finite");
  }
  dim_ = static_cast<int>(evaluator_(0.0).size());
  if (dim_ < 1) {
    throw std::invalid_argument("InitialSegment: evaluator must return at least one component");
  }
  if (dim_ == 1) {
    auto ev = evaluator_;
    scalar_evaluator_ = [ev](double t) { return ev(t)[0]; };
  }
}

InitialSegment InitialSegment::scalar(double history_length, std::function<double(double)> evaluator,
                                      double sup_bound) {
  if (!evaluator) {
    throw std::invalid_argument("InitialSegment: evaluator required");
  }
  auto ev = evaluator;
  InitialSegment segment(
      history_length, [ev](double t) { return std::vector<double>{ev(t)}; }, sup_bound);
  segment.scalar_evaluator_ = std::move(evaluator);
  return segment;
}

std::vector<double> InitialSegment::evaluate(double t) const {
  if (t < -history_ || t > 0.0) {
    throw std::invalid_argument("InitialSegment: time outside [-H, 0]");
  }
  return evaluator_(t);
}

double InitialSegment::evaluate_scalar(double t) const {
  if (t < -history_ || t > 0.0) {
    throw std::invalid_argument("InitialSegment: time outside [-H, 0]");
  }
  if (!scalar_evaluator_) {
    throw std::logic_error("InitialSegment: evaluate_scalar on a non-scalar segment");
  }
  return scalar_evaluator_(t);
}

void InitialSegment::evaluate_into(double t, std::span<double> out) const {
  const auto v = evaluate(t);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
}

std::vector<double> evaluate_initial(const InitialSegment& segment, double t) {
  return segment.evaluate(t);
}

SDDEProblem::SDDEProblem(int dim_state, int dim_noise, DriftFn drift, DiffusionFn diffusion,
                         std::vector<DelaySpec> delays, InitialSegment initial, double horizon,
                         double period, ConditionTags condition_tags)
    : dim_state_(dim_state),
      dim_noise_(dim_noise),
      drift_(std::move(drift)),
      diffusion_(std::move(diffusion)),
      delays_(std::move(delays)),
      initial_(std::move(initial)),
      horizon_(horizon),
      period_(period),
      condition_tags_(std::move(condition_tags)) {
  if (dim_state_ < 1 || dim_noise_ < 1) {
    throw std::invalid_argument("SDDEProblem: dimensions must be positive");
  }
  if (!drift_ || !diffusion_) {
    throw std::invalid_argument("SDDEProblem: drift and diffusion required");
  }
  if (delays_.empty()) {
    throw std::invalid_argument("SDDEProblem: at least one delay required");
  }
  if (!(period_ > 0.0)) {
    throw std::invalid_argument("SDDEProblem: delay period tau must be positive");
  }
  if (initial_.dim() != dim_state_) {
    throw std::invalid_argument("SDDEProblem: initial segment dimension mismatch");
  }
  const double ratio = horizon_ / period_;
  num_periods_ = std::llround(ratio);
  if (num_periods_ < 1 ||
      std::abs(static_cast<double>(num_periods_) * period_ - horizon_) >
          4.0 * 1e-16 * std::abs(horizon_)) {
    throw std::invalid_argument("SDDEProblem: horizon T must be a positive multiple of tau");
  }
}

SDDEProblem SDDEProblem::scalar(std::function<double(double, double, double)> drift,
                                std::function<double(double, double, double)> diffusion,
                                DelaySpec delay, InitialSegment initial, double horizon,
                                double period, ConditionTags condition_tags) {
  auto dr = std::move(drift);
  auto df = std::move(diffusion);
  return SDDEProblem(
      1, 1,
      [dr](double t, std::span<const double> y, std::span<const double> x, std::span<double> out) {
        out[0] = dr(t, y[0], x[0]);
      },
      [df](double t, std::span<const double> y, std::span<const double> x, std::span<double> out) {
        out[0] = df(t, y[0], x[0]);
      },
      {delay}, std::move(initial), horizon, period, std::move(condition_tags));
}

DelayValidation validate_delays(const SDDEProblem& problem, std::int64_t grid_n) {
  if (grid_n <= 0) {
    throw std::invalid_argument("validate_delays: grid_n must be positive");
  }
  const double h = 1.0 / static_cast<double>(grid_n);
  const double H = problem.initial().history();
  const double tau = problem.period();

  for (std::size_t j = 0; j < problem.delays().size(); ++j) {
    const DelaySpec& spec = problem.delays()[j];
    double prev = spec.evaluate(0.0);
    for (std::int64_t k = 0;; ++k) {
      const double t = static_cast<double>(k) * h;
      if (t > problem.horizon()) break;
      const double d = spec.evaluate(t);
      const double bound = static_cast<double>(floor_units(t, tau)) * tau;
      if (d < -H) {
        return {false, DelayViolation{j, t, d, -H, "delta(t) below -H"}};
      }
      if (d > bound) {
        return {false, DelayViolation{j, t, d, bound, "delta(t) above floor(t/tau)*tau"}};
      }
      if (d < prev) {
        return {false, DelayViolation{j, t, d, prev, "delta not non-decreasing"}};
      }
      prev = d;
    }
  }
  return {true, std::nullopt};
}

SDDEProblem build_test_problem(const TestProblemParams& params) {
  if (!(params.tau > 0.0)) {
    throw std::invalid_argument("build_test_problem: tau must be positive");
  }
  if (!(params.l1 > 0.0) || !(params.l2 > 0.0)) {
    throw std::invalid_argument("build_test_problem: l1 and l2 must be positive");
  }
  if (!params.xi) {
    throw std::invalid_argument("build_test_problem: initial function xi required");
  }

  const double a = params.a, b = params.b;
  const double b1 = params.beta1, b2 = params.beta2, b3 = params.beta3;
  const double l1 = params.l1, l2 = params.l2;

  // sup-norm bound of xi on [-tau, 0], by dense sampling
  double bound = 0.0;
  const int samples = 4096;
  for (int i = 0; i <= samples; ++i) {
    const double t = -params.tau + params.tau * static_cast<double>(i) / samples;
    bound = std::max(bound, std::abs(params.xi(std::min(t, 0.0))));
  }

  ConditionTags tags;
  tags.tags = {"C1", "C2", "C3"};
  if (l1 >= 1.0 && l2 >= 1.0) {
    tags.tags.insert("C4");
    tags.tags.insert("C5");
  }
  tags.constants = {{"G", std::abs(a) + std::abs(b) + std::abs(b1) + std::abs(b2) + std::abs(b3)},
                    {"l", std::max({l1, l2, 1.0})},
                    {"l1", l1},
                    {"l2", l2}};

  return SDDEProblem::scalar(
      [a, b, l1](double, double y, double x) { return a * x + b * signed_pow(y, l1); },
      [b1, b2, b3, l2](double, double y, double x) {
        return b1 + b2 * x + b3 * signed_pow(y, l2);
      },
      DelaySpec::constant(params.tau, params.tau),
      InitialSegment::scalar(params.tau, params.xi, bound), 2.0 * params.tau, params.tau,
      std::move(tags));
}

}  // namespace sddelab
