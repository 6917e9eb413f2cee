#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace sddelab {

/// Grid-snap map: the largest point of the grid {t0 + j/n : j >= 0} that is <= t.
/// Grid points are exact fixed points and the result is idempotent; the floor is
/// corrected against the reconstructed grid value so that boundary cases never
/// land one cell off.
double kappa(std::int64_t n, double t0, double t);

/// sign(z) * |z|^l: odd, continuous extension of z^l to negative bases.
/// Total for l > 0; signed_pow(z, 1) == z exactly.
double signed_pow(double z, double l);

enum class DelayKind {
  constant_lag,     // delta(t) = t - lag, lag > 0
  piecewise_floor,  // delta(t) = floor(t / period) * period
};

/// One delay argument of the SDDE. `period` is the problem-wide delay period tau;
/// `lag` is used by constant_lag only.
struct DelaySpec {
  DelayKind kind = DelayKind::constant_lag;
  double lag = 0.0;
  double period = 1.0;

  double evaluate(double t) const;

  static DelaySpec constant(double lag, double period) {
    return DelaySpec{DelayKind::constant_lag, lag, period};
  }
  static DelaySpec floor_of(double period) {
    return DelaySpec{DelayKind::piecewise_floor, 0.0, period};
  }
};

/// Prescribed history xi on [-H, 0]. The evaluator must be defined and bounded
/// on the whole domain; evaluation outside [-H, 0] is rejected because it
/// signals a delay-resolution bug upstream, not a recoverable condition.
class InitialSegment {
 public:
  InitialSegment(double history_length, std::function<std::vector<double>(double)> evaluator,
                 double sup_bound);

  /// Scalar (d = 1) segment.
  static InitialSegment scalar(double history_length, std::function<double(double)> evaluator,
                               double sup_bound);

  double history() const noexcept { return history_; }  // H
  double bound() const noexcept { return bound_; }
  int dim() const noexcept { return dim_; }

  std::vector<double> evaluate(double t) const;
  double evaluate_scalar(double t) const;  // dim() == 1 fast path
  void evaluate_into(double t, std::span<double> out) const;

 private:
  double history_;
  double bound_;
  int dim_;
  std::function<std::vector<double>(double)> evaluator_;
  std::function<double(double)> scalar_evaluator_;  // set when dim == 1
};

std::vector<double> evaluate_initial(const InitialSegment& segment, double t);

/// Declarative growth/Lipschitz condition metadata; never verified symbolically.
struct ConditionTags {
  std::set<std::string> tags;                    // subset of {"C1",...,"C5"}
  std::map<std::string, double> constants;       // e.g. G, l, C, l1, l2 where known
};

/// drift(t, delayed, x, out): delayed is the concatenation of the k delayed
/// states (k*d values), out receives d values. diffusion writes d*m values,
/// row-major (state component major, noise column minor). Both must be pure.
using DriftFn =
    std::function<void(double, std::span<const double>, std::span<const double>, std::span<double>)>;
using DiffusionFn = DriftFn;

/// An SDDE dX = beta(t, Y(t), X(t)) dt + alpha(t, Y(t), X(t)) dW(t) on [0, T],
/// X = xi on [-H, 0], with Y(t) the vector of delayed states X(delta_j(t)).
/// Immutable after construction; requires T to be a positive multiple of the
/// delay period (rejected otherwise rather than coefficient-truncated).
class SDDEProblem {
 public:
  SDDEProblem(int dim_state, int dim_noise, DriftFn drift, DiffusionFn diffusion,
              std::vector<DelaySpec> delays, InitialSegment initial, double horizon, double period,
              ConditionTags condition_tags = {});

  /// Scalar problem (d = m = 1) with a single delay.
  static SDDEProblem scalar(std::function<double(double, double, double)> drift,
                            std::function<double(double, double, double)> diffusion,
                            DelaySpec delay, InitialSegment initial, double horizon, double period,
                            ConditionTags condition_tags = {});

  int dim_state() const noexcept { return dim_state_; }
  int dim_noise() const noexcept { return dim_noise_; }
  const std::vector<DelaySpec>& delays() const noexcept { return delays_; }
  const InitialSegment& initial() const noexcept { return initial_; }
  double horizon() const noexcept { return horizon_; }
  double period() const noexcept { return period_; }
  std::int64_t num_periods() const noexcept { return num_periods_; }  // T / tau
  const ConditionTags& condition_tags() const noexcept { return condition_tags_; }

  void drift(double t, std::span<const double> delayed, std::span<const double> x,
             std::span<double> out) const {
    drift_(t, delayed, x, out);
  }
  void diffusion(double t, std::span<const double> delayed, std::span<const double> x,
                 std::span<double> out) const {
    diffusion_(t, delayed, x, out);
  }

 private:
  int dim_state_;
  int dim_noise_;
  DriftFn drift_;
  DiffusionFn diffusion_;
  std::vector<DelaySpec> delays_;
  InitialSegment initial_;
  double horizon_;
  double period_;
  std::int64_t num_periods_;
  ConditionTags condition_tags_;
};

struct DelayViolation {
  std::size_t delay_index = 0;
  double t = 0.0;
  double delta = 0.0;
  double bound = 0.0;
  std::string reason;
};

struct DelayValidation {
  bool ok = true;
  std::optional<DelayViolation> violation;
};

/// Checks, at every grid point t = j/grid_n in [0, T], that each delay is
/// non-decreasing and satisfies -H <= delta(t) <= floor(t/tau)*tau. Reports the
/// first violation instead of throwing.
DelayValidation validate_delays(const SDDEProblem& problem, std::int64_t grid_n);

/// Parameters of the scalar test family
///   dZ = [a Z + b {Z(t-tau)}^l1] dt + [beta1 + beta2 Z + beta3 {Z(t-tau)}^l2] dW
/// on [0, 2 tau] with initial function xi on [-tau, 0]. Negative bases are
/// handled by the odd extension signed_pow.
struct TestProblemParams {
  double p = 2.0;
  double tau = 1.0;
  double a = 0.0;
  double b = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  double l1 = 1.0;
  double l2 = 1.0;
  std::function<double(double)> xi;  // on [-tau, 0]
};

/// Builds the scalar SDDEProblem (d = m = k = 1, constant lag tau, T = 2 tau)
/// for the test family. Rejects non-positive tau, l1, l2.
SDDEProblem build_test_problem(const TestProblemParams& params);

}  // namespace sddelab
