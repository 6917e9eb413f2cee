#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sddelab/brownian.hpp"
#include "sddelab/problem.hpp"

namespace sddelab {

/// High-accuracy reference solution of the scalar test SDDE on [0, 2 tau],
/// evaluated on the fine grid of the Brownian path that also drives every
/// Euler run it is compared against.
struct OracleSolution {
  std::int64_t fine_steps = 0;   // over [0, 2 tau]
  double quadrature_step = 0.0;  // h_fine
  std::vector<double> values;    // Z at fine grid points, size fine_steps + 1
  PathRef path_ref;

  double terminal() const { return values.back(); }
};

/// exp((a - beta2^2/2)(t - s) + beta2 (W(t) - W(s))) for fine-grid indices
/// s_index <= t_index. The inverse factor is exp of the negated argument, never
/// a division, so strongly mean-reverting problems cannot overflow-then-divide.
double fundamental_factor(double a, double beta2, const BrownianPath& path, std::int64_t s_index,
                          std::int64_t t_index);

/// Z on [0, tau] by variation of constants: time integral by left-point Riemann
/// sums, stochastic integral by left-point Ito sums on the fine grid. The
/// delayed integrand reads the known initial function, so only quadrature error
/// remains. The path must start at 0 and cover [0, tau] with the segment
/// boundary landing exactly on its grid.
std::vector<double> exact_segment_first(const TestProblemParams& params, const BrownianPath& path);

/// Z on [tau, 2 tau]; delayed integrand values are read from `first` at shifted
/// fine-grid indices, so both segments must share one grid.
std::vector<double> exact_segment_second(const TestProblemParams& params, const BrownianPath& path,
                                         std::span<const double> first);

/// Both segments glued into one solution over [0, 2 tau], with the (seed,
/// stream_id) of the consumed path recorded for coupling bookkeeping.
OracleSolution exact_solution(const TestProblemParams& params, const BrownianPath& path);

/// Exact deterministic solution of the reduction dZ = [a Z + b Z(t-tau)^l1] dt
/// (all beta == 0) by per-segment variation of constants; the segment integrals
/// are evaluated with composite Gauss-Legendre quadrature to ~1e-10 or better.
/// Valid for t in [0, 2 tau].
double method_of_steps_ode(const TestProblemParams& params, double t);

}  // namespace sddelab
