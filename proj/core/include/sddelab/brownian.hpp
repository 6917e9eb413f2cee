#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sddelab {

/// Identifies the (seed, stream_id) pair a path was generated from.
struct PathRef {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const PathRef&, const PathRef&) = default;
};

/// One realization of a Wiener process on [t0, t1], stored as increments at the
/// finest resolution. Coarser views are obtained by exact block summation, so
/// every consumer of the same path (any step size, plus the reference solution)
/// sees the same Brownian motion, not a statistical cousin of it.
///
/// Increments are snapped to a shared power-of-two lattice chosen so that block
/// sums and prefix sums of any subset never round. The snap is ~1e-7 relative
/// and statistically invisible; it buys bit-exact coupling identities.
///
/// Immutable after generation; safe to share across threads.
class BrownianPath {
 public:
  double t0() const noexcept { return t0_; }
  double t1() const noexcept { return t1_; }
  std::int64_t fine_steps() const noexcept { return static_cast<std::int64_t>(increments_.size()); }
  double fine_step() const noexcept { return fine_step_; }
  std::span<const double> increments() const noexcept { return increments_; }
  PathRef ref() const noexcept { return ref_; }

 private:
  friend BrownianPath generate_increments(std::uint64_t, std::uint64_t, double, double,
                                          std::int64_t);
  friend BrownianPath coarsen_path(const BrownianPath&, std::int64_t);
  BrownianPath() = default;

  double t0_ = 0.0;
  double t1_ = 0.0;
  double fine_step_ = 0.0;
  PathRef ref_;
  std::vector<double> increments_;
};

/// Draws `fine_steps` i.i.d. N(0, (t1-t0)/fine_steps) increments, deterministically
/// in (seed, stream_id). Distinct stream ids under one seed give independent paths,
/// so Monte Carlo ensembles can be sharded by stream in any order.
/// Requires t1 > t0 and fine_steps a power of two.
BrownianPath generate_increments(std::uint64_t seed, std::uint64_t stream_id, double t0, double t1,
                                 std::int64_t fine_steps);

/// Exact block sums of `factor` consecutive fine increments. factor must be a
/// positive power of two dividing fine_steps. Summing the output reproduces
/// W(t1) - W(t0) bit-exactly at every factor.
std::vector<double> coarsen(const BrownianPath& path, std::int64_t factor);

/// W value at fine grid index (prefix sum of the first grid_index increments);
/// index 0 gives exactly 0.
double wiener_value(const BrownianPath& path, std::int64_t grid_index);

/// The same Brownian motion viewed at a coarser resolution: increments are the
/// exact block sums of coarsen(), the (seed, stream_id) provenance is kept.
BrownianPath coarsen_path(const BrownianPath& path, std::int64_t factor);

}  // namespace sddelab
