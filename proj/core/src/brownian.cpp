#include "sddelab/brownian.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace sddelab {

namespace {

bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_pow2(std::int64_t n) {
  return std::bit_width(static_cast<std::uint64_t>(n)) - 1;
}

// SplitMix64 finalizer over (seed, stream_id). Stateless: the pair fully
// determines the derived generator seed, independent of generation order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

BrownianPath generate_increments(std::uint64_t seed, std::uint64_t stream_id, double t0, double t1,
                                 std::int64_t fine_steps) {
  if (!(t1 > t0)) {
    throw std::invalid_argument("generate_increments: requires t1 > t0");
  }
  if (!is_pow2(fine_steps)) {
    throw std::invalid_argument("generate_increments: fine_steps must be a positive power of two");
  }

  BrownianPath path;
  path.t0_ = t0;
  path.t1_ = t1;
  path.fine_step_ = (t1 - t0) / static_cast<double>(fine_steps);
  path.ref_ = PathRef{seed, stream_id};
  path.increments_.resize(static_cast<std::size_t>(fine_steps));

  const double sigma = std::sqrt(path.fine_step_);
  // Lattice quantum: small enough to be statistically invisible, large enough
  // that fine_steps increments of up to ~32 sigma sum without rounding.
  const int q_exp = std::ilogb(sigma) + 1 + log2_pow2(fine_steps) + 5 - 52;
  const double q = std::ldexp(1.0, q_exp);

  std::mt19937_64 rng(mix_seed(seed, stream_id));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& dw : path.increments_) {
    dw = std::nearbyint(normal(rng) * sigma / q) * q;
  }
  return path;
}

std::vector<double> coarsen(const BrownianPath& path, std::int64_t factor) {
  if (!is_pow2(factor)) {
    throw std::invalid_argument("coarsen: factor must be a positive power of two");
  }
  const std::int64_t n = path.fine_steps();
  if (factor > n || n % factor != 0) {
    throw std::invalid_argument("coarsen: factor must divide fine_steps");
  }

  const auto inc = path.increments();
  std::vector<double> out(static_cast<std::size_t>(n / factor));
  for (std::int64_t k = 0; k < n / factor; ++k) {
    double s = 0.0;  // exact: increments live on a common lattice
    for (std::int64_t i = k * factor; i < (k + 1) * factor; ++i) {
      s += inc[static_cast<std::size_t>(i)];
    }
    out[static_cast<std::size_t>(k)] = s;
  }
  return out;
}

BrownianPath coarsen_path(const BrownianPath& path, std::int64_t factor) {
  BrownianPath out;
  out.t0_ = path.t0_;
  out.t1_ = path.t1_;
  out.fine_step_ = path.fine_step_ * static_cast<double>(factor);
  out.ref_ = path.ref_;
  out.increments_ = coarsen(path, factor);
  return out;
}

double wiener_value(const BrownianPath& path, std::int64_t grid_index) {
  if (grid_index < 0 || grid_index > path.fine_steps()) {
    throw std::invalid_argument("wiener_value: grid_index out of range");
  }
  const auto inc = path.increments();
  double s = 0.0;
  for (std::int64_t i = 0; i < grid_index; ++i) {
    s += inc[static_cast<std::size_t>(i)];
  }
  return s;
}

}  // namespace sddelab
