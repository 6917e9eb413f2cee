#include "sddelab/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sddelab/errors.hpp"

namespace sddelab {

namespace {

constexpr std::int64_t kMinSegmentSteps = 4;

// 16-point Gauss-Legendre rule on [-1, 1] (positive abscissas; symmetric).
constexpr int kGaussPoints = 8;
constexpr double kGaussX[kGaussPoints] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGaussW[kGaussPoints] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <typename F>
double gauss_legendre(F&& f, double lo, double hi, int panels) {
  double total = 0.0;
  const double w = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * w;
    double s = 0.0;
    for (int i = 0; i < kGaussPoints; ++i) {
      s += kGaussW[i] * (f(mid + 0.5 * w * kGaussX[i]) + f(mid - 0.5 * w * kGaussX[i]));
    }
    total += 0.5 * w * s;
  }
  return total;
}

// Number of fine steps to the segment boundary tau; the boundary must land
// exactly on the path grid (guaranteed when the path covers [0, 2 tau] or
// [0, tau] with a power-of-two step count).
std::int64_t segment_steps(const TestProblemParams& params, const BrownianPath& path) {
  if (path.t0() != 0.0) {
    throw std::invalid_argument("oracle: path must start at t0 = 0");
  }
  const double hf = path.fine_step();
  double k = std::floor(params.tau / hf);
  while ((k + 1.0) * hf <= params.tau) k += 1.0;
  while (k * hf > params.tau) k -= 1.0;
  const auto F = static_cast<std::int64_t>(k);
  if (F < kMinSegmentSteps) {
    throw std::invalid_argument("oracle: path resolution below the configured minimum");
  }
  if (F > path.fine_steps() || static_cast<double>(F) * hf != params.tau) {
    throw std::invalid_argument("oracle: segment boundary tau must lie on the fine grid");
  }
  return F;
}

struct Integrands {
  double drift;       // b {y}^l1 - beta2 (beta1 + beta3 {y}^l2)
  double diffusion;   // beta1 + beta3 {y}^l2
};

Integrands integrands_at(const TestProblemParams& p, double delayed) {
  const double g = p.beta1 + p.beta3 * signed_pow(delayed, p.l2);
  return {p.b * signed_pow(delayed, p.l1) - p.beta2 * g, g};
}

}  // namespace

double fundamental_factor(double a, double beta2, const BrownianPath& path, std::int64_t s_index,
                          std::int64_t t_index) {
  if (s_index > t_index) {
    throw std::invalid_argument("fundamental_factor: requires s_index <= t_index");
  }
  if (s_index < 0 || t_index > path.fine_steps()) {
    throw std::invalid_argument("fundamental_factor: index out of range");
  }
  const auto inc = path.increments();
  double dW = 0.0;
  for (std::int64_t i = s_index; i < t_index; ++i) dW += inc[static_cast<std::size_t>(i)];
  const double dt = static_cast<double>(t_index - s_index) * path.fine_step();
  return std::exp((a - 0.5 * beta2 * beta2) * dt + beta2 * dW);
}

std::vector<double> exact_segment_first(const TestProblemParams& params, const BrownianPath& path) {
  const std::int64_t F = segment_steps(params, path);
  const double hf = path.fine_step();
  const double c = params.a - 0.5 * params.beta2 * params.beta2;
  const double xi0 = params.xi(0.0);
  const auto dw = path.increments();

  std::vector<double> z(static_cast<std::size_t>(F + 1));
  z[0] = xi0;
  double W = 0.0, A = 0.0, B = 0.0;
  for (std::int64_t i = 0; i < F; ++i) {
    const double s = static_cast<double>(i) * hf;
    const double inv_phi = std::exp(-c * s - params.beta2 * W);
    const auto g = integrands_at(params, params.xi(std::min(s - params.tau, 0.0)));
    A += inv_phi * g.drift * hf;
    B += inv_phi * g.diffusion * dw[static_cast<std::size_t>(i)];
    W += dw[static_cast<std::size_t>(i)];
    const double phi = std::exp(c * (static_cast<double>(i + 1) * hf) + params.beta2 * W);
    z[static_cast<std::size_t>(i + 1)] = phi * (xi0 + A + B);
  }
  return z;
}

std::vector<double> exact_segment_second(const TestProblemParams& params, const BrownianPath& path,
                                         std::span<const double> first) {
  const std::int64_t F = segment_steps(params, path);
  if (static_cast<std::int64_t>(first.size()) != F + 1) {
    throw std::invalid_argument("oracle: first-segment grid does not match the path grid");
  }
  if (path.fine_steps() < 2 * F) {
    throw std::invalid_argument("oracle: path does not cover [0, 2 tau]");
  }
  const double hf = path.fine_step();
  const double c = params.a - 0.5 * params.beta2 * params.beta2;
  const double z_tau = first[static_cast<std::size_t>(F)];
  const auto dw = path.increments();

  std::vector<double> z(static_cast<std::size_t>(F + 1));
  z[0] = z_tau;  // Phi_{tau,tau} = 1 and both integrals are empty
  double dWtau = 0.0, A = 0.0, B = 0.0;
  for (std::int64_t i = 0; i < F; ++i) {
    const double u = static_cast<double>(i) * hf;  // t - tau
    const double inv_phi = std::exp(-c * u - params.beta2 * dWtau);
    const auto g = integrands_at(params, first[static_cast<std::size_t>(i)]);
    A += inv_phi * g.drift * hf;
    B += inv_phi * g.diffusion * dw[static_cast<std::size_t>(F + i)];
    dWtau += dw[static_cast<std::size_t>(F + i)];
    const double phi = std::exp(c * (static_cast<double>(i + 1) * hf) + params.beta2 * dWtau);
    z[static_cast<std::size_t>(i + 1)] = phi * (z_tau + A + B);
  }
  return z;
}

OracleSolution exact_solution(const TestProblemParams& params, const BrownianPath& path) {
  const auto first = exact_segment_first(params, path);
  const auto second = exact_segment_second(params, path, first);
  const std::int64_t F = static_cast<std::int64_t>(first.size()) - 1;

  OracleSolution solution;
  solution.fine_steps = 2 * F;
  solution.quadrature_step = path.fine_step();
  solution.path_ref = path.ref();
  solution.values.reserve(static_cast<std::size_t>(2 * F + 1));
  solution.values.assign(first.begin(), first.end());
  solution.values.insert(solution.values.end(), second.begin() + 1, second.end());
  for (std::size_t i = 0; i < solution.values.size(); ++i) {
    if (!std::isfinite(solution.values[i])) {
      throw IntegrationError(static_cast<std::int64_t>(i), solution.values[i],
                             "oracle: non-finite value at fine index " + std::to_string(i));
    }
  }
  return solution;
}

double method_of_steps_ode(const TestProblemParams& params, double t) {
  if (params.beta1 != 0.0 || params.beta2 != 0.0 || params.beta3 != 0.0) {
    throw std::invalid_argument("method_of_steps_ode: requires all beta coefficients zero");
  }
  if (!params.xi) {
    throw std::invalid_argument("method_of_steps_ode: initial function xi required");
  }
  if (t < 0.0 || t > 2.0 * params.tau) {
    throw std::invalid_argument("method_of_steps_ode: t outside [0, 2 tau]");
  }
  const double a = params.a, b = params.b, l1 = params.l1, tau = params.tau;
  const int panels = 64;

  auto z1 = [&](double u) {
    const double forced = gauss_legendre(
        [&](double s) { return std::exp(a * (u - s)) * b * signed_pow(params.xi(std::min(s - tau, 0.0)), l1); },
        0.0, u, panels);
    return std::exp(a * u) * params.xi(0.0) + forced;
  };
  if (t <= tau) return z1(t);

  const double z_tau = z1(tau);
  const double forced = gauss_legendre(
      [&](double s) { return std::exp(a * (t - s)) * b * signed_pow(z1(s - tau), l1); }, tau, t,
      panels);
  return std::exp(a * (t - tau)) * z_tau + forced;
}

}  // namespace sddelab
