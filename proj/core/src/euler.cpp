#include "sddelab/euler.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sddelab/errors.hpp"

namespace sddelab {

namespace detail {

namespace {

// Smallest integer k with k*h >= x, corrected against reconstruction.
std::int64_t ceil_steps(double x, double h) {
  double k = std::ceil(x / h);
  while ((k - 1.0) * h >= x) k -= 1.0;
  while (k * h < x) k += 1.0;
  return static_cast<std::int64_t>(k);
}

// Largest integer k with k*h <= x.
std::int64_t floor_steps(double x, double h) {
  double k = std::floor(x / h);
  while ((k + 1.0) * h <= x) k += 1.0;
  while (k * h > x) k -= 1.0;
  return static_cast<std::int64_t>(k);
}

}  // namespace

DelayResolver::DelayResolver(const DelaySpec& spec, double step, std::int64_t n_per_tau)
    : kind_(spec.kind), step_(step), n_per_tau_(n_per_tau) {
  if (kind_ == DelayKind::constant_lag) {
    lag_ = spec.lag;
    lag_steps_ceil_ = ceil_steps(spec.lag, step);
    last_initial_ = floor_steps(spec.lag, step);
  }
}

}  // namespace detail

namespace {

class Stepper {
 public:
  Stepper(const SDDEProblem& problem, std::int64_t n_per_tau)
      : problem_(problem),
        d_(problem.dim_state()),
        m_(problem.dim_noise()),
        n_per_tau_(n_per_tau),
        step_(problem.period() / static_cast<double>(n_per_tau)),
        num_steps_(problem.num_periods() * n_per_tau) {
    for (const DelaySpec& spec : problem.delays()) {
      resolvers_.emplace_back(spec, step_, n_per_tau_);
    }
    delayed_.resize(problem.delays().size() * static_cast<std::size_t>(d_));
    drift_out_.resize(static_cast<std::size_t>(d_));
    diffusion_out_.resize(static_cast<std::size_t>(d_) * static_cast<std::size_t>(m_));
  }

  EulerPath run(std::vector<std::vector<double>> noise) {
    EulerPath path;
    path.problem = &problem_;
    path.n_per_tau = n_per_tau_;
    path.step = step_;
    path.num_steps = num_steps_;
    path.states.resize(static_cast<std::size_t>(num_steps_ + 1) * d_);

    problem_.initial().evaluate_into(0.0, {path.states.data(), static_cast<std::size_t>(d_)});

    for (std::int64_t j = 0; j < num_steps_; ++j) {
      const double t = static_cast<double>(j) * step_;
      const double* x = path.states.data() + static_cast<std::size_t>(j) * d_;
      double* next = path.states.data() + static_cast<std::size_t>(j + 1) * d_;

      assemble_delayed(path, j);
      problem_.drift(t, delayed_, {x, static_cast<std::size_t>(d_)}, drift_out_);
      problem_.diffusion(t, delayed_, {x, static_cast<std::size_t>(d_)}, diffusion_out_);

      for (int i = 0; i < d_; ++i) {
        double v = x[i] + drift_out_[static_cast<std::size_t>(i)] * step_;
        for (int c = 0; c < m_; ++c) {
          v += diffusion_out_[static_cast<std::size_t>(i) * m_ + c] * noise[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
        }
        if (!std::isfinite(v)) {
          std::ostringstream msg;
          msg << "integrate: non-finite state at step " << j + 1 << " (t=" << t + step_
              << "), component " << i << ", value " << v;
          throw IntegrationError(j + 1, v, msg.str());
        }
        next[i] = v;
      }
    }
    path.noise = std::move(noise);
    return path;
  }

 private:
  void assemble_delayed(const EulerPath& path, std::int64_t j) {
    for (std::size_t q = 0; q < resolvers_.size(); ++q) {
      double* out = delayed_.data() + q * static_cast<std::size_t>(d_);
      const detail::DelayResolver& r = resolvers_[q];
      if (r.is_initial(j)) {
        problem_.initial().evaluate_into(r.initial_time(j), {out, static_cast<std::size_t>(d_)});
      } else {
        const std::int64_t di = r.grid_index(j);
        // causality: admissible delays only ever look left of the current step
        if (di < 0 || di > j) {
          throw std::logic_error(
              "integrate: delayed lookup outside the computed prefix (delays not validated?)");
        }
        const double* src = path.states.data() + static_cast<std::size_t>(di) * d_;
        for (int i = 0; i < d_; ++i) out[i] = src[i];
      }
    }
  }

  const SDDEProblem& problem_;
  int d_;
  int m_;
  std::int64_t n_per_tau_;
  double step_;
  std::int64_t num_steps_;
  std::vector<detail::DelayResolver> resolvers_;
  std::vector<double> delayed_;
  std::vector<double> drift_out_;
  std::vector<double> diffusion_out_;
};

}  // namespace

EulerPath integrate(const SDDEProblem& problem, std::vector<std::vector<double>> noise,
                    std::int64_t n_per_tau) {
  if (!(n_per_tau > 0) || (n_per_tau & (n_per_tau - 1)) != 0) {
    throw std::invalid_argument("integrate: n_per_tau must be a positive power of two");
  }
  if (static_cast<int>(noise.size()) != problem.dim_noise()) {
    throw std::invalid_argument("integrate: expected one noise vector per noise column");
  }
  const std::int64_t num_steps = problem.num_periods() * n_per_tau;
  for (const auto& column : noise) {
    if (static_cast<std::int64_t>(column.size()) != num_steps) {
      throw std::invalid_argument("integrate: noise length must equal T/h");
    }
  }
  Stepper stepper(problem, n_per_tau);
  return stepper.run(std::move(noise));
}

EulerPath integrate(const SDDEProblem& problem, std::vector<double> noise,
                    std::int64_t n_per_tau) {
  if (problem.dim_noise() != 1) {
    throw std::invalid_argument("integrate: scalar-noise overload requires dim_noise == 1");
  }
  std::vector<std::vector<double>> columns;
  columns.push_back(std::move(noise));
  return integrate(problem, std::move(columns), n_per_tau);
}

std::vector<double> lookup_delayed(const EulerPath& path, const InitialSegment& segment,
                                   double t_query) {
  if (t_query < -segment.history()) {
    throw std::invalid_argument("lookup_delayed: delayed time below -H");
  }
  if (t_query <= 0.0) {
    return segment.evaluate(t_query);
  }
  // left grid snap of t_query
  double k = std::floor(t_query / path.step);
  while ((k + 1.0) * path.step <= t_query) k += 1.0;
  while (k * path.step > t_query) k -= 1.0;
  const std::int64_t index = static_cast<std::int64_t>(k);
  if (index > path.num_steps) {
    throw std::invalid_argument("lookup_delayed: query beyond the computed prefix");
  }
  const auto s = path.state(index);
  return {s.begin(), s.end()};
}

}  // namespace sddelab
