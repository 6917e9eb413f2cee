#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sddelab/brownian.hpp"
#include "sddelab/oracle.hpp"
#include "sddelab/problem.hpp"

using namespace sddelab;

namespace {

TestProblemParams gbm_params(double a, double beta2) {
  TestProblemParams params;
  params.tau = 1.0;
  params.a = a;
  params.beta2 = beta2;
  params.xi = [](double) { return 1.0; };
  return params;
}

TestProblemParams table1_params(double l1, double l2) {
  TestProblemParams params;
  params.tau = 1.0;
  params.a = -8.0;
  params.b = 4.0;
  params.beta2 = 1.0;
  params.beta3 = 1.0;
  params.l1 = l1;
  params.l2 = l2;
  params.xi = [](double t) { return t + 1.0; };
  return params;
}

}  // namespace

TEST_SUITE_BEGIN("oracle");

TEST_CASE("fundamental_factor: degenerate cases") {
  const auto path = generate_increments(2, 0, 0.0, 2.0, 256);
  SUBCASE("beta2 = 0 leaves the deterministic exponential") {
    const double f = fundamental_factor(-1.5, 0.0, path, 32, 96);
    const double dt = 64.0 * path.fine_step();
    CHECK(f == doctest::Approx(std::exp(-1.5 * dt)).epsilon(1e-15));
  }
  SUBCASE("a = 0 and beta2 = 0 is identically one") {
    CHECK(fundamental_factor(0.0, 0.0, path, 0, 256) == 1.0);
    CHECK(fundamental_factor(0.0, 0.0, path, 10, 200) == 1.0);
  }
  SUBCASE("empty interval") {
    CHECK(fundamental_factor(-8.0, 1.0, path, 57, 57) == 1.0);
  }
  SUBCASE("index order violations") {
    CHECK_THROWS_AS(fundamental_factor(0.0, 1.0, path, 9, 8), std::invalid_argument);
    CHECK_THROWS_AS(fundamental_factor(0.0, 1.0, path, 0, 257), std::invalid_argument);
    CHECK_THROWS_AS(fundamental_factor(0.0, 1.0, path, -1, 4), std::invalid_argument);
  }
}

TEST_CASE("multiplicative reduction: oracle equals xi(0) * fundamental factor pathwise") {
  // b = beta1 = beta3 = 0: both integrands vanish identically, no quadrature enters
  const auto params = gbm_params(-1.0, 0.5);
  for (std::uint64_t stream = 0; stream < 50; ++stream) {
    const auto path = generate_increments(5, stream, 0.0, 2.0, 2048);
    const auto solution = exact_solution(params, path);
    const double expected = fundamental_factor(-1.0, 0.5, path, 0, 2048);
    CHECK(solution.terminal() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(solution.values[1024] ==
          doctest::Approx(fundamental_factor(-1.0, 0.5, path, 0, 1024)).epsilon(1e-12));
    CHECK(solution.path_ref == path.ref());
  }
}

TEST_CASE("multiplicative reduction: second moment matches the closed form") {
  // E[Z(T)^2] = xi(0)^2 exp((2a + beta2^2) T)
  const auto params = gbm_params(-1.0, 0.5);
  const double expected = std::exp((2.0 * -1.0 + 0.25) * 2.0);
  const std::int64_t paths = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t stream = 0; stream < paths; ++stream) {
    const auto path = generate_increments(40, static_cast<std::uint64_t>(stream), 0.0, 2.0, 1024);
    const double z = exact_solution(params, path).terminal();
    sum += z * z;
    sum2 += z * z * z * z;
  }
  const double mean = sum / static_cast<double>(paths);
  const double var = sum2 / static_cast<double>(paths) - mean * mean;
  const double stderr_mean = std::sqrt(var / static_cast<double>(paths));
  CHECK(std::abs(mean - expected) <= 4.0 * stderr_mean);
}

TEST_CASE("pure additive noise: Z(t) = xi(0) + W(t) exactly") {
  TestProblemParams params;
  params.tau = 1.0;
  params.beta1 = 1.0;
  params.xi = [](double) { return 1.0; };
  const auto path = generate_increments(6, 1, 0.0, 2.0, 512);
  const auto solution = exact_solution(params, path);
  for (std::int64_t i = 0; i <= 512; i += 17) {
    CHECK(solution.values[static_cast<std::size_t>(i)] == 1.0 + wiener_value(path, i));
  }
  CHECK(solution.terminal() == 1.0 + wiener_value(path, 512));
}

TEST_CASE("deterministic reduction agrees with the method-of-steps oracle") {
  TestProblemParams params;
  params.tau = 1.0;
  params.a = -0.8;
  params.b = 0.9;
  params.l1 = 1.0;
  params.xi = [](double t) { return t + 1.0; };

  const std::int64_t fine = 8192;  // over [0, 2]
  const auto path = generate_increments(1, 0, 0.0, 2.0, fine);  // noise is irrelevant: all beta = 0
  const auto solution = exact_solution(params, path);
  const double h = solution.quadrature_step;
  for (double t : {0.25, 0.5, 1.0, 1.5, 2.0}) {
    const auto index = static_cast<std::size_t>(std::llround(t / h));
    const double reference = method_of_steps_ode(params, t);
    // left-point Riemann quadrature: O(h_fine) time-discretization error
    CHECK(std::abs(solution.values[index] - reference) <= 20.0 * h);
  }
}

TEST_CASE("segments join continuously and the linear special case is exponential") {
  TestProblemParams params;
  params.tau = 1.0;
  params.a = -1.3;
  params.b = 0.0;
  params.xi = [](double) { return 2.0; };
  const auto path = generate_increments(9, 0, 0.0, 2.0, 1024);

  const auto first = exact_segment_first(params, path);
  const auto second = exact_segment_second(params, path, first);
  REQUIRE(first.size() == 513);
  REQUIRE(second.size() == 513);
  CHECK(second[0] == first[512]);  // Phi_{tau,tau} = 1, empty integrals

  const double hf = path.fine_step();
  for (std::size_t i = 0; i <= 512; i += 64) {
    CHECK(first[i] == doctest::Approx(2.0 * std::exp(-1.3 * static_cast<double>(i) * hf))
                          .epsilon(1e-13));
    CHECK(second[i] == doctest::Approx(first[512] * std::exp(-1.3 * static_cast<double>(i) * hf))
                           .epsilon(1e-13));
  }
}

TEST_CASE("reference parameters: finite over a thousand paths at a fine grid") {
  const auto params = table1_params(1.0, 1.0);
  double max_abs = 0.0;
  for (std::uint64_t stream = 0; stream < 1000; ++stream) {
    const auto path = generate_increments(11, stream, 0.0, 2.0, 65536);
    const auto solution = exact_solution(params, path);  // throws on any non-finite value
    max_abs = std::max(max_abs, std::abs(solution.terminal()));
  }
  CHECK(max_abs > 0.0);
  CHECK(max_abs < 1e6);  // strongly mean-reverting drift keeps paths tame
}

TEST_CASE("the oracle is a pure function of the path") {
  const auto params = table1_params(0.5, 0.5);
  const auto path = generate_increments(12, 34, 0.0, 2.0, 2048);
  const auto a = exact_solution(params, path);
  const auto b = exact_solution(params, path);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("method_of_steps_ode: closed-form checks") {
  TestProblemParams params;
  params.tau = 1.0;
  params.a = 0.0;
  params.b = 1.0;
  params.l1 = 1.0;
  params.xi = [](double) { return 1.0; };

  SUBCASE("dZ = Z(t-1) dt, xi == 1: Z = 1 + t on [0,1], Z(2) = 3.5") {
    CHECK(method_of_steps_ode(params, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(method_of_steps_ode(params, 0.25) == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(method_of_steps_ode(params, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(method_of_steps_ode(params, 2.0) == doctest::Approx(3.5).epsilon(1e-10));
  }
  SUBCASE("b = 0 decays exponentially") {
    params.b = 0.0;
    params.a = 1.2;
    CHECK(method_of_steps_ode(params, 0.75) == doctest::Approx(std::exp(0.9)).epsilon(1e-12));
    CHECK(method_of_steps_ode(params, 2.0) == doctest::Approx(std::exp(2.4)).epsilon(1e-12));
  }
  SUBCASE("a = b = 0 is constant") {
    params.a = params.b = 0.0;
    CHECK(method_of_steps_ode(params, 1.37) == 1.0);
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(method_of_steps_ode(params, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(method_of_steps_ode(params, 2.1), std::invalid_argument);
    params.beta2 = 1.0;
    CHECK_THROWS_AS(method_of_steps_ode(params, 1.0), std::invalid_argument);
  }
}

TEST_CASE("grid preconditions") {
  const auto params = table1_params(1.0, 1.0);
  SUBCASE("resolution below the minimum is rejected") {
    const auto path = generate_increments(1, 0, 0.0, 2.0, 4);  // two steps per segment
    CHECK_THROWS_AS(exact_segment_first(params, path), std::invalid_argument);
  }
  SUBCASE("segment grid mismatch is rejected") {
    const auto path = generate_increments(1, 0, 0.0, 2.0, 64);
    auto first = exact_segment_first(params, path);
    first.pop_back();
    CHECK_THROWS_AS(exact_segment_second(params, path, first), std::invalid_argument);
  }
  SUBCASE("path must start at zero") {
    const auto path = generate_increments(1, 0, 0.5, 2.5, 64);
    CHECK_THROWS_AS(exact_segment_first(params, path), std::invalid_argument);
  }
}

TEST_SUITE_END();
