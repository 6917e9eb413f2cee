#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "sddelab/brownian.hpp"
#include "sddelab/convergence.hpp"
#include "sddelab/euler.hpp"
#include "sddelab/problem.hpp"

using namespace sddelab;

namespace {

TestProblemParams zero_params() {
  TestProblemParams params;
  params.tau = 1.0;
  params.xi = [](double) { return 1.0; };
  return params;
}

}  // namespace

TEST_SUITE_BEGIN("convergence");

TEST_CASE("pairwise_sum matches plain summation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> v(1037);
  double plain = 0.0;
  for (double& x : v) {
    x = unif(rng);
    plain += x;
  }
  CHECK(pairwise_sum(v) == doctest::Approx(plain).epsilon(1e-12));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("strong_error: worked examples") {
  const std::vector<double> a{0.5, -1.0, 2.0};
  CHECK(strong_error(a, a, 2.0) == 0.0);

  const std::vector<double> ref{0.0, 0.0};
  const std::vector<double> eul{1.0, -1.0};
  CHECK(strong_error(ref, eul, 2.0) == 1.0);

  const std::vector<double> one{1.0};
  const std::vector<double> bad{1.0, 2.0};
  CHECK_THROWS_AS(strong_error(one, bad, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(strong_error(one, one, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(strong_error(std::vector<double>{}, std::vector<double>{}, 2.0),
                  std::invalid_argument);
}

TEST_CASE("strong_error: norm-like behaviour") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::vector<double> ref(64), eul(64);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    ref[i] = unif(rng);
    eul[i] = unif(rng);
  }
  for (double p : {1.0, 2.0, 3.5}) {
    const double base = strong_error(ref, eul, p);
    CHECK(base > 0.0);
    // scaling all differences by c scales the statistic by c
    std::vector<double> scaled(64);
    const double c = 3.25;
    for (std::size_t i = 0; i < 64; ++i) scaled[i] = ref[i] + c * (eul[i] - ref[i]);
    CHECK(strong_error(ref, scaled, p) == doctest::Approx(c * base).epsilon(1e-12));
  }
  // zero iff all pairs equal
  std::vector<double> nearly(ref);
  nearly[17] += 1e-9;
  CHECK(strong_error(ref, nearly, 2.0) > 0.0);
}

TEST_CASE("strong_error: vector states use the Euclidean norm") {
  const std::vector<std::vector<double>> ref{{0.0, 0.0}, {1.0, 1.0}};
  const std::vector<std::vector<double>> eul{{3.0, 4.0}, {1.0, 1.0}};
  // |diff| = {5, 0}: mean of squares 12.5
  CHECK(strong_error(ref, eul, 2.0) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-14));
}

TEST_CASE("fit_rate: exact log-linear data") {
  const std::vector<std::int64_t> ns{4, 8, 16};
  SUBCASE("halving errors give slope -1") {
    const std::vector<double> errs{0.1, 0.05, 0.025};
    const auto fit = fit_rate(ns, errs);
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(fit.std_error <= 1e-10);
  }
  SUBCASE("sqrt-of-two decay gives slope -1/2") {
    const std::vector<double> errs{0.1, 0.1 / std::sqrt(2.0), 0.05};
    const auto fit = fit_rate(ns, errs);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.std_error <= 1e-10);
  }
  SUBCASE("slope is invariant under scaling the errors") {
    const std::vector<double> errs{0.09, 0.041, 0.0205};
    const auto base = fit_rate(ns, errs);
    std::vector<double> scaled(errs);
    for (double& e : scaled) e *= 7.3;
    CHECK(fit_rate(ns, scaled).slope == doctest::Approx(base.slope).epsilon(1e-12));
  }
}

TEST_CASE("fit_rate: tabulated error column regresses to about -1.02") {
  // least squares over six tabulated error values at n = 2^9 .. 2^14; the
  // expected slope and stderr are frozen from an independent regression
  const std::vector<std::int64_t> ns{512, 1024, 2048, 4096, 8192, 16384};
  const std::vector<double> errs{0.0001857299504105190, 0.0000911946799085898,
                                 0.0000450951550271487, 0.0000223376219662284,
                                 0.0000111954499489959, 0.0000052537027007630};
  const auto fit = fit_rate(ns, errs);
  CHECK(fit.slope == doctest::Approx(-1.0231499663609445).epsilon(1e-9));
  CHECK(fit.std_error == doctest::Approx(0.005982735523349556).epsilon(1e-6));
}

TEST_CASE("fit_rate: rejections") {
  const std::vector<std::int64_t> two{4, 8};
  const std::vector<double> errs2{0.1, 0.05};
  CHECK_THROWS_AS(fit_rate(two, errs2), std::invalid_argument);
  const std::vector<std::int64_t> ns{4, 8, 16};
  const std::vector<double> with_zero{0.1, 0.0, 0.025};
  CHECK_THROWS_AS(fit_rate(ns, with_zero), std::invalid_argument);
}

TEST_CASE("moment_estimate: constant and zero ensembles") {
  auto params = zero_params();
  SUBCASE("constant path gives |c|^p") {
    params.xi = [](double) { return -1.5; };
    const auto problem = build_test_problem(params);
    std::vector<EulerPath> paths;
    paths.push_back(integrate(problem, std::vector<double>(8, 0.0), 4));
    paths.push_back(integrate(problem, std::vector<double>(8, 0.0), 4));
    const auto estimate = moment_estimate(paths, 2.0);
    CHECK(estimate.value == 2.25);
    CHECK(estimate.num_paths == 2);
    CHECK(estimate.level == 4);
  }
  SUBCASE("zero path gives 0") {
    params.xi = [](double) { return 0.0; };
    const auto problem = build_test_problem(params);
    std::vector<EulerPath> paths{integrate(problem, std::vector<double>(8, 0.0), 4)};
    CHECK(moment_estimate(paths, 2.0).value == 0.0);
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(moment_estimate({}, 2.0), std::invalid_argument);
    params.xi = [](double) { return 1.0; };
    const auto problem = build_test_problem(params);
    std::vector<EulerPath> mixed;
    mixed.push_back(integrate(problem, std::vector<double>(8, 0.0), 4));
    mixed.push_back(integrate(problem, std::vector<double>(16, 0.0), 8));
    CHECK_THROWS_AS(moment_estimate(mixed, 2.0), std::invalid_argument);
  }
}

TEST_CASE("moment_estimate: multiplicative-noise reduction stays in its envelope") {
  // a = -8, beta2 = 1, xi = 1: E[Z(t)^2] <= 1 decays, and the sup includes t = 0,
  // so the estimate is at least 1; Doob gives E[sup Z^2] <= 4 e^{beta2^2 T}.
  TestProblemParams params;
  params.tau = 1.0;
  params.a = -8.0;
  params.beta2 = 1.0;
  params.xi = [](double) { return 1.0; };
  const auto problem = build_test_problem(params);

  const std::int64_t n = 64;
  std::vector<EulerPath> paths;
  paths.reserve(500);
  for (std::uint64_t stream = 0; stream < 500; ++stream) {
    const auto w = generate_increments(23, stream, 0.0, 2.0, 2 * n);
    paths.push_back(integrate(problem, coarsen(w, 1), n));
  }
  const auto estimate = moment_estimate(paths, 2.0);
  CHECK(estimate.value >= 0.999999);
  CHECK(estimate.value <= 4.0 * std::exp(2.0));
}

TEST_CASE("increment_scaling: additive noise scales like T h / 2 with slope -1") {
  TestProblemParams params = zero_params();
  params.beta1 = 1.0;  // dX = dW
  const auto problem = build_test_problem(params);
  const std::vector<std::int64_t> levels{16, 32, 64};
  const auto scaling = increment_scaling(problem, 77, levels, 1000, 2.0);
  REQUIRE(scaling.slope.has_value());
  CHECK(std::abs(*scaling.slope + 1.0) <= 0.05);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double expected = 2.0 * (1.0 / static_cast<double>(levels[i])) / 2.0;  // T h / 2
    CHECK(scaling.values[i] == doctest::Approx(expected).epsilon(0.10));
  }
}

TEST_CASE("increment_scaling: deterministic drift scales with slope -2") {
  TestProblemParams params = zero_params();
  params.a = 1.0;  // dX = X dt
  const auto problem = build_test_problem(params);
  const std::vector<std::int64_t> levels{32, 64, 128};
  const auto scaling = increment_scaling(problem, 1, levels, 1, 2.0);
  REQUIRE(scaling.slope.has_value());
  CHECK(*scaling.slope == doctest::Approx(-2.0).epsilon(0.05));
}

TEST_CASE("increment_scaling: zero problem degenerates to a flat undefined slope") {
  const auto problem = build_test_problem(zero_params());
  const std::vector<std::int64_t> levels{16, 32, 64};
  const auto scaling = increment_scaling(problem, 3, levels, 8, 2.0);
  CHECK(!scaling.slope.has_value());
  for (double v : scaling.values) CHECK(v == 0.0);
}

TEST_CASE("increment_scaling: rejections") {
  const auto problem = build_test_problem(zero_params());
  const std::vector<std::int64_t> short_levels{16, 32};
  CHECK_THROWS_AS(increment_scaling(problem, 1, short_levels, 4, 2.0), std::invalid_argument);
  const std::vector<std::int64_t> bad_levels{16, 24, 32};
  CHECK_THROWS_AS(increment_scaling(problem, 1, bad_levels, 4, 2.0), std::invalid_argument);
}

TEST_SUITE_END();
