#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "oracles.hpp"
#include "svolterra/errors.hpp"
#include "svolterra/kernels.hpp"

using namespace svolterra;

TEST_CASE("evaluate matches the kernel formulas") {
  CHECK(Kernel::fractional(1.0).evaluate(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Kernel::exponential().evaluate(0.0) == 1.0);
  CHECK(Kernel::fractional(0.5).evaluate(1.0) ==
        doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(Kernel::fractional(0.5).evaluate(1.0) == doctest::Approx(0.5641896).epsilon(1e-7));
  CHECK(Kernel::fractional(1.5).evaluate(4.0) ==
        doctest::Approx(2.0 / (std::sqrt(std::numbers::pi) / 2.0)).epsilon(1e-14));
}

TEST_CASE("fractional kernel with alpha = 1 is identically one") {
  const Kernel k = Kernel::fractional(1.0);
  for (double t : {1e-6, 0.1, 1.0, 7.5, 100.0}) CHECK(k.evaluate(t) == doctest::Approx(1.0));
}

TEST_CASE("derivatives") {
  const Kernel e = Kernel::exponential();
  CHECK(e.evaluate_derivative(0.0) == -1.0);
  CHECK(e.evaluate_derivative(std::log(2.0)) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK_THROWS_AS(Kernel::fractional(0.5).evaluate_derivative(1.0), UnsupportedOperation);
  CHECK(Kernel::fractional(1.0).evaluate_derivative(2.0) == 0.0);
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(Kernel::fractional(0.5).evaluate(0.0), DomainError);
  CHECK_THROWS_AS(Kernel::exponential().evaluate(-1.0), DomainError);
  CHECK_THROWS_AS(Kernel::fractional(0.0), DomainError);
  CHECK_THROWS_AS(Kernel::fractional(2.0), DomainError);
  const Kernel tab = Kernel::tabulated({0.0, 1.0, 2.0}, {1.0, 0.5, 0.25});
  CHECK_THROWS_AS(tab.evaluate(2.5), RangeError);
  CHECK(tab.evaluate(0.5) == doctest::Approx(0.75));
}

TEST_CASE("a(0) and the differentiability flag agree") {
  CHECK(std::isinf(Kernel::fractional(0.5).a0()));
  CHECK_FALSE(Kernel::fractional(0.5).differentiable());
  CHECK(Kernel::fractional(0.5).singular_at_zero());
  CHECK(Kernel::fractional(1.0).a0() == 1.0);
  CHECK(Kernel::fractional(1.5).a0() == 0.0);
  CHECK(Kernel::exponential().a0() == 1.0);
  for (const Kernel& k : {Kernel::fractional(0.3), Kernel::fractional(1.0),
                          Kernel::fractional(1.7), Kernel::exponential()}) {
    CHECK(std::isfinite(k.a0()) == k.differentiable());
  }
}

TEST_CASE("tabulated grids must start at zero and increase") {
  CHECK_THROWS_AS(Kernel::tabulated({0.1, 1.0}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(Kernel::tabulated({0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(Kernel::tabulated({0.0, 1.0}, {1.0}), ShapeError);
}

TEST_CASE("tabulated kernels load from a two-column csv with a header") {
  const auto path = std::filesystem::temp_directory_path() / "svolterra_kernel_test.csv";
  {
    std::ofstream out(path);
    out << "t,a\n0,1\n0.5,0.6065306597126334\n1,0.36787944117144233\n";
  }
  const Kernel k = Kernel::load_csv(path);
  CHECK(k.kind() == Kernel::Kind::Tabulated);
  CHECK(k.support_end() == 1.0);
  CHECK(k.evaluate(1.0) == doctest::Approx(std::exp(-1.0)));
  {
    std::ofstream out(path);
    out << "t,a\n0,1,3\n1,2,4\n";
  }
  CHECK_THROWS_AS(Kernel::load_csv(path), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("built-in kernels are positive and decreasing") {
  for (const Kernel& k : {Kernel::fractional(0.25), Kernel::fractional(0.5),
                          Kernel::fractional(0.9), Kernel::exponential()}) {
    double prev = k.evaluate(1e-3);
    for (double t = 2e-3; t < 5.0; t *= 1.3) {
      const double v = k.evaluate(t);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("complete positivity: exponential kernel, mu = 1") {
  const TimeGrid grid(2.0, 2000);
  const auto rep = check_complete_positivity(Kernel::exponential(), 1.0, grid);
  CHECK(rep.nonneg);
  // Differentiating s + (a * s) = 1 with a = e^{-t} gives s' = -2 s + 1.
  const double oracle = oracle::rk4([](double, double s) { return -2.0 * s + 1.0; }, 1.0, 2.0, 4000);
  CHECK(std::abs(oracle - (0.5 + 0.5 * std::exp(-4.0))) < 1e-12);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(std::abs(rep.s_values[j] - (0.5 + 0.5 * std::exp(-2.0 * grid.t(j)))) < 5e-4);
  }
  CHECK(std::abs(rep.s_values.back() - oracle) < 5e-4);
  // r = e^{-2t}.
  for (std::size_t j = 0; j < grid.size(); j += 100) {
    CHECK(std::abs(rep.r_values[j] - std::exp(-2.0 * grid.t(j))) < 5e-4);
  }
}

TEST_CASE("complete positivity: fractional alpha = 1, mu = 1 gives exp(-t)") {
  const TimeGrid grid(2.0, 2000);
  const auto rep = check_complete_positivity(Kernel::fractional(1.0), 1.0, grid);
  CHECK(rep.nonneg);
  for (std::size_t j = 0; j < grid.size(); j += 50) {
    CHECK(std::abs(rep.s_values[j] - std::exp(-grid.t(j))) < 5e-4);
    CHECK(std::abs(rep.r_values[j] - std::exp(-grid.t(j))) < 5e-4);
  }
}

TEST_CASE("complete positivity: mu = 0 gives s = 1") {
  const TimeGrid grid(2.0, 400);
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::exponential()}) {
    const auto rep = check_complete_positivity(k, 0.0, grid);
    CHECK(rep.nonneg);
    for (double s : rep.s_values) CHECK(s == 1.0);
  }
}

TEST_CASE("complete positivity: singular r matches the erfc oracle") {
  const TimeGrid grid(2.0, 2000);
  for (double mu : {0.5, 1.0, 10.0}) {
    const auto rep = check_complete_positivity(Kernel::fractional(0.5), mu, grid);
    CHECK(std::isinf(rep.r_values[0]));
    double worst = 0.0;
    for (std::size_t j = 100; j < grid.size(); ++j) {
      worst = std::max(worst, std::abs(rep.r_values[j] - oracle::r_half(mu, grid.t(j))));
    }
    CHECK(worst < 5e-3);
    double worst_s = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      worst_s = std::max(worst_s, std::abs(rep.s_values[j] -
                                           oracle::ml_half_negative(mu * std::sqrt(grid.t(j)))));
    }
    CHECK(worst_s < 1e-3);
  }
}

TEST_CASE("complete positivity holds for the built-in kernels on [0, 2]") {
  const TimeGrid grid(2.0, 2000);
  for (const Kernel& k : {Kernel::fractional(0.25), Kernel::fractional(0.5),
                          Kernel::fractional(1.0), Kernel::exponential()}) {
    for (double mu : {0.0, 0.5, 1.0, 10.0}) {
      const auto rep = check_complete_positivity(k, mu, grid);
      CAPTURE(k.label());
      CAPTURE(mu);
      CHECK(rep.nonneg);
      CHECK(rep.min_s >= -1e-8);
      CHECK(rep.min_r >= -1e-8);
    }
  }
}

TEST_CASE("r equation without mu") {
  const TimeGrid grid(1.0, 500);
  CompletePositivityOptions printed;
  printed.r_without_mu = true;
  const auto a = check_complete_positivity(Kernel::exponential(), 10.0, grid, printed);
  const auto b = check_complete_positivity(Kernel::exponential(), 1.0, grid);
  for (std::size_t j = 0; j < grid.size(); ++j) CHECK(a.r_values[j] == doctest::Approx(b.r_values[j]));
  const auto c = check_complete_positivity(Kernel::exponential(), 10.0, grid);
  CHECK(c.r_values.back() < a.r_values.back());
}

TEST_CASE("grid refinement order of s") {
  auto at_one = [](const Kernel& k, std::size_t steps) {
    return check_complete_positivity(k, 1.0, TimeGrid(2.0, steps)).s_values;
  };
  auto order = [&](const Kernel& k) {
    const auto s1 = at_one(k, 100);
    const auto s2 = at_one(k, 200);
    const auto s4 = at_one(k, 400);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t j = 0; j < s1.size(); ++j) {
      d1 = std::max(d1, std::abs(s1[j] - s2[2 * j]));
      d2 = std::max(d2, std::abs(s2[2 * j] - s4[4 * j]));
    }
    return std::log2(d1 / d2);
  };
  CHECK(order(Kernel::exponential()) >= 1.0);
  CHECK(order(Kernel::fractional(0.5)) >= 0.5);
  CHECK(order(Kernel::fractional(0.25)) >= 0.25);
}
