#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "svolterra/errors.hpp"
#include "svolterra/resolvent.hpp"

using namespace svolterra;

namespace {

HVector random_unit(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  HVector v(dim);
  for (std::size_t k = 0; k < dim; ++k) v[k] = normal(gen);
  return (1.0 / norm(v)) * v;
}

}  // namespace

TEST_CASE("zero eigenvalue gives s = 1") {
  const TimeGrid grid(1.0, 200);
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::exponential()}) {
    const auto table = build_resolvent(SpectralOperator::zero(1), k, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) CHECK(table(0, j) == 1.0);
    CHECK(resolvent_equation_residual(table, HVector(std::vector<double>{1.0})).max_residual == 0.0);
  }
}

TEST_CASE("build_resolvent examples") {
  const TimeGrid grid(1.0, 1000);
  const SpectralOperator op({-1.0}, "single");
  const auto frac = build_resolvent(op, Kernel::fractional(0.5), grid);
  CHECK(std::abs(frac(0, 1000) - 0.427584) <= 1e-3);
  const auto expo = build_resolvent(op, Kernel::exponential(), grid);
  CHECK(std::abs(expo(0, 1000) - 0.567668) <= 5e-4);
}

TEST_CASE("apply_resolvent") {
  const TimeGrid grid(1.0, 1000);
  const SpectralOperator op({-1.0}, "single");
  const auto table = build_resolvent(op, Kernel::fractional(1.0), grid);
  CHECK(apply_resolvent(table, 0, HVector(std::vector<double>{3.0})) == HVector(std::vector<double>{3.0}));
  CHECK(apply_resolvent(table, 500, HVector(1)) == HVector(1));
  CHECK(apply_resolvent(table, 1000, HVector(std::vector<double>{2.0}))[0] == doctest::Approx(0.735759).epsilon(1e-6));
  CHECK_THROWS_AS(apply_resolvent(table, 0, HVector(2)), ShapeError);
}

TEST_CASE("resolvent residual for the default operator") {
  const TimeGrid grid(1.0, 1000);
  const auto op = SpectralOperator::dirichlet_laplacian(8);
  const HVector v = random_unit(8, 42);
  for (const Kernel& k : {Kernel::fractional(1.0), Kernel::exponential(), Kernel::fractional(0.5)}) {
    const auto table = build_resolvent(op, k, grid);
    const auto res = resolvent_equation_residual(table, v);
    CAPTURE(k.label());
    CHECK(res.max_residual <= 1e-6);
    CHECK(std::isfinite(res.coarse_residual));
  }
}

TEST_CASE("commutation") {
  const TimeGrid grid(1.0, 1000);
  const auto op = SpectralOperator::dirichlet_laplacian(8);
  const HVector v = random_unit(8, 42);
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::exponential()}) {
    const auto table = build_resolvent(op, k, grid);
    CHECK(commutation_check(table, op, v) <= 1e-13);
    CHECK(commutation_check(table, op, HVector(8)) == 0.0);
    const auto yos = build_resolvent(op, k, grid, 100);
    CHECK(commutation_check(yos, op, v) <= 1e-13);
  }
}

TEST_CASE("S(0) = I and scalar contraction") {
  const TimeGrid grid(1.0, 1000);
  const auto op = SpectralOperator::dirichlet_laplacian(8);
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::fractional(1.0), Kernel::exponential()}) {
    for (std::optional<long> n : {std::optional<long>{}, std::optional<long>{10}, std::optional<long>{100}}) {
      const auto table = build_resolvent(op, k, grid, n);
      for (std::size_t m = 0; m < 8; ++m) {
        CHECK(table(m, 0) == 1.0);
        for (std::size_t j = 0; j < grid.size(); ++j) {
          CHECK(table(m, j) >= -1e-8);
          CHECK(table(m, j) <= 1.0 + 1e-8);
        }
      }
      const auto bound = exponential_bound_fit(table);
      CHECK(bound.M == 1.0);
      CHECK(bound.omega == 0.0);
    }
  }
}

TEST_CASE("exponential bound detects growth") {
  const TimeGrid grid(1.0, 1000);
  const auto table = build_resolvent(SpectralOperator({2.0}, "unstable"), Kernel::fractional(1.0), grid);
  const auto bound = exponential_bound_fit(table);
  CHECK(bound.M == 1.0);
  CHECK(bound.omega == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("Mittag-Leffler oracle") {
  const TimeGrid grid(1.0, 1000);
  for (double alpha : {0.5, 0.75}) {
    for (double lambda : {-1.0, -4.0}) {
      const auto table = build_resolvent(SpectralOperator({lambda}, "single"), Kernel::fractional(alpha), grid);
      double worst = 0.0;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        worst = std::max(worst, std::abs(table(0, j) - mittag_leffler(alpha, lambda * std::pow(grid.t(j), alpha))));
      }
      CHECK(worst <= 1e-3);
    }
  }
  // Independent oracle for alpha = 1/2.
  const auto table = build_resolvent(SpectralOperator({-1.0}, "single"), Kernel::fractional(0.5), grid);
  for (std::size_t j = 0; j < grid.size(); j += 37) {
    CHECK(std::abs(table(0, j) - oracle::ml_half_negative(std::sqrt(grid.t(j)))) <= 1e-3);
  }
}

TEST_CASE("Yosida convergence, single mode") {
  const TimeGrid grid(1.0, 1000);
  const SpectralOperator op({-1.0}, "single");
  const long ns[] = {10, 100};
  const auto errors = yosida_resolvent_convergence(op, Kernel::fractional(1.0), grid, HVector(std::vector<double>{1.0}), ns);
  const double e10 = std::exp(-10.0 / 11.0) - std::exp(-1.0);
  const double e100 = std::exp(-100.0 / 101.0) - std::exp(-1.0);
  CHECK(e10 == doctest::Approx(0.035011).epsilon(1e-4));
  CHECK(e100 == doctest::Approx(0.003661).epsilon(1e-3));
  CHECK(std::abs(errors[0] - e10) <= 1e-5);
  CHECK(std::abs(errors[1] - e100) <= 1e-5);
}

TEST_CASE("Yosida convergence is strictly decreasing") {
  const TimeGrid grid(1.0, 1000);
  const auto op = SpectralOperator::dirichlet_laplacian(8);
  const long ns[] = {10, 100, 1000};
  const HVector v = random_unit(8, 42);
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::exponential()}) {
    const auto errors = yosida_resolvent_convergence(op, k, grid, v, ns);
    CHECK(errors[0] > errors[1]);
    CHECK(errors[1] > errors[2]);
  }
  const auto zero = yosida_resolvent_convergence(SpectralOperator::zero(2), Kernel::exponential(), grid,
                                                 HVector(std::vector<double>{1.0, 1.0}), ns);
  for (double e : zero) CHECK(e == 0.0);
  const long bad[] = {1};
  CHECK_THROWS_AS(yosida_resolvent_convergence(SpectralOperator({2.0}, "u"), Kernel::exponential(),
                                               grid, HVector(std::vector<double>{1.0}), bad),
                  ResolventSetError);
}

TEST_CASE("resolvent table csv") {
  const TimeGrid grid(1.0, 4);
  const auto table = build_resolvent(SpectralOperator::dirichlet_laplacian(2), Kernel::exponential(), grid);
  std::ostringstream out;
  table.write_csv(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,mode_1,mode_2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}
