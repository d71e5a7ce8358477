#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "svolterra/convolution.hpp"
#include "svolterra/errors.hpp"

using namespace svolterra;

namespace {

const SpectralOperator& single() {
  static const SpectralOperator op({-1.0}, "single");
  return op;
}

double sup_abs(const TrajectorySet& x) {
  double worst = 0.0;
  for (std::size_t p = 0; p < x.paths(); ++p) {
    for (std::size_t j = 0; j < x.grid().size(); ++j) worst = std::max(worst, norm(x.state(p, j)));
  }
  return worst;
}

}  // namespace

TEST_CASE("zero operator reduces the convolution to the Ito integral") {
  const TimeGrid grid(1.0, 200);
  const auto bundle = sample_bundle(grid, 8, 42);
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::exponential()}) {
    const auto table = build_resolvent(SpectralOperator::zero(4), k, grid);
    const auto psi = IntegrandSeries::diagonal_decay(4, 8, 1.0);
    const auto w = stochastic_convolution(table, psi, bundle);
    const auto ito = ito_path(psi, bundle);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      for (std::size_t m = 0; m < 4; ++m) CHECK(w.at(0, j, m) == doctest::Approx(ito[m][j]).epsilon(1e-13));
    }
  }
}

TEST_CASE("zero integrand gives a zero convolution") {
  const TimeGrid grid(1.0, 100);
  const auto table = build_resolvent(SpectralOperator::dirichlet_laplacian(4), Kernel::exponential(), grid);
  const auto w = stochastic_convolution(table, IntegrandSeries::zero(4, 3), sample_bundle(grid, 3, 1));
  CHECK(sup_abs(w) == 0.0);
}

TEST_CASE("W(0) = 0 and trajectories are square integrable") {
  const TimeGrid grid(1.0, 200);
  const auto op = SpectralOperator::dirichlet_laplacian(8);
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::exponential()}) {
    const auto table = build_resolvent(op, k, grid);
    for (std::uint64_t p = 0; p < 4; ++p) {
      const auto w = stochastic_convolution(table, IntegrandSeries::diagonal_decay(8, 8, 3.0),
                                            sample_bundle(grid, 8, 42, p));
      for (std::size_t m = 0; m < 8; ++m) CHECK(w.at(0, 0, m) == 0.0);
      for (double v : w.squared_norm_integrals()) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
      }
    }
  }
}

TEST_CASE("convolution is linear in the integrand") {
  const TimeGrid grid(1.0, 200);
  const auto table = build_resolvent(SpectralOperator::dirichlet_laplacian(4), Kernel::fractional(0.5), grid);
  const auto bundle = sample_bundle(grid, 2, 7);
  const auto psi = IntegrandSeries::brownian_feedback(4);
  const auto w = stochastic_convolution(table, psi, bundle);
  for (double c : {-3.0, 0.5, 10.0}) {
    const auto wc = stochastic_convolution(table, psi.scaled(c), bundle);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      for (std::size_t m = 0; m < 4; ++m) {
        const double ref = c * w.at(0, j, m);
        CHECK(std::abs(wc.at(0, j, m) - ref) <= 1e-14 * (1.0 + std::abs(ref)));
      }
    }
  }
}

TEST_CASE("one-point evaluation matches the full path") {
  const TimeGrid grid(1.0, 100);
  const auto table = build_resolvent(SpectralOperator::dirichlet_laplacian(3), Kernel::exponential(), grid);
  const auto bundle = sample_bundle(grid, 3, 2);
  const auto psi = IntegrandSeries::geometric(3, 3);
  const auto w = stochastic_convolution(table, psi, bundle);
  for (std::size_t j : {0, 1, 50, 100}) {
    const HVector at = stochastic_convolution_at(table, psi, bundle, j);
    for (std::size_t m = 0; m < 3; ++m) CHECK(at[m] == doctest::Approx(w.at(0, j, m)).epsilon(1e-13));
  }
}

TEST_CASE("second moment of the single-mode convolution") {
  const TimeGrid grid(1.0, 100);
  const auto table = build_resolvent(single(), Kernel::fractional(1.0), grid);
  const auto psi = IntegrandSeries::unit(1);
  const std::size_t paths = 20000;
  double sum = 0.0, sq = 0.0;
  for (std::uint64_t p = 0; p < paths; ++p) {
    const double x = stochastic_convolution_at(table, psi, sample_bundle(grid, 1, 42, p), grid.steps())[0];
    sum += x * x;
    sq += x * x * x * x;
  }
  const double mean = sum / paths;
  const double se = std::sqrt((sq / paths - mean * mean) / paths);
  const double oracle = (1.0 - std::exp(-2.0)) / 2.0;
  CHECK(oracle == doctest::Approx(0.432332).epsilon(1e-6));
  CHECK(std::abs(mean - oracle) <= 3.0 * se);
}

TEST_CASE("isometry transfers to the convolution") {
  const TimeGrid grid(1.0, 100);
  const auto op = SpectralOperator::dirichlet_laplacian(4);
  const auto table = build_resolvent(op, Kernel::exponential(), grid);
  const auto psi = IntegrandSeries::diagonal_decay(4, 4, 1.0);
  // Left-point quadrature of sum_i |S(T - tau) Psi_i|^2; Psi_i = i^-1 e_i.
  double rhs = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t l = 0; l < grid.steps(); ++l) {
      const double s = table(i, grid.steps() - l) / static_cast<double>(i + 1);
      rhs += s * s * grid.dt();
    }
  }
  const std::size_t paths = 20000;
  double sum = 0.0, sq = 0.0;
  for (std::uint64_t p = 0; p < paths; ++p) {
    const double x = norm(stochastic_convolution_at(table, psi, sample_bundle(grid, 4, 42, p), grid.steps()));
    sum += x * x;
    sq += x * x * x * x;
  }
  const double mean = sum / paths;
  const double se = std::sqrt((sq / paths - mean * mean) / paths);
  CHECK(std::abs(mean - rhs) <= 3.0 * se);
}

TEST_CASE("interchange of A with the convolution") {
  const TimeGrid grid(1.0, 200);
  SUBCASE("zero operator") {
    const auto op = SpectralOperator::zero(3);
    const auto r = apply_A_to_convolution(op, build_resolvent(op, Kernel::exponential(), grid),
                                          IntegrandSeries::unit(3), sample_bundle(grid, 1, 3));
    CHECK(r.discrepancy == 0.0);
    CHECK(sup_abs(r.applied) == 0.0);
  }
  SUBCASE("single mode") {
    const auto r = apply_A_to_convolution(single(), build_resolvent(single(), Kernel::exponential(), grid),
                                          IntegrandSeries::unit(1), sample_bundle(grid, 1, 3));
    CHECK(r.discrepancy <= 1e-12);
  }
  SUBCASE("default operator, fractional kernel") {
    const auto op = SpectralOperator::dirichlet_laplacian(8);
    const auto table = build_resolvent(op, Kernel::fractional(0.5), TimeGrid(1.0, 1000));
    const auto r = apply_A_to_convolution(op, table, IntegrandSeries::diagonal_decay(8, 8, 3.0),
                                          sample_bundle(TimeGrid(1.0, 1000), 8, 42));
    CHECK(r.discrepancy <= 1e-12);
  }
  SUBCASE("A Psi outside the integrand space") {
    const auto op = SpectralOperator::dirichlet_laplacian(2);
    IntegrandSeries wild("wild", 2, 1, [](std::size_t, const IncrementPrefix&, std::span<double> out) { out[0] = 1.0; },
                         [](std::size_t, double) { return 1.0; }, {INFINITY}, true);
    CHECK_THROWS_AS(apply_A_to_convolution(op, build_resolvent(op, Kernel::exponential(), grid), wild,
                                           sample_bundle(grid, 1, 3)),
                    PreconditionError);
  }
}

TEST_CASE("Yosida convolutions") {
  const TimeGrid grid(1.0, 500);
  const auto bundle = sample_bundle(grid, 1, 42);
  const auto psi1 = IntegrandSeries::unit(1);
  const auto w = stochastic_convolution(build_resolvent(single(), Kernel::fractional(1.0), grid), psi1, bundle);
  const auto wn = yosida_convolution(single(), Kernel::fractional(1.0), 1000000, psi1, bundle);
  CHECK(wn.sup_distance(w) <= 1e-4);

  const auto zero = SpectralOperator::zero(2);
  const auto psi2 = IntegrandSeries::unit(2);
  const auto w0 = stochastic_convolution(build_resolvent(zero, Kernel::exponential(), grid), psi2, bundle);
  CHECK(yosida_convolution(zero, Kernel::exponential(), 10, psi2, bundle).sup_distance(w0) == 0.0);

  const auto op = SpectralOperator::dirichlet_laplacian(8);
  const auto psi = IntegrandSeries::diagonal_decay(8, 8, 3.0);
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::exponential()}) {
    const auto table = build_resolvent(op, k, grid);
    for (std::uint64_t p = 0; p < 8; ++p) {
      const auto b = sample_bundle(grid, 8, 42, p);
      const auto ref = stochastic_convolution(table, psi, b);
      const double e10 = yosida_convolution(op, k, 10, psi, b).sup_distance(ref);
      const double e100 = yosida_convolution(op, k, 100, psi, b).sup_distance(ref);
      const double e1000 = yosida_convolution(op, k, 1000, psi, b).sup_distance(ref);
      CHECK(e100 < e10);
      CHECK(e1000 < e100);
    }
  }
  CHECK_THROWS_AS(yosida_convolution(SpectralOperator({5.0}, "u"), Kernel::exponential(), 5, psi1, bundle),
                  ResolventSetError);
}

TEST_CASE("Cauchy reformulation") {
  const TimeGrid grid(1.0, 200);
  SUBCASE("zero integrand") {
    const auto r = cauchy_reformulation(single(), Kernel::exponential(), IntegrandSeries::zero(1),
                                        sample_bundle(grid, 1, 42));
    CHECK(r.sup_discrepancy == 0.0);
    CHECK(sup_abs(r.direct) == 0.0);
    CHECK(sup_abs(r.reformulated) == 0.0);
    CHECK(sup_abs(r.y) == 0.0);
  }
  SUBCASE("singular or vanishing a(0) is rejected") {
    for (double alpha : {0.5, 1.5}) {
      CHECK_THROWS_AS(cauchy_reformulation(single(), Kernel::fractional(alpha), IntegrandSeries::unit(1),
                                           sample_bundle(grid, 1, 42)),
                      UnsupportedOperation);
    }
  }
  SUBCASE("routes agree to quadrature accuracy") {
    const auto r = cauchy_reformulation(single(), Kernel::exponential(), IntegrandSeries::unit(1),
                                        sample_bundle(TimeGrid(1.0, 1000), 1, 42));
    CHECK(r.sup_discrepancy > 0.0);
    CHECK(r.sup_discrepancy <= 0.05);
  }
  SUBCASE("constant kernel: the reformulation is the semigroup form") {
    const auto r = cauchy_reformulation(SpectralOperator::dirichlet_laplacian(3), Kernel::fractional(1.0),
                                        IntegrandSeries::geometric(3, 2), sample_bundle(grid, 2, 5));
    CHECK(std::isfinite(r.sup_discrepancy));
    CHECK(r.sup_discrepancy <= 0.05);
  }
}

TEST_CASE("Cauchy ODE residual is O(dt)") {
  const auto forcing = [](std::size_t k, double t) { return std::sin(t + k); };
  for (std::size_t steps : {100, 1000}) {
    const TimeGrid grid(1.0, steps);
    CHECK(cauchy_ode_residual(single(), Kernel::exponential(), grid, forcing) <= 10.0 * grid.dt());
    CHECK(cauchy_ode_residual(SpectralOperator::dirichlet_laplacian(1), Kernel::exponential(), grid, forcing) <=
          10.0 * grid.dt());
  }
  // Stiff modes need |lambda| dt < 1 before the initial layer is resolved.
  const TimeGrid fine(1.0, 10000);
  CHECK(cauchy_ode_residual(SpectralOperator::dirichlet_laplacian(8), Kernel::exponential(), fine, forcing) <=
        10.0 * fine.dt());
}

TEST_CASE("regularity probe") {
  const TimeGrid grid(1.0, 1024);
  SUBCASE("zero integrand") {
    const auto table = build_resolvent(single(), Kernel::exponential(), grid);
    const auto w = stochastic_convolution(table, IntegrandSeries::zero(1), sample_bundle(grid, 1, 42));
    const auto r = regularity_probe(w);
    CHECK(r.max_jump == 0.0);
    CHECK(std::isnan(r.holder_estimate));
  }
  SUBCASE("Brownian modulus") {
    const auto table = build_resolvent(SpectralOperator::zero(1), Kernel::exponential(), grid);
    TrajectorySet set(grid, 1, 32, "brownian");
    for (std::uint64_t p = 0; p < 32; ++p) {
      const auto w = stochastic_convolution(table, IntegrandSeries::unit(1), sample_bundle(grid, 1, 42, p));
      for (std::size_t j = 0; j < grid.size(); ++j) set.at(p, j, 0) = w.at(0, j, 0);
    }
    const auto r = regularity_probe(set);
    CHECK(r.lags.front() == 1);
    CHECK(r.lags.back() >= 10);
    CHECK(r.holder_estimate == doctest::Approx(0.5).epsilon(0.2));
    CHECK(std::abs(r.holder_estimate - 0.5) <= 0.1);
  }
  SUBCASE("max jump shrinks under refinement") {
    const auto op = SpectralOperator::dirichlet_laplacian(8);
    const auto psi = IntegrandSeries::diagonal_decay(8, 8, 3.0);
    const TimeGrid fine(1.0, 1600);
    const TimeGrid coarse(1.0, 400);
    const auto tf = build_resolvent(op, Kernel::exponential(), fine);
    const auto tc = build_resolvent(op, Kernel::exponential(), coarse);
    double jf = 0.0, jc = 0.0;
    for (std::uint64_t p = 0; p < 8; ++p) {
      const auto b = sample_bundle(fine, 8, 42, p);
      jf = std::max(jf, regularity_probe(stochastic_convolution(tf, psi, b)).max_jump);
      jc = std::max(jc, regularity_probe(stochastic_convolution(tc, psi, b.aggregated(4))).max_jump);
    }
    CHECK(jf < jc);
  }
}

TEST_CASE("trajectory csv formats") {
  const TimeGrid grid(1.0, 2);
  TrajectorySet set(grid, 2, 2, "x");
  set.at(1, 2, 1) = 0.25;
  std::ostringstream rows, summary;
  set.write_csv(rows);
  set.write_summary_csv(summary);
  std::istringstream r(rows.str()), s(summary.str());
  std::string line;
  std::getline(r, line);
  CHECK(line == "path,t,mode,value");
  int n = 0;
  while (std::getline(r, line)) ++n;
  CHECK(n == 2 * 3 * 2);
  std::getline(s, line);
  CHECK(line == "t,mean_sq_norm,stderr");
  n = 0;
  while (std::getline(s, line)) ++n;
  CHECK(n == 3);
}
