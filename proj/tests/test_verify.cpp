#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "svolterra/errors.hpp"
#include "svolterra/verify.hpp"

using namespace svolterra;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<WienerBundle> bundles(const TimeGrid& grid, std::size_t modes, std::size_t paths) {
  return sample_ensemble(grid, EnsembleSpec{modes, 42, paths});
}

}  // namespace

TEST_CASE("zero operator: every residual vanishes exactly") {
  const TimeGrid grid(1.0, 200);
  const auto op = SpectralOperator::zero(4);
  const auto b = bundles(grid, 8, 4);
  const auto psi = IntegrandSeries::diagonal_decay(4, 8, 3.0);
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::exponential()}) {
    const auto strong = strong_solution_residual(op, k, psi, b, 0.0);
    CHECK(strong.residual_sup_mean == 0.0);
    CHECK(strong.pass);
    CHECK(strong.paths == 4);
    CHECK(strong.tolerance_used == 0.0);
    const auto weak = weak_solution_residual(op, k, psi, b, HVector::basis(4, 0), 0.0);
    CHECK(weak.residual_sup_mean == 0.0);
    const auto mild = mild_weak_equivalence_check(op, k, psi, b, 0.0);
    CHECK(mild.residual_sup_mean == 0.0);
    CHECK(mild.pass);
  }
}

TEST_CASE("weak residual trivial cases") {
  const TimeGrid grid(1.0, 200);
  const auto op = SpectralOperator::dirichlet_laplacian(4);
  const auto b = bundles(grid, 4, 3);
  const auto psi = IntegrandSeries::geometric(4, 4);
  CHECK(weak_solution_residual(op, Kernel::exponential(), psi, b, HVector(4), 0.0).residual_sup_mean == 0.0);
  const auto zero_psi = IntegrandSeries::zero(4, 4);
  const auto mild = mild_weak_equivalence_check(op, Kernel::exponential(), zero_psi, b, 0.0);
  CHECK(mild.residual_sup_mean == 0.0);
  CHECK(mild.pass);
}

TEST_CASE("weak and strong residuals agree coordinatewise") {
  const TimeGrid grid(1.0, 1000);
  const auto op = SpectralOperator::dirichlet_laplacian(8);
  const auto psi = IntegrandSeries::diagonal_decay(8, 8, 3.0);
  const auto b = sample_bundle(grid, 8, 42);
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::exponential()}) {
    CHECK(weak_strong_consistency(op, k, psi, b) <= 1e-12);
  }
}

TEST_CASE("strong residual is small and the witness finite") {
  const TimeGrid grid(1.0, 1000);
  const auto op = SpectralOperator::dirichlet_laplacian(8);
  const auto psi = IntegrandSeries::diagonal_decay(8, 8, 3.0);
  const auto b = bundles(grid, 8, 8);
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::exponential()}) {
    const auto r = strong_solution_residual(op, k, psi, b, kInf);
    CHECK(std::isfinite(r.integrability_witness));
    CHECK(r.integrability_witness > 0.0);
    CHECK(r.residual_sup_mean > 0.0);
    CHECK(r.residual_sup_mean < 0.1);
    CHECK(r.residual_sup_per_path.size() == 8);
    CHECK(r.pass);
    const auto tight = strong_solution_residual(op, k, psi, b, 0.0);
    CHECK_FALSE(tight.pass);
    CHECK(tight.tolerance_used == 0.0);
  }
}

TEST_CASE("bundles on different grids are rejected") {
  const auto op = SpectralOperator::zero(1);
  std::vector<WienerBundle> mixed{sample_bundle(TimeGrid(1.0, 10), 1, 1), sample_bundle(TimeGrid(1.0, 20), 1, 1)};
  CHECK_THROWS_AS(strong_solution_residual(op, Kernel::exponential(), IntegrandSeries::unit(1), mixed, kInf),
                  ShapeError);
  CHECK_THROWS_AS(
      strong_solution_residual(op, Kernel::exponential(), IntegrandSeries::unit(1), std::vector<WienerBundle>{}, kInf),
      PreconditionError);
}

TEST_CASE("refinement study: bounded operator") {
  const SpectralOperator op({-1.0}, "single");
  const auto psi = IntegrandSeries::unit(1);
  const auto suite = [&](std::span<const WienerBundle> b) {
    return strong_solution_residual(op, Kernel::fractional(1.0), psi, b, kInf);
  };
  const auto r = refinement_study("bounded", suite, 1.0, 200, 3, 2, EnsembleSpec{1, 42, 64}, 0.4);
  REQUIRE(r.refinement_rates);
  CHECK(r.refinement_rates->size() == 2);
  CHECK(r.level_dt.size() == 3);
  CHECK(r.level_dt.back() == doctest::Approx(1.0 / 800));
  CHECK(r.grid.steps() == 800);
  for (double rate : *r.refinement_rates) CHECK(rate >= 0.4);
  CHECK(r.residual_sup_mean <= r.tolerance_used);
  CHECK(r.pass);
}

TEST_CASE("refinement study: default operator, both kernels") {
  const auto op = SpectralOperator::dirichlet_laplacian(8);
  const auto psi = IntegrandSeries::diagonal_decay(8, 8, 3.0);
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::exponential()}) {
    const auto strong = [&](std::span<const WienerBundle> b) {
      return strong_solution_residual(op, k, psi, b, kInf);
    };
    const auto mild = [&](std::span<const WienerBundle> b) {
      return mild_weak_equivalence_check(op, k, psi, b, kInf);
    };
    for (const auto& suite : {ResidualSuite(strong), ResidualSuite(mild)}) {
      const auto r = refinement_study("default", suite, 1.0, 200, 3, 2, EnsembleSpec{8, 42, 32}, 0.4);
      CAPTURE(k.label());
      REQUIRE(r.refinement_rates);
      for (double rate : *r.refinement_rates) CHECK(rate >= 0.4);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("refinement pass semantics") {
  EnsembleSpec e{1, 42, 2};
  SUBCASE("zero residuals count as converged") {
    const auto suite = [](std::span<const WienerBundle> b) {
      VerificationReport r;
      r.grid = b.front().grid();
      r.paths = b.size();
      return r;
    };
    const auto r = refinement_study("zero", suite, 1.0, 10, 3, 2, e, 0.4);
    CHECK(r.pass);
  }
  SUBCASE("a stalled residual fails") {
    const auto suite = [](std::span<const WienerBundle> b) {
      VerificationReport r;
      r.grid = b.front().grid();
      r.residual_sup_mean = 1.0;
      return r;
    };
    const auto r = refinement_study("flat", suite, 1.0, 10, 3, 2, e, 0.4);
    CHECK_FALSE(r.pass);
    CHECK((*r.refinement_rates)[0] == doctest::Approx(0.0));
  }
  SUBCASE("first-order residual passes and records its tolerance") {
    const auto suite = [](std::span<const WienerBundle> b) {
      VerificationReport r;
      r.grid = b.front().grid();
      r.residual_sup_mean = r.grid.dt();
      return r;
    };
    const auto r = refinement_study("linear", suite, 1.0, 10, 3, 2, e, 0.4);
    CHECK(r.pass);
    CHECK((*r.refinement_rates)[1] == doctest::Approx(1.0));
    CHECK(r.tolerance_used == doctest::Approx(0.05 * std::pow(2.0, -0.4)));
  }
  CHECK_THROWS_AS(refinement_study("bad", {}, 1.0, 10, 0, 2, e, 0.4), PreconditionError);
}

TEST_CASE("aggregated ensembles match bundles sampled directly") {
  const TimeGrid grid(1.0, 40);
  const auto e = sample_ensemble(grid, EnsembleSpec{2, 9, 3});
  REQUIRE(e.size() == 3);
  for (std::uint64_t p = 0; p < 3; ++p) {
    const auto b = sample_bundle(grid, 2, 9, p);
    for (std::size_t j = 0; j < grid.steps(); ++j) CHECK(e[p].increment(1, j) == b.increment(1, j));
  }
}

TEST_CASE("Yosida suite: zero operator") {
  const TimeGrid grid(1.0, 200);
  const long ns[] = {10, 100, 1000};
  const auto r = yosida_strong_convergence_suite(SpectralOperator::zero(2), Kernel::exponential(), grid,
                                                 IntegrandSeries::unit(2), EnsembleSpec{2, 42, 8}, ns);
  for (std::size_t m = 0; m < 3; ++m) {
    CHECK(r.e1[m] == 0.0);
    CHECK(r.e2[m] == 0.0);
  }
  CHECK(r.e1_decreasing);
  CHECK(r.e2_decreasing);
}

TEST_CASE("Yosida suite: single mode against the closed form") {
  const TimeGrid grid(1.0, 200);
  const long ns[] = {10, 100};
  const auto r = yosida_strong_convergence_suite(SpectralOperator({-1.0}, "single"), Kernel::fractional(1.0), grid,
                                                 IntegrandSeries::unit(1), EnsembleSpec{1, 42, 4000}, ns);
  CHECK(r.e1[0] > 0.0);
  CHECK(r.e1[1] > 0.0);
  CHECK(r.e1[1] < r.e1[0]);
  // The exact second moment increases in t, so the supremum sits at t = 1.
  for (std::size_t m = 0; m < 2; ++m) {
    const double a = static_cast<double>(ns[m]) / static_cast<double>(ns[m] + 1);
    const double oracle = oracle::yosida_single_mode_e1(a);
    CAPTURE(m);
    CHECK(r.e1[m] >= 0.8 * oracle);
    CHECK(r.e1[m] <= 1.2 * oracle);
  }
}

TEST_CASE("Yosida suite: default operator") {
  const TimeGrid grid(1.0, 1000);
  const auto op = SpectralOperator::dirichlet_laplacian(8);
  const auto psi = IntegrandSeries::diagonal_decay(8, 8, 3.0);
  const long ns[] = {10, 100, 1000};
  for (const Kernel& k : {Kernel::fractional(0.5), Kernel::exponential()}) {
    const auto r = yosida_strong_convergence_suite(op, k, grid, psi, EnsembleSpec{8, 42, 16}, ns);
    CAPTURE(k.label());
    CHECK(r.paths == 16);
    CHECK(r.e1_decreasing);
    CHECK(r.e2_decreasing);
    CHECK(r.pathwise_decreasing);
    for (std::size_t m = 0; m < 3; ++m) {
      CHECK(r.split_bound_holds[m]);
      CHECK(r.split_margin[m] >= 0.0);
      CHECK(r.e2[m] <= 3.0 * (r.n1_sq[m] + r.n2_sq[m]));
    }
    CHECK(r.n1_route_discrepancy <= 1e-10);
  }
}

TEST_CASE("Yosida suite preconditions") {
  const TimeGrid grid(1.0, 50);
  const long bad_order[] = {100, 10};
  CHECK_THROWS_AS(yosida_strong_convergence_suite(SpectralOperator::zero(1), Kernel::exponential(), grid,
                                                  IntegrandSeries::unit(1), EnsembleSpec{1, 42, 2}, bad_order),
                  PreconditionError);
  const long small[] = {1, 2};
  CHECK_THROWS_AS(yosida_strong_convergence_suite(SpectralOperator({3.0}, "u"), Kernel::exponential(), grid,
                                                  IntegrandSeries::unit(1), EnsembleSpec{1, 42, 2}, small),
                  ResolventSetError);
}
