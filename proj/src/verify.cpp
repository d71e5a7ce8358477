#include "svolterra/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svolterra/errors.hpp"
#include "svolterra/parallel.hpp"

namespace svolterra {

namespace {

const TimeGrid& common_grid(std::span<const WienerBundle> bundles) {
  if (bundles.empty()) throw PreconditionError("verification needs at least one bundle");
  for (const auto& b : bundles) {
    if (!(b.grid() == bundles.front().grid())) {
      throw ShapeError("verification bundles must share one grid");
    }
  }
  return bundles.front().grid();
}

// Per-mode pieces of the identity W = a * (A W) + I on one path.
struct IdentityTerms {
  std::vector<std::vector<double>> w;     // W_k(t_j)
  std::vector<std::vector<double>> conv;  // quadrature of (a * W_k)(t_j)
  std::vector<std::vector<double>> ito;   // I_k(t_j)
};

IdentityTerms identity_terms(const ResolventTable& table, const IntegrandSeries& psi,
                             const WienerBundle& bundle) {
  IdentityTerms t;
  t.w = convolve_modes(table, forcing_increments(psi, bundle));
  t.ito = ito_path(psi, bundle);
  t.conv.resize(t.w.size());
  for (std::size_t k = 0; k < t.w.size(); ++k) {
    t.conv[k] = table.weights().for_coefficient(table.effective_eigenvalue(k)).apply(t.w[k]);
  }
  return t;
}

double strong_coordinate(const IdentityTerms& t, std::span<const double> lambdas, std::size_t k,
                         std::size_t j) {
  return t.w[k][j] - lambdas[k] * t.conv[k][j] - t.ito[k][j];
}

double weak_value(const IdentityTerms& t, std::span<const double> lambdas, const HVector& xi,
                  std::size_t j) {
  double x = 0.0, q = 0.0, i = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    x += xi[k] * t.w[k][j];
    q += t.conv[k][j] * (lambdas[k] * xi[k]);
    i += xi[k] * t.ito[k][j];
  }
  return x - q - i;
}

VerificationReport finish(std::string name, const TimeGrid& grid, std::vector<double> sups,
                          double witness, double tolerance) {
  VerificationReport report;
  report.name = std::move(name);
  report.grid = grid;
  report.paths = sups.size();
  double sum = 0.0;
  for (double s : sups) sum += s;
  report.residual_sup_mean = sum / static_cast<double>(sups.size());
  report.residual_sup_per_path = std::move(sups);
  report.integrability_witness = witness;
  report.tolerance_used = tolerance;
  report.pass = report.residual_sup_mean <= tolerance && std::isfinite(witness);
  return report;
}

void check_dims(const SpectralOperator& op, const IntegrandSeries& psi) {
  if (psi.dim() != op.size()) throw ShapeError("integrand and operator dimensions differ");
}

}  // namespace

VerificationReport strong_solution_residual(const SpectralOperator& op, const Kernel& kernel,
                                            const IntegrandSeries& psi,
                                            std::span<const WienerBundle> bundles,
                                            double tolerance) {
  check_dims(op, psi);
  if (!std::isfinite(psi.applied(op).tail_total())) {
    throw PreconditionError("strong residual: A Psi has an infinite tail bound");
  }
  const TimeGrid& grid = common_grid(bundles);
  const ResolventTable table = build_resolvent(op, kernel, grid);
  const auto lambdas = op.eigenvalues();
  std::vector<double> sups(bundles.size(), 0.0);
  std::vector<double> witness(bundles.size(), 0.0);
  parallel::for_each_index(bundles.size(), [&](std::size_t p) {
    const IdentityTerms t = identity_terms(table, psi, bundles[p]);
    double worst = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < op.size(); ++k) {
        const double r = strong_coordinate(t, lambdas, k, j);
        sq += r * r;
      }
      worst = std::max(worst, std::sqrt(sq));
    }
    sups[p] = worst;
    // int_0^T |a(T - tau) A W(tau)| dtau by product integration of |A W|.
    std::vector<double> aw_norm(grid.size(), 0.0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < op.size(); ++k) sq += lambdas[k] * lambdas[k] * t.w[k][j] * t.w[k][j];
      aw_norm[j] = std::sqrt(sq);
    }
    double integral = 0.0;
    for (std::size_t i = 0; i <= grid.steps(); ++i) {
      integral += std::abs(table.weights()(grid.steps(), i)) * aw_norm[i];
    }
    witness[p] = integral;
  });
  const double worst_witness = *std::max_element(witness.begin(), witness.end());
  return finish("strong", grid, std::move(sups), worst_witness, tolerance);
}

VerificationReport weak_solution_residual(const SpectralOperator& op, const Kernel& kernel,
                                          const IntegrandSeries& psi,
                                          std::span<const WienerBundle> bundles,
                                          const HVector& xi, double tolerance) {
  check_dims(op, psi);
  if (xi.size() != op.size()) throw ShapeError("weak residual: test vector dimension mismatch");
  const TimeGrid& grid = common_grid(bundles);
  const ResolventTable table = build_resolvent(op, kernel, grid);
  const auto lambdas = op.eigenvalues();
  std::vector<double> sups(bundles.size(), 0.0);
  parallel::for_each_index(bundles.size(), [&](std::size_t p) {
    const IdentityTerms t = identity_terms(table, psi, bundles[p]);
    double worst = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      worst = std::max(worst, std::abs(weak_value(t, lambdas, xi, j)));
    }
    sups[p] = worst;
  });
  return finish("weak", grid, std::move(sups), 0.0, tolerance);
}

double weak_strong_consistency(const SpectralOperator& op, const Kernel& kernel,
                               const IntegrandSeries& psi, const WienerBundle& bundle) {
  check_dims(op, psi);
  const ResolventTable table = build_resolvent(op, kernel, bundle.grid());
  const auto lambdas = op.eigenvalues();
  const IdentityTerms t = identity_terms(table, psi, bundle);
  double worst = 0.0;
  for (std::size_t k = 0; k < op.size(); ++k) {
    const HVector xi = HVector::basis(op.size(), k);
    for (std::size_t j = 0; j < bundle.grid().size(); ++j) {
      const double d = weak_value(t, lambdas, xi, j) - strong_coordinate(t, lambdas, k, j);
      worst = std::max(worst, std::abs(d));
    }
  }
  return worst;
}

VerificationReport mild_weak_equivalence_check(const SpectralOperator& op, const Kernel& kernel,
                                               const IntegrandSeries& psi,
                                               std::span<const WienerBundle> bundles,
                                               double tolerance) {
  check_dims(op, psi);
  const TimeGrid& grid = common_grid(bundles);
  const ResolventTable table = build_resolvent(op, kernel, grid);
  const auto lambdas = op.eigenvalues();
  std::vector<double> sups(bundles.size(), 0.0);
  parallel::for_each_index(bundles.size(), [&](std::size_t p) {
    // X is the mild formula S * Psi dW; the weak identity is tested on every e_k.
    const IdentityTerms t = identity_terms(table, psi, bundles[p]);
    double worst = 0.0;
    for (std::size_t k = 0; k < op.size(); ++k) {
      const HVector xi = HVector::basis(op.size(), k);
      for (std::size_t j = 0; j < grid.size(); ++j) {
        worst = std::max(worst, std::abs(weak_value(t, lambdas, xi, j)));
      }
    }
    sups[p] = worst;
  });
  return finish("mild-weak", grid, std::move(sups), 0.0, tolerance);
}

std::vector<WienerBundle> sample_ensemble(const TimeGrid& grid, const EnsembleSpec& ensemble) {
  if (ensemble.paths < 1) throw PreconditionError("ensemble needs at least one path");
  std::vector<std::optional<WienerBundle>> slots(ensemble.paths);
  parallel::for_each_index(ensemble.paths, [&](std::size_t p) {
    slots[p].emplace(sample_bundle(grid, ensemble.modes, ensemble.seed, p));
  });
  std::vector<WienerBundle> out;
  out.reserve(ensemble.paths);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

VerificationReport refinement_study(const std::string& name, const ResidualSuite& suite,
                                    double t_end, std::size_t coarse_steps, std::size_t levels,
                                    std::size_t factor, const EnsembleSpec& ensemble,
                                    double min_rate) {
  if (levels < 1 || factor < 2) {
    throw PreconditionError("refinement study: need levels >= 1 and factor >= 2");
  }
  std::size_t scale = 1;
  for (std::size_t l = 1; l < levels; ++l) scale *= factor;
  const TimeGrid finest(t_end, coarse_steps * scale);
  const std::vector<WienerBundle> fine = sample_ensemble(finest, ensemble);

  std::vector<VerificationReport> reports;
  for (std::size_t l = 0; l < levels; ++l) {
    const std::size_t down = scale;
    scale /= factor;
    if (down == 1) {
      reports.push_back(suite(fine));
      continue;
    }
    std::vector<WienerBundle> coarse;
    coarse.reserve(fine.size());
    for (const auto& b : fine) coarse.push_back(b.aggregated(down));
    reports.push_back(suite(coarse));
  }

  VerificationReport report = reports.back();
  report.name = name;
  report.min_rate = min_rate;
  for (const auto& r : reports) {
    report.level_residuals.push_back(r.residual_sup_mean);
    report.level_dt.push_back(r.grid.dt());
    report.integrability_witness = std::max(report.integrability_witness, r.integrability_witness);
  }
  if (levels == 1) return report;

  // Residuals at the rounding floor count as converged.
  constexpr double kFloor = 1e-13;
  std::vector<double> rates;
  bool ok = std::isfinite(report.integrability_witness);
  for (std::size_t l = 1; l < levels; ++l) {
    const double prev = report.level_residuals[l - 1];
    const double cur = report.level_residuals[l];
    const double rate = cur <= kFloor ? std::numeric_limits<double>::infinity()
                                      : std::log(prev / cur) / std::log(static_cast<double>(factor));
    rates.push_back(rate);
    ok = ok && rate >= min_rate;
  }
  const double prev = report.level_residuals[levels - 2];
  report.tolerance_used =
      std::max(prev * std::pow(static_cast<double>(factor), -min_rate), kFloor);
  report.refinement_rates = std::move(rates);
  report.pass = ok && report.residual_sup_mean <= report.tolerance_used;
  return report;
}

namespace {

bool strictly_decreasing(const std::vector<double>& v) {
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) return true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

struct YosidaSums {
  // [n][j] sums over paths.
  std::vector<std::vector<double>> e1, e2, n1, n2;
  double route = 0.0;
};

}  // namespace

YosidaSuiteReport yosida_strong_convergence_suite(const SpectralOperator& op,
                                                  const Kernel& kernel, const TimeGrid& grid,
                                                  const IntegrandSeries& psi,
                                                  const EnsembleSpec& ensemble,
                                                  std::span<const long> n_list) {
  check_dims(op, psi);
  if (n_list.empty()) throw PreconditionError("yosida suite: n_list is empty");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) throw PreconditionError("yosida suite: n_list must increase");
  }
  if (ensemble.modes < psi.modes()) {
    throw ShapeError("yosida suite: ensemble has fewer noise modes than the integrand");
  }
  const std::size_t count = n_list.size();
  const std::size_t dim = op.size();
  const ResolventTable base = build_resolvent(op, kernel, grid);
  std::vector<ResolventTable> tables;
  tables.reserve(count);
  for (long n : n_list) tables.push_back(build_resolvent(op, kernel, grid, n));
  const IntegrandSeries a_psi = psi.applied(op);

  YosidaSuiteReport report;
  report.n_list.assign(n_list.begin(), n_list.end());
  report.paths = ensemble.paths;
  report.pathwise_sup.assign(count, std::vector<double>(ensemble.paths, 0.0));

  const std::vector<double> zeros(grid.size(), 0.0);
  YosidaSums init;
  init.e1.assign(count, zeros);
  init.e2 = init.n1 = init.n2 = init.e1;

  const YosidaSums sums = parallel::reduce_paths(
      ensemble.paths, init,
      [&](std::size_t p, YosidaSums& acc) {
        const WienerBundle bundle = sample_bundle(grid, ensemble.modes, ensemble.seed, p);
        const auto g = forcing_increments(psi, bundle);
        const auto ag = forcing_increments(a_psi, bundle);
        const auto w = convolve_modes(base, g);
        const auto w_a = convolve_modes(base, ag);
        for (std::size_t m = 0; m < count; ++m) {
          const long n = n_list[m];
          const auto wn = convolve_modes(tables[m], g);
          const auto wn_a = convolve_modes(tables[m], ag);
          double sup = 0.0;
          for (std::size_t j = 0; j < grid.size(); ++j) {
            double d1 = 0.0, d2 = 0.0, q1 = 0.0, q2 = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
              const double lambda = op.eigenvalue(k);
              const double lambda_n = yosida_scalar(n, lambda);
              const double diff = wn[k][j] - w[k][j];
              const double e2 = lambda_n * wn[k][j] - lambda * w[k][j];
              const double nn1 = j_scalar(n, lambda) * (wn_a[k][j] - w_a[k][j]);
              const double nn2 = (lambda_n - lambda) * w[k][j];
              d1 += diff * diff;
              d2 += e2 * e2;
              q1 += nn1 * nn1;
              q2 += nn2 * nn2;
              acc.route = std::max(acc.route, std::abs(std::abs(nn1) - std::abs(lambda_n * diff)));
            }
            acc.e1[m][j] += d1;
            acc.e2[m][j] += d2;
            acc.n1[m][j] += q1;
            acc.n2[m][j] += q2;
            sup = std::max(sup, std::sqrt(d1));
          }
          report.pathwise_sup[m][p] = sup;
        }
      },
      [](YosidaSums& into, const YosidaSums& from) {
        for (std::size_t m = 0; m < into.e1.size(); ++m) {
          for (std::size_t j = 0; j < into.e1[m].size(); ++j) {
            into.e1[m][j] += from.e1[m][j];
            into.e2[m][j] += from.e2[m][j];
            into.n1[m][j] += from.n1[m][j];
            into.n2[m][j] += from.n2[m][j];
          }
        }
        into.route = std::max(into.route, from.route);
      });

  const double inv = 1.0 / static_cast<double>(ensemble.paths);
  for (std::size_t m = 0; m < count; ++m) {
    double e1 = 0.0, e2 = 0.0, n1 = 0.0, n2 = 0.0;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.size(); ++j) {
      e1 = std::max(e1, sums.e1[m][j] * inv);
      e2 = std::max(e2, sums.e2[m][j] * inv);
      n1 = std::max(n1, sums.n1[m][j] * inv);
      n2 = std::max(n2, sums.n2[m][j] * inv);
      margin = std::min(margin, 3.0 * (sums.n1[m][j] + sums.n2[m][j]) * inv - sums.e2[m][j] * inv);
    }
    report.e1.push_back(e1);
    report.e2.push_back(e2);
    report.n1_sq.push_back(n1);
    report.n2_sq.push_back(n2);
    report.split_margin.push_back(margin);
    report.split_bound_holds.push_back(e2 <= 3.0 * (n1 + n2));
  }
  report.n1_route_discrepancy = sums.route;
  report.e1_decreasing = strictly_decreasing(report.e1);
  report.e2_decreasing = strictly_decreasing(report.e2);
  report.pathwise_decreasing = true;
  for (std::size_t p = 0; p < ensemble.paths; ++p) {
    std::vector<double> along(count);
    for (std::size_t m = 0; m < count; ++m) along[m] = report.pathwise_sup[m][p];
    report.pathwise_decreasing = report.pathwise_decreasing && strictly_decreasing(along);
  }
  return report;
}

}  // namespace svolterra
