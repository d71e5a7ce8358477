#include "svolterra/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "svolterra/csv.hpp"
#include "svolterra/errors.hpp"

namespace svolterra {

ResolventTable::ResolventTable(const SpectralOperator& op, const Kernel& kernel,
                               QuadratureWeights weights, std::optional<long> yosida_n,
                               std::vector<std::vector<double>> values)
    : eigenvalues_(op.eigenvalues().begin(), op.eigenvalues().end()),
      kernel_(kernel),
      weights_(std::move(weights)),
      yosida_n_(yosida_n),
      values_(std::move(values)) {
  if (values_.size() != op.size()) throw ShapeError("resolvent table: one row per mode required");
  effective_.resize(op.size());
  for (std::size_t k = 0; k < op.size(); ++k) {
    effective_[k] = yosida_n_ ? yosida_scalar(*yosida_n_, eigenvalues_[k]) : eigenvalues_[k];
  }
}

void ResolventTable::write_csv(std::ostream& out) const {
  std::vector<std::string> header{"t"};
  for (std::size_t k = 0; k < modes(); ++k) header.push_back("mode_" + std::to_string(k + 1));
  out << csv::join(header) << '\n';
  for (std::size_t j = 0; j < grid().size(); ++j) {
    std::vector<std::string> row{csv::format(grid().t(j))};
    for (std::size_t k = 0; k < modes(); ++k) row.push_back(csv::format(values_[k][j]));
    out << csv::join(row) << '\n';
  }
}

ResolventTable build_resolvent(const SpectralOperator& op, const Kernel& kernel,
                               const TimeGrid& grid, std::optional<long> yosida_n) {
  if (yosida_n && !(static_cast<double>(*yosida_n) > op.max_eigenvalue())) {
    throw ResolventSetError("build_resolvent: Yosida n=" + std::to_string(*yosida_n) +
                            " must exceed the largest eigenvalue");
  }
  QuadratureWeights weights = build_weights(kernel, grid);
  const std::vector<double> ones(grid.size(), 1.0);
  std::vector<std::vector<double>> values(op.size());
  for (std::size_t k = 0; k < op.size(); ++k) {
    const double lambda =
        yosida_n ? yosida_scalar(*yosida_n, op.eigenvalue(k)) : op.eigenvalue(k);
    try {
      values[k] = solve_second_kind(weights, lambda, ones);
    } catch (const NumericError& e) {
      throw NumericError("build_resolvent: mode " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return ResolventTable(op, kernel, std::move(weights), yosida_n, std::move(values));
}

HVector apply_resolvent(const ResolventTable& table, std::size_t j, const HVector& v) {
  if (v.size() != table.modes()) throw ShapeError("apply_resolvent: dimension mismatch");
  if (j >= table.grid().size()) throw ShapeError("apply_resolvent: grid index out of range");
  HVector r(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) r[k] = table(k, j) * v[k];
  return r;
}

ResolventResidual resolvent_equation_residual(const ResolventTable& table, const HVector& v) {
  if (v.size() != table.modes()) throw ShapeError("resolvent residual: dimension mismatch");
  const TimeGrid& grid = table.grid();
  const bool has_coarse = grid.steps() % 2 == 0;
  std::optional<QuadratureWeights> coarse;
  if (has_coarse) coarse = build_weights(table.kernel(), grid.coarsened(2));

  // Residuals per grid point accumulate in H-norm over modes.
  std::vector<double> fine_sq(grid.size(), 0.0);
  std::vector<double> coarse_sq(has_coarse ? grid.steps() / 2 + 1 : 0, 0.0);
  for (std::size_t k = 0; k < table.modes(); ++k) {
    if (v[k] == 0.0) continue;
    const auto s = table.mode(k);
    const double lambda = table.effective_eigenvalue(k);
    const QuadratureWeights fine = table.weights().for_coefficient(lambda);
    const QuadratureWeights coarse_k = has_coarse ? coarse->for_coefficient(lambda) : fine;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double r = (s[j] - 1.0 - lambda * fine.apply_row(j, s)) * v[k];
      fine_sq[j] += r * r;
    }
    if (has_coarse) {
      std::vector<double> sub(coarse_sq.size());
      for (std::size_t j = 0; j < sub.size(); ++j) sub[j] = s[2 * j];
      for (std::size_t j = 0; j < sub.size(); ++j) {
        const double r = (sub[j] - 1.0 - lambda * coarse_k.apply_row(j, sub)) * v[k];
        coarse_sq[j] += r * r;
      }
    }
  }
  ResolventResidual out;
  for (double x : fine_sq) out.max_residual = std::max(out.max_residual, std::sqrt(x));
  if (has_coarse) {
    for (double x : coarse_sq) out.coarse_residual = std::max(out.coarse_residual, std::sqrt(x));
  } else {
    out.coarse_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double commutation_check(const ResolventTable& table, const SpectralOperator& op,
                         const HVector& v) {
  if (op.size() != table.modes()) throw ShapeError("commutation_check: dimension mismatch");
  const HVector av = op.apply(v);
  double worst = 0.0;
  for (std::size_t j = 0; j < table.grid().size(); ++j) {
    const HVector lhs = op.apply(apply_resolvent(table, j, v));
    const HVector rhs = apply_resolvent(table, j, av);
    worst = std::max(worst, norm(lhs - rhs));
  }
  return worst;
}

ExponentialBound exponential_bound_fit(const ResolventTable& table) {
  const TimeGrid& grid = table.grid();
  std::vector<double> envelope(grid.size(), 0.0);
  for (std::size_t k = 0; k < table.modes(); ++k) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      envelope[j] = std::max(envelope[j], std::abs(table(k, j)));
    }
  }
  ExponentialBound bound;
  bound.M = std::max(1.0, envelope[0]);
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const double ratio = envelope[j] / bound.M;
    if (ratio <= 1.0 + 1e-12) continue;
    bound.omega = std::max(bound.omega, std::log(ratio) / grid.t(j));
  }
  return bound;
}

std::vector<double> yosida_resolvent_convergence(const SpectralOperator& op, const Kernel& kernel,
                                                 const TimeGrid& grid, const HVector& v,
                                                 std::span<const long> n_list) {
  if (v.size() != op.size()) throw ShapeError("yosida_resolvent_convergence: dimension mismatch");
  const ResolventTable exact = build_resolvent(op, kernel, grid);
  std::vector<double> errors;
  errors.reserve(n_list.size());
  for (long n : n_list) {
    const ResolventTable approx = build_resolvent(op, kernel, grid, n);
    double worst = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < op.size(); ++k) {
        const double d = (approx(k, j) - exact(k, j)) * v[k];
        sq += d * d;
      }
      worst = std::max(worst, std::sqrt(sq));
    }
    errors.push_back(worst);
  }
  return errors;
}

}  // namespace svolterra
