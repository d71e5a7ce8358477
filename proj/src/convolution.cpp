#include "svolterra/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "svolterra/csv.hpp"
#include "svolterra/errors.hpp"

namespace svolterra {

TrajectorySet::TrajectorySet(TimeGrid grid, std::size_t dim, std::size_t paths, std::string label)
    : grid_(grid), dim_(dim), paths_(paths), label_(std::move(label)) {
  values_.assign(paths_ * grid_.size() * dim_, 0.0);
}

HVector TrajectorySet::state(std::size_t p, std::size_t j) const {
  HVector v(dim_);
  for (std::size_t k = 0; k < dim_; ++k) v[k] = at(p, j, k);
  return v;
}

void TrajectorySet::set_path(std::size_t p, const std::vector<std::vector<double>>& by_mode) {
  if (p >= paths_) throw ShapeError("trajectory set: path index out of range");
  if (by_mode.size() != dim_) throw ShapeError("trajectory set: mode count mismatch");
  for (std::size_t k = 0; k < dim_; ++k) {
    if (by_mode[k].size() != grid_.size()) throw ShapeError("trajectory set: path length mismatch");
    for (std::size_t j = 0; j < grid_.size(); ++j) at(p, j, k) = by_mode[k][j];
  }
}

std::vector<double> TrajectorySet::squared_norm_integrals() const {
  std::vector<double> out(paths_, 0.0);
  const double dt = grid_.dt();
  for (std::size_t p = 0; p < paths_; ++p) {
    double prev = 0.0;
    double sum = 0.0;
    for (std::size_t j = 0; j < grid_.size(); ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) sq += at(p, j, k) * at(p, j, k);
      if (j > 0) sum += 0.5 * dt * (prev + sq);
      prev = sq;
    }
    out[p] = sum;
  }
  return out;
}

double TrajectorySet::sup_distance(const TrajectorySet& other) const {
  if (other.paths_ != paths_ || other.dim_ != dim_ || !(other.grid_ == grid_)) {
    throw ShapeError("trajectory set: shapes differ");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < values_.size(); i += dim_) {
    double sq = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double d = values_[i + k] - other.values_[i + k];
      sq += d * d;
    }
    worst = std::max(worst, std::sqrt(sq));
  }
  return worst;
}

void TrajectorySet::write_csv(std::ostream& out) const {
  out << "path,t,mode,value\n";
  for (std::size_t p = 0; p < paths_; ++p) {
    for (std::size_t j = 0; j < grid_.size(); ++j) {
      const std::string t = csv::format(grid_.t(j));
      for (std::size_t k = 0; k < dim_; ++k) {
        out << p << ',' << t << ',' << k + 1 << ',' << csv::format(at(p, j, k)) << '\n';
      }
    }
  }
}

void TrajectorySet::write_summary_csv(std::ostream& out) const {
  out << "t,mean_sq_norm,stderr\n";
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t p = 0; p < paths_; ++p) {
      double sq = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) sq += at(p, j, k) * at(p, j, k);
      sum += sq;
      sum_sq += sq * sq;
    }
    const double n = static_cast<double>(paths_);
    const double mean = sum / n;
    const double err =
        paths_ > 1 ? std::sqrt(std::max(sum_sq - sum * mean, 0.0) / (n - 1.0) / n) : 0.0;
    out << csv::format(grid_.t(j)) << ',' << csv::format(mean) << ',' << csv::format(err) << '\n';
  }
}

std::vector<std::vector<double>> convolve_modes(const ResolventTable& table,
                                                const std::vector<std::vector<double>>& forcing) {
  if (forcing.size() != table.modes()) throw ShapeError("convolve_modes: mode count mismatch");
  const std::size_t n = table.grid().size();
  std::vector<std::vector<double>> out(table.modes(), std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < table.modes(); ++k) {
    const auto s = table.mode(k);
    const auto& g = forcing[k];
    if (g.size() + 1 != n) throw ShapeError("convolve_modes: forcing length must equal steps");
    for (std::size_t j = 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < j; ++l) acc += s[j - l] * g[l];
      out[k][j] = acc;
    }
  }
  return out;
}

namespace {

void require_same_grid(const ResolventTable& table, const WienerBundle& bundle) {
  if (!(table.grid() == bundle.grid())) {
    throw ShapeError("stochastic convolution: resolvent and bundle grids differ");
  }
}

}  // namespace

TrajectorySet stochastic_convolution(const ResolventTable& table, const IntegrandSeries& psi,
                                     const WienerBundle& bundle) {
  require_same_grid(table, bundle);
  if (psi.dim() != table.modes()) throw ShapeError("stochastic convolution: dimension mismatch");
  TrajectorySet out(table.grid(), table.modes(), 1, "W^" + psi.name());
  out.set_path(0, convolve_modes(table, forcing_increments(psi, bundle)));
  return out;
}

HVector stochastic_convolution_at(const ResolventTable& table, const IntegrandSeries& psi,
                                  const WienerBundle& bundle, std::size_t j) {
  require_same_grid(table, bundle);
  if (psi.dim() != table.modes()) throw ShapeError("stochastic convolution: dimension mismatch");
  if (j >= table.grid().size()) throw ShapeError("stochastic convolution: index out of range");
  const auto g = forcing_increments(psi, bundle);
  HVector w(table.modes());
  for (std::size_t k = 0; k < table.modes(); ++k) {
    const auto s = table.mode(k);
    double acc = 0.0;
    for (std::size_t l = 0; l < j; ++l) acc += s[j - l] * g[k][l];
    w[k] = acc;
  }
  return w;
}

InterchangeResult apply_A_to_convolution(const SpectralOperator& op, const ResolventTable& table,
                                         const IntegrandSeries& psi, const WienerBundle& bundle) {
  if (op.size() != table.modes()) throw ShapeError("interchange: operator and table differ");
  const IntegrandSeries a_psi = psi.applied(op);
  if (!std::isfinite(a_psi.tail_total())) {
    throw PreconditionError("interchange: A Psi has an infinite tail bound");
  }
  TrajectorySet applied = stochastic_convolution(table, psi, bundle);
  for (std::size_t j = 0; j < applied.grid().size(); ++j) {
    for (std::size_t k = 0; k < op.size(); ++k) applied.at(0, j, k) *= op.eigenvalue(k);
  }
  const TrajectorySet other = stochastic_convolution(table, a_psi, bundle);
  const double discrepancy = applied.sup_distance(other);
  if (!(discrepancy <= 1e-12)) {
    throw NumericError("interchange: A W^Psi and W^{A Psi} differ by " +
                       csv::format(discrepancy));
  }
  return InterchangeResult{std::move(applied), discrepancy};
}

TrajectorySet yosida_convolution(const SpectralOperator& op, const Kernel& kernel, long n,
                                 const IntegrandSeries& psi, const WienerBundle& bundle) {
  const ResolventTable table = build_resolvent(op, kernel, bundle.grid(), n);
  TrajectorySet out = stochastic_convolution(table, psi, bundle);
  return out;
}

namespace {

struct PhiFunctions {
  double e;     // exp(z)
  double phi1;  // (e^z - 1) / z
  double phi2;  // (e^z - 1 - z) / z^2
};

PhiFunctions phi_functions(double z) {
  PhiFunctions f{std::exp(z), 0.0, 0.0};
  if (std::abs(z) < 1e-3) {
    f.phi1 = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    f.phi2 = 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
  } else {
    f.phi1 = std::expm1(z) / z;
    f.phi2 = (std::expm1(z) - z) / (z * z);
  }
  return f;
}

// Z' = mu Z + F, Z(0) = 0, with F linear between grid points.
std::vector<double> exponential_quadrature(double mu, double dt, std::span<const double> forcing) {
  const PhiFunctions f = phi_functions(mu * dt);
  std::vector<double> z(forcing.size(), 0.0);
  for (std::size_t j = 0; j + 1 < forcing.size(); ++j) {
    z[j + 1] = f.e * z[j] + dt * (forcing[j] * (f.phi1 - f.phi2) + forcing[j + 1] * f.phi2);
  }
  return z;
}

double cauchy_constant(const Kernel& kernel) {
  const double c = kernel.a0();
  if (!kernel.differentiable() || !std::isfinite(c)) {
    throw UnsupportedOperation("cauchy reformulation needs a finite a(0); kernel " +
                               kernel.label() + " is singular at 0");
  }
  if (c == 0.0) {
    throw UnsupportedOperation("cauchy reformulation needs a(0) != 0; kernel " + kernel.label() +
                               " vanishes at 0");
  }
  return c;
}

double interior_residual(const std::vector<std::vector<double>>& y,
                         const std::vector<std::vector<double>>& f,
                         std::span<const double> mu, double dt) {
  if (y.empty()) return 0.0;
  double worst = 0.0;
  const std::size_t n = y.front().size();
  for (std::size_t j = 1; j + 1 < n; ++j) {
    double sq = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double r = (y[k][j + 1] - y[k][j - 1]) / (2.0 * dt) - mu[k] * y[k][j] - f[k][j];
      sq += r * r;
    }
    worst = std::max(worst, std::sqrt(sq));
  }
  return worst;
}

}  // namespace

CauchyReport cauchy_reformulation(const SpectralOperator& op, const Kernel& kernel,
                                  const IntegrandSeries& psi, const WienerBundle& bundle) {
  const double c = cauchy_constant(kernel);
  const TimeGrid& grid = bundle.grid();
  const ResolventTable table = build_resolvent(op, kernel, grid);
  const QuadratureWeights derivative = build_derivative_weights(kernel, grid);
  TrajectorySet direct = stochastic_convolution(table, psi, bundle);
  const auto ito = ito_path(psi, bundle);

  const std::size_t dim = op.size();
  std::vector<std::vector<double>> y(dim), forcing(dim), w_ref(dim);
  std::vector<double> mu(dim);
  std::vector<double> w_direct(grid.size());
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t j = 0; j < grid.size(); ++j) w_direct[j] = direct.at(0, j, k);
    const std::vector<double> w_tilde = derivative.apply(w_direct);
    forcing[k].resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) forcing[k][j] = w_tilde[j] + c * ito[k][j];
    mu[k] = c * op.eigenvalue(k);
    y[k] = exponential_quadrature(mu[k], grid.dt(), forcing[k]);
    w_ref[k].resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      w_ref[k][j] = op.eigenvalue(k) * y[k][j] + ito[k][j];
    }
  }
  TrajectorySet reformulated(grid, dim, 1, "W_cauchy^" + psi.name());
  reformulated.set_path(0, w_ref);
  TrajectorySet y_set(grid, dim, 1, "Y^" + psi.name());
  y_set.set_path(0, y);
  CauchyReport report{std::move(direct), std::move(reformulated), std::move(y_set), 0.0, 0.0};
  report.sup_discrepancy = report.direct.sup_distance(report.reformulated);
  report.ode_residual = interior_residual(y, forcing, mu, grid.dt());
  return report;
}

double cauchy_ode_residual(const SpectralOperator& op, const Kernel& kernel, const TimeGrid& grid,
                           const std::function<double(std::size_t, double)>& forcing) {
  const double c = cauchy_constant(kernel);
  const std::size_t dim = op.size();
  std::vector<std::vector<double>> y(dim), f(dim);
  std::vector<double> mu(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    f[k].resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) f[k][j] = forcing(k, grid.t(j));
    mu[k] = c * op.eigenvalue(k);
    y[k] = exponential_quadrature(mu[k], grid.dt(), f[k]);
  }
  return interior_residual(y, f, mu, grid.dt());
}

RegularityReport regularity_probe(const TrajectorySet& trajectories) {
  const TimeGrid& grid = trajectories.grid();
  if (grid.size() < 2) throw ShapeError("regularity probe: need at least 2 grid points");
  RegularityReport report;
  const std::size_t dim = trajectories.dim();
  auto distance_sq = [&](std::size_t p, std::size_t j, std::size_t lag) {
    double sq = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = trajectories.at(p, j + lag, k) - trajectories.at(p, j, k);
      sq += d * d;
    }
    return sq;
  };
  for (std::size_t p = 0; p < trajectories.paths(); ++p) {
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
      report.max_jump = std::max(report.max_jump, std::sqrt(distance_sq(p, j, 1)));
    }
  }
  for (std::size_t lag = 1; lag <= 16 && lag < grid.size(); lag *= 2) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < trajectories.paths(); ++p) {
      for (std::size_t j = 0; j + lag < grid.size(); ++j) {
        sum += distance_sq(p, j, lag);
        ++count;
      }
    }
    report.lags.push_back(lag);
    report.modulus.push_back(count > 0 ? std::sqrt(sum / static_cast<double>(count)) : 0.0);
  }
  const bool degenerate =
      report.lags.size() < 2 ||
      std::any_of(report.modulus.begin(), report.modulus.end(), [](double m) { return !(m > 0.0); });
  if (degenerate) {
    report.holder_estimate = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(report.lags.size());
  for (std::size_t i = 0; i < report.lags.size(); ++i) {
    mx += std::log(static_cast<double>(report.lags[i]) * grid.dt());
    my += std::log(report.modulus[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < report.lags.size(); ++i) {
    const double dx = std::log(static_cast<double>(report.lags[i]) * grid.dt()) - mx;
    sxy += dx * (std::log(report.modulus[i]) - my);
    sxx += dx * dx;
  }
  report.holder_estimate = sxy / sxx;
  return report;
}

}  // namespace svolterra
