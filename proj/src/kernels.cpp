#include "svolterra/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "svolterra/csv.hpp"
#include "svolterra/errors.hpp"
#include "svolterra/volterra_solver.hpp"

namespace svolterra {

Kernel Kernel::fractional(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw DomainError("fractional kernel: alpha must lie in (0, 2)");
  }
  return Kernel(Kind::Fractional, alpha);
}

Kernel Kernel::exponential() { return Kernel(Kind::Exponential, 1.0); }

Kernel Kernel::tabulated(std::vector<double> times, std::vector<double> values) {
  if (times.size() != values.size()) throw ShapeError("tabulated kernel: column lengths differ");
  if (times.size() < 2) throw DomainError("tabulated kernel: need at least two samples");
  if (times.front() != 0.0) throw DomainError("tabulated kernel: grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw DomainError("tabulated kernel: grid must be strictly increasing");
    }
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("tabulated kernel: values must be finite");
  }
  Kernel k(Kind::Tabulated, 1.0);
  k.times_ = std::move(times);
  k.values_ = std::move(values);
  return k;
}

Kernel Kernel::load_csv(const std::filesystem::path& path) {
  const auto rows = csv::read_rows(path);
  if (rows.size() < 3) throw ConfigError(path.string() + ": need a header and two data rows");
  std::vector<double> t, a;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) {
      throw ConfigError(path.string() + ": row " + std::to_string(r + 1) + " must have 2 columns");
    }
    t.push_back(csv::parse_double(rows[r][0], path.string() + " t"));
    a.push_back(csv::parse_double(rows[r][1], path.string() + " a(t)"));
  }
  return tabulated(std::move(t), std::move(a));
}

double Kernel::a0() const {
  switch (kind_) {
    case Kind::Fractional:
      if (alpha_ < 1.0) return std::numeric_limits<double>::infinity();
      return alpha_ == 1.0 ? 1.0 : 0.0;
    case Kind::Exponential:
      return 1.0;
    case Kind::Tabulated:
      return values_.front();
  }
  return 0.0;
}

bool Kernel::differentiable() const { return std::isfinite(a0()); }

bool Kernel::singular_at_zero() const { return !std::isfinite(a0()); }

double Kernel::support_end() const {
  return kind_ == Kind::Tabulated ? times_.back() : std::numeric_limits<double>::infinity();
}

std::size_t Kernel::segment(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto idx = static_cast<std::size_t>(it - times_.begin());
  return std::clamp<std::size_t>(idx, 1, times_.size() - 1) - 1;
}

double Kernel::evaluate(double t) const {
  if (t < 0.0 || std::isnan(t)) throw DomainError("kernel: evaluation at negative time");
  switch (kind_) {
    case Kind::Fractional:
      if (t == 0.0) {
        if (alpha_ < 1.0) throw DomainError("kernel: fractional kernel with alpha < 1 is singular at 0");
        return a0();
      }
      return std::pow(t, alpha_ - 1.0) / std::tgamma(alpha_);
    case Kind::Exponential:
      return std::exp(-t);
    case Kind::Tabulated: {
      if (t > times_.back()) throw RangeError("kernel: t outside tabulated range");
      const std::size_t i = segment(t);
      const double theta = (t - times_[i]) / (times_[i + 1] - times_[i]);
      return values_[i] + theta * (values_[i + 1] - values_[i]);
    }
  }
  return 0.0;
}

double Kernel::evaluate_derivative(double t) const {
  if (!differentiable()) {
    throw UnsupportedOperation("kernel: " + label() + " has no locally integrable derivative");
  }
  if (t < 0.0 || std::isnan(t)) throw DomainError("kernel: evaluation at negative time");
  switch (kind_) {
    case Kind::Fractional:
      if (alpha_ == 1.0) return 0.0;
      if (t == 0.0) throw DomainError("kernel: derivative of fractional kernel is singular at 0");
      return (alpha_ - 1.0) * std::pow(t, alpha_ - 2.0) / std::tgamma(alpha_);
    case Kind::Exponential:
      return -std::exp(-t);
    case Kind::Tabulated: {
      if (t > times_.back()) throw RangeError("kernel: t outside tabulated range");
      const std::size_t i = segment(t);
      return (values_[i + 1] - values_[i]) / (times_[i + 1] - times_[i]);
    }
  }
  return 0.0;
}

std::string Kernel::label() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Fractional:
      os << "fractional(alpha=" << alpha_ << ")";
      break;
    case Kind::Exponential:
      os << "exponential";
      break;
    case Kind::Tabulated:
      os << "tabulated(" << times_.size() << " points)";
      break;
  }
  return os.str();
}

namespace {

// a^{*k}(t) = t^{k alpha - 1} / Gamma(k alpha) for the fractional kernel.
double fractional_power(double alpha, int k, double t) {
  const double order = k * alpha;
  if (t == 0.0) {
    if (std::abs(order - 1.0) < 1e-12) return 1.0;
    return order > 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::pow(t, order - 1.0) / std::tgamma(order);
}

std::vector<double> solve_annotated(const QuadratureWeights& w, double lambda,
                                    std::span<const double> f, const char* which) {
  try {
    return solve_second_kind(w, lambda, f);
  } catch (const NumericError& e) {
    std::ostringstream os;
    os << "complete positivity (" << which << "-equation) on grid [0, " << w.grid().t_end()
       << "], steps=" << w.grid().steps() << ", dt=" << w.grid().dt() << ": " << e.what();
    throw NumericError(os.str());
  }
}

}  // namespace

CompletePositivityReport check_complete_positivity(const Kernel& kernel, double mu,
                                                   const TimeGrid& grid,
                                                   const CompletePositivityOptions& options) {
  if (!(mu >= 0.0)) throw DomainError("complete positivity: mu must be >= 0");
  const QuadratureWeights weights = build_weights(kernel, grid);
  const std::size_t n = grid.size();

  CompletePositivityReport report;
  report.mu = mu;
  const std::vector<double> ones(n, 1.0);
  report.s_values = solve_annotated(weights, -mu, ones, "s");

  const double mu_r = options.r_without_mu ? 1.0 : mu;
  if (kernel.kind() == Kernel::Kind::Fractional) {
    // r = sum_{k=1}^{m} (-mu)^{k-1} a^{*k} + rho where rho + mu a*rho =
    // (-mu)^m a^{*(m+1)}; m is the least order making the right side bounded.
    const double alpha = kernel.alpha();
    int m = 0;
    while ((m + 1) * alpha < 1.0 - 1e-12) ++m;
    std::vector<double> f(n);
    for (std::size_t j = 0; j < n; ++j) {
      f[j] = std::pow(-mu_r, m) * fractional_power(alpha, m + 1, grid.t(j));
    }
    const std::vector<double> rho = solve_annotated(weights, -mu_r, f, "r");
    report.r_values.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == 0 && m >= 1) {
        report.r_values[0] = std::numeric_limits<double>::infinity();
        continue;
      }
      double explicit_part = 0.0;
      for (int k = 1; k <= m; ++k) {
        explicit_part += std::pow(-mu_r, k - 1) * fractional_power(alpha, k, grid.t(j));
      }
      report.r_values[j] = explicit_part + rho[j];
    }
  } else {
    std::vector<double> f(n);
    for (std::size_t j = 0; j < n; ++j) f[j] = kernel.evaluate(grid.t(j));
    report.r_values = solve_annotated(weights, -mu_r, f, "r");
  }

  report.min_s = *std::min_element(report.s_values.begin(), report.s_values.end());
  report.min_r = *std::min_element(report.r_values.begin(), report.r_values.end());
  report.nonneg = report.min_s >= -options.tolerance && report.min_r >= -options.tolerance;
  return report;
}

}  // namespace svolterra
