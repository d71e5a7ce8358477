#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "svolterra/time_grid.hpp"

namespace svolterra {

/// Scalar convolution kernel a(t) on [0, inf).
///
/// Three families are supported:
///   - Fractional(alpha): a(t) = t^(alpha-1) / Gamma(alpha), alpha in (0, 2).
///     Weakly singular at 0 when alpha < 1.
///   - Exponential: a(t) = exp(-t).
///   - Tabulated: piecewise-linear interpolation of (t_i, a_i) samples with
///     t_0 = 0 and strictly increasing abscissae.
///
/// Kernels are immutable values; every member function is const and
/// thread-safe.
class Kernel {
 public:
  enum class Kind { Fractional, Exponential, Tabulated };

  static Kernel fractional(double alpha);
  static Kernel exponential();
  static Kernel tabulated(std::vector<double> times, std::vector<double> values);
  /// Two-column CSV (t, a(t)) with a mandatory header row.
  static Kernel load_csv(const std::filesystem::path& path);

  Kind kind() const { return kind_; }
  /// Fractional order; only meaningful for Kind::Fractional.
  double alpha() const { return alpha_; }
  /// a(0); +infinity for fractional kernels with alpha < 1.
  double a0() const;
  /// True when the derivative exists and is locally integrable, which is
  /// exactly when a(0) is finite.
  bool differentiable() const;
  bool singular_at_zero() const;

  std::span<const double> table_times() const { return times_; }
  std::span<const double> table_values() const { return values_; }
  /// Largest t at which the kernel can be evaluated (infinite for closed forms).
  double support_end() const;

  /// a(t). Throws DomainError for t < 0 or for t = 0 on a singular kernel,
  /// RangeError outside a tabulated range.
  double evaluate(double t) const;
  /// da/dt. Throws UnsupportedOperation when !differentiable().
  double evaluate_derivative(double t) const;

  std::string label() const;

 private:
  Kernel(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}
  std::size_t segment(double t) const;

  Kind kind_;
  double alpha_ = 1.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

struct CompletePositivityOptions {
  /// Absolute tolerance for the nonnegativity test.
  double tolerance = 1e-8;
  /// Solve r + (a * r) = a, dropping mu from the r equation.
  bool r_without_mu = false;
};

struct CompletePositivityReport {
  double mu = 0.0;
  /// Solution of s + mu (a * s) = 1 on the grid.
  std::vector<double> s_values;
  /// Solution of r + mu (a * r) = a on the grid. r(0) is +inf for singular kernels.
  std::vector<double> r_values;
  double min_s = 0.0;
  double min_r = 0.0;
  bool nonneg = false;
};

/// Solves both complete-positivity equations on `grid` and checks that the
/// solutions stay above -tolerance.
CompletePositivityReport check_complete_positivity(const Kernel& kernel, double mu,
                                                   const TimeGrid& grid,
                                                   const CompletePositivityOptions& options = {});

}  // namespace svolterra
