#pragma once

#include <span>
#include <string>
#include <vector>

#include "svolterra/kernels.hpp"
#include "svolterra/time_grid.hpp"

namespace svolterra {

/// Product-integration (generalized trapezoidal) weights for
///   (a * x)(t_j) = int_0^{t_j} a(t_j - tau) x(tau) dtau ~ sum_i w[j][i] x(t_i),
/// with x linear between grid points and a integrated exactly.
///
/// On a uniform grid the weights are Toeplitz except for the first column:
///   w[j][0] = B[j],  w[j][i] = c[j - i]  (0 < i <= j),
/// with the per-lag moments
///   M0[m] = int_{(m-1)dt}^{m dt} a(u) du,
///   B[m]  = int_{(m-1)dt}^{m dt} a(u) (u - (m-1)dt) / dt du,
///   c[0] = M0[1] - B[1],  c[d] = B[d] + M0[d+1] - B[d+1].
///
/// Fractional kernels with alpha < 1 also carry starting weights on the
/// first q columns, chosen so each row integrates 1, t^{k alpha} (k alpha < 1)
/// and t exactly. Rows j < q - 1 therefore reach ahead of the diagonal.
/// Stiff decaying problems use a different rule, see for_coefficient.
class QuadratureWeights {
 public:
  QuadratureWeights(TimeGrid grid, std::vector<double> moment0, std::vector<double> moment1,
                    std::string kernel_label);

  const TimeGrid& grid() const { return grid_; }
  const std::string& kernel_label() const { return kernel_label_; }

  /// w[j][i]; zero on row 0 and above the diagonal outside the starting block.
  double operator()(std::size_t j, std::size_t i) const;
  /// Toeplitz diagonal c[0]; rows inside the starting block add their own
  /// correction, see operator()(j, j).
  double diagonal() const { return lag_[0]; }
  std::size_t starting_columns() const { return start_cols_; }
  /// int_0^{t_j} a, the exact row sum.
  double row_sum(std::size_t j) const { return cumulative_[j]; }

  /// sum_i w[j][i] x_i for one row.
  double apply_row(std::size_t j, std::span<const double> x) const;
  /// All rows at once, O(steps^2).
  std::vector<double> apply(std::span<const double> x) const;

  /// The rule solve_second_kind uses for coefficient lambda. When lambda < 0
  /// and -lambda w[1][0] > 1 the trapezoidal first step would change sign, so
  /// the right-endpoint product rectangle w[j][i] = M0[j - i + 1] is returned
  /// instead; otherwise these weights.
  QuadratureWeights for_coefficient(double lambda) const;

  /// Installs corrections: table[j * cols + i] is added to w[j][i] for i < cols.
  void set_starting_weights(std::size_t cols, std::vector<double> table);

 private:
  TimeGrid grid_;
  std::vector<double> first_;  // B[m], m = 0..steps (B[0] unused)
  std::vector<double> lag_;    // c[d], d = 0..steps-1
  std::vector<double> cumulative_;
  std::size_t start_cols_ = 0;
  std::vector<double> start_;
  std::string kernel_label_;
};

/// Weights for the kernel itself.
QuadratureWeights build_weights(const Kernel& kernel, const TimeGrid& grid);
/// Weights for the derivative kernel da/dt; requires kernel.differentiable().
QuadratureWeights build_derivative_weights(const Kernel& kernel, const TimeGrid& grid);

/// Solves x_j = f_j + lambda * sum_i w[j][i] x_i, with w = weights.for_coefficient(lambda),
/// by forward substitution; the rows of a starting block are solved together first.
/// Throws NumericError when 1 - lambda * w[j][j] vanishes.
std::vector<double> solve_second_kind(const QuadratureWeights& weights, double lambda,
                                      std::span<const double> f);

/// Mittag-Leffler function E_alpha(z) = sum_k z^k / Gamma(alpha k + 1), alpha in (0, 2).
///
/// Uses the power series while its largest term stays moderate and, for
/// alpha < 1 and large negative z, the Laplace-type integral representation
/// of E_alpha(-x). Throws UnsupportedOperation outside these regimes.
double mittag_leffler(double alpha, double z);

}  // namespace svolterra
