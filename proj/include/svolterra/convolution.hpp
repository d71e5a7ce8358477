#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "svolterra/resolvent.hpp"
#include "svolterra/stochastic.hpp"

namespace svolterra {

/// Monte Carlo ensemble of H-valued paths, values[p][j][k].
class TrajectorySet {
 public:
  TrajectorySet(TimeGrid grid, std::size_t dim, std::size_t paths, std::string label);

  const TimeGrid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  std::size_t paths() const { return paths_; }
  const std::string& label() const { return label_; }

  double& at(std::size_t p, std::size_t j, std::size_t k) {
    return values_[(p * grid_.size() + j) * dim_ + k];
  }
  double at(std::size_t p, std::size_t j, std::size_t k) const {
    return values_[(p * grid_.size() + j) * dim_ + k];
  }
  HVector state(std::size_t p, std::size_t j) const;

  /// Stores a per-mode path (values[k][j]) as path p.
  void set_path(std::size_t p, const std::vector<std::vector<double>>& by_mode);

  /// Trapezoidal int_0^T |X(t)|_H^2 dt for each path.
  std::vector<double> squared_norm_integrals() const;
  /// max over paths, grid points of |X - other|_H.
  double sup_distance(const TrajectorySet& other) const;

  /// Rows (path, t, mode, value).
  void write_csv(std::ostream& out) const;
  /// Rows (t, mean |X|^2, stderr).
  void write_summary_csv(std::ostream& out) const;

 private:
  TimeGrid grid_;
  std::size_t dim_;
  std::size_t paths_;
  std::string label_;
  std::vector<double> values_;
};

/// Discrete stochastic convolution per mode,
///   W_k(t_j) = sum_{l < j} s_k(t_j - t_l) g_k(t_l),
/// with g from forcing_increments(). Result is [k][j].
std::vector<std::vector<double>> convolve_modes(const ResolventTable& table,
                                                const std::vector<std::vector<double>>& forcing);

/// W^Psi(t) = sum_i int_0^t S(t - tau) Psi_i(tau) dW_i(tau) on the table grid,
/// left-point in Psi and in the resolvent lag. Single path.
TrajectorySet stochastic_convolution(const ResolventTable& table, const IntegrandSeries& psi,
                                     const WienerBundle& bundle);

/// W^Psi(t_j) only, O(steps) per mode.
HVector stochastic_convolution_at(const ResolventTable& table, const IntegrandSeries& psi,
                                  const WienerBundle& bundle, std::size_t j);

struct InterchangeResult {
  /// A W^Psi, computed by applying A after convolving.
  TrajectorySet applied;
  /// sup |A W^Psi - W^{A Psi}|_H.
  double discrepancy = 0.0;
};

/// Interchange of A with the stochastic convolution. Throws
/// PreconditionError if A Psi has an infinite tail bound and NumericError if
/// the two routes disagree by more than 1e-12.
InterchangeResult apply_A_to_convolution(const SpectralOperator& op, const ResolventTable& table,
                                         const IntegrandSeries& psi, const WienerBundle& bundle);

/// W_n^Psi with the resolvent of the Yosida approximation A_n, on the
/// bundle's grid.
TrajectorySet yosida_convolution(const SpectralOperator& op, const Kernel& kernel, long n,
                                 const IntegrandSeries& psi, const WienerBundle& bundle);

struct CauchyReport {
  TrajectorySet direct;
  TrajectorySet reformulated;
  TrajectorySet y;
  /// sup_j |W_direct - W_reformulated|_H.
  double sup_discrepancy = 0.0;
  /// Central-difference residual of Y' = cAY + F at interior points.
  double ode_residual = 0.0;
};

/// Cauchy-problem form of the stochastic convolution for kernels with finite
/// nonzero c = a(0):
///   Z(t)  = int_0^t exp(c (t - tau) A) [ Wt(tau) + c I(tau) ] dtau,
///   Wt(t) = int_0^t a'(t - s) W(s) ds,   I(t) = int_0^t Psi dW,
///   W(t)  = A Z(t) + I(t).
/// For c = 1, Z is the process Y with Y' = AY + Wt + I.
/// Throws UnsupportedOperation for singular or vanishing a(0).
CauchyReport cauchy_reformulation(const SpectralOperator& op, const Kernel& kernel,
                                  const IntegrandSeries& psi, const WienerBundle& bundle);

/// Deterministic check of Y' = cAY + g: builds Y from a smooth forcing
/// g(k, t) with the same exponential quadrature and returns the max interior
/// central-difference residual over modes (H-norm).
double cauchy_ode_residual(const SpectralOperator& op, const Kernel& kernel, const TimeGrid& grid,
                           const std::function<double(std::size_t, double)>& forcing);

struct RegularityReport {
  double max_jump = 0.0;
  /// Log-log slope of the root-mean-square modulus against the lag; NaN when
  /// the modulus vanishes or fewer than two lags are available.
  double holder_estimate = 0.0;
  std::vector<std::size_t> lags;
  std::vector<double> modulus;
};

RegularityReport regularity_probe(const TrajectorySet& trajectories);

}  // namespace svolterra
