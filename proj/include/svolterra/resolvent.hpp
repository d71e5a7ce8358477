#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "svolterra/kernels.hpp"
#include "svolterra/spectral_operator.hpp"
#include "svolterra/volterra_solver.hpp"

namespace svolterra {

/// Per-mode scalar resolvents s_k(t_j) of
///   s(t) = 1 + lambda_eff int_0^t a(t - tau) s(tau) dtau,
/// representing S(t) (no Yosida parameter) or S_n(t) (lambda_eff = n lambda / (n - lambda)).
class ResolventTable {
 public:
  ResolventTable(const SpectralOperator& op, const Kernel& kernel, QuadratureWeights weights,
                 std::optional<long> yosida_n, std::vector<std::vector<double>> values);

  std::size_t modes() const { return values_.size(); }
  const TimeGrid& grid() const { return weights_.grid(); }
  const Kernel& kernel() const { return kernel_; }
  const QuadratureWeights& weights() const { return weights_; }
  std::optional<long> yosida_n() const { return yosida_n_; }

  /// Eigenvalue of A for mode k.
  double eigenvalue(std::size_t k) const { return eigenvalues_[k]; }
  /// Eigenvalue actually used in the scalar equation (A or A_n).
  double effective_eigenvalue(std::size_t k) const { return effective_[k]; }

  double operator()(std::size_t k, std::size_t j) const { return values_[k][j]; }
  std::span<const double> mode(std::size_t k) const { return values_[k]; }

  /// Columns t, mode_1, ..., mode_K.
  void write_csv(std::ostream& out) const;

 private:
  std::vector<double> eigenvalues_;
  std::vector<double> effective_;
  Kernel kernel_;
  QuadratureWeights weights_;
  std::optional<long> yosida_n_;
  std::vector<std::vector<double>> values_;
};

ResolventTable build_resolvent(const SpectralOperator& op, const Kernel& kernel,
                               const TimeGrid& grid, std::optional<long> yosida_n = std::nullopt);

/// S(t_j) v.
HVector apply_resolvent(const ResolventTable& table, std::size_t j, const HVector& v);

struct ResolventResidual {
  /// max_j |S(t_j)v - v - sum_i w[j][i] A_eff S(t_i) v|_H on the table grid.
  double max_residual = 0.0;
  /// Same identity on the 2x coarser subgrid with its own weights; measures
  /// discretization error rather than solver consistency. NaN if steps is odd.
  double coarse_residual = 0.0;
};

ResolventResidual resolvent_equation_residual(const ResolventTable& table, const HVector& v);

/// max_j |A S(t_j) v - S(t_j) A v|_H.
double commutation_check(const ResolventTable& table, const SpectralOperator& op,
                         const HVector& v);

struct ExponentialBound {
  double M = 1.0;
  double omega = 0.0;
};

/// Envelope fit max_k |s_k(t_j)| <= M exp(omega t_j) with M = max(1, |s(0)|)
/// and the least omega >= 0. Ratios within 1e-12 of the envelope count as no
/// growth.
ExponentialBound exponential_bound_fit(const ResolventTable& table);

/// sup_j |S_n(t_j) v - S(t_j) v|_H for every n in n_list.
std::vector<double> yosida_resolvent_convergence(const SpectralOperator& op, const Kernel& kernel,
                                                 const TimeGrid& grid, const HVector& v,
                                                 std::span<const long> n_list);

}  // namespace svolterra
