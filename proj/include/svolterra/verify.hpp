#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svolterra/convolution.hpp"

namespace svolterra {

struct VerificationReport {
  std::string name;
  TimeGrid grid{1.0, 1};
  std::size_t paths = 0;
  /// Mean over paths of sup_t |residual|.
  double residual_sup_mean = 0.0;
  std::vector<double> residual_sup_per_path;
  /// Observed orders between consecutive refinement levels, coarse to fine.
  std::optional<std::vector<double>> refinement_rates;
  /// Residual means per level, coarse to fine (refinement studies only).
  std::vector<double> level_residuals;
  std::vector<double> level_dt;
  /// Largest strong-solution integrability witness int_0^T |a(T-tau) A X(tau)| dtau.
  double integrability_witness = 0.0;
  double tolerance_used = 0.0;
  /// Required observed order; zero when no refinement was performed.
  double min_rate = 0.0;
  bool pass = false;
};

/// Residual of W = a * (A W) + int Psi dW with W the discrete stochastic
/// convolution; one bundle per path, all on the same grid.
VerificationReport strong_solution_residual(const SpectralOperator& op, const Kernel& kernel,
                                            const IntegrandSeries& psi,
                                            std::span<const WienerBundle> bundles,
                                            double tolerance);

/// Residual of <X, xi> = <a * X, A xi> + <int Psi dW, xi> for X = W^Psi.
VerificationReport weak_solution_residual(const SpectralOperator& op, const Kernel& kernel,
                                          const IntegrandSeries& psi,
                                          std::span<const WienerBundle> bundles,
                                          const HVector& xi, double tolerance);

/// max_{k, j} |weak residual with xi = e_k - k-th coordinate of the strong residual|.
double weak_strong_consistency(const SpectralOperator& op, const Kernel& kernel,
                               const IntegrandSeries& psi, const WienerBundle& bundle);

/// The mild formula satisfies the weak identity: weak residuals of W^Psi over
/// every basis vector xi = e_k, sup taken over k.
VerificationReport mild_weak_equivalence_check(const SpectralOperator& op, const Kernel& kernel,
                                               const IntegrandSeries& psi,
                                               std::span<const WienerBundle> bundles,
                                               double tolerance);

struct EnsembleSpec {
  std::size_t modes = 1;
  std::uint64_t seed = 42;
  std::size_t paths = 256;
};

/// Bundles for paths 0..paths-1.
std::vector<WienerBundle> sample_ensemble(const TimeGrid& grid, const EnsembleSpec& ensemble);

using ResidualSuite = std::function<VerificationReport(std::span<const WienerBundle>)>;

/// Runs `suite` on grids coarse_steps * factor^l, l = 0..levels-1, using
/// bundles sampled on the finest grid and aggregated down. The returned
/// report is the finest level with rates filled in; it passes when every
/// observed order is >= min_rate, and its tolerance is the finest residual
/// that order predicts from the previous level.
VerificationReport refinement_study(const std::string& name, const ResidualSuite& suite,
                                    double t_end, std::size_t coarse_steps, std::size_t levels,
                                    std::size_t factor, const EnsembleSpec& ensemble,
                                    double min_rate);

struct YosidaSuiteReport {
  std::vector<long> n_list;
  /// sup_t mean |W_n - W|^2.
  std::vector<double> e1;
  /// sup_t mean |A_n W_n - A W|^2.
  std::vector<double> e2;
  /// sup_t mean N_{n,1}^2, N_{n,1} = |J_n [(S_n - S) * A Psi]|.
  std::vector<double> n1_sq;
  /// sup_t mean N_{n,2}^2, N_{n,2} = |(A_n - A) W|.
  std::vector<double> n2_sq;
  /// e2 <= 3 (n1_sq + n2_sq) per n.
  std::vector<bool> split_bound_holds;
  /// min over t of 3 mean(N1^2 + N2^2) - mean|A_n W_n - AW|^2; the split holds
  /// pointwise in t when this is >= 0.
  std::vector<double> split_margin;
  /// max |N_{n,1} via J_n - |A_n W_n - A_n W|| over paths and t.
  double n1_route_discrepancy = 0.0;
  /// sup_t |W_n - W|_H per path and n: [n][p].
  std::vector<std::vector<double>> pathwise_sup;
  bool e1_decreasing = false;
  bool e2_decreasing = false;
  bool pathwise_decreasing = false;
  std::size_t paths = 0;
};

YosidaSuiteReport yosida_strong_convergence_suite(const SpectralOperator& op,
                                                  const Kernel& kernel, const TimeGrid& grid,
                                                  const IntegrandSeries& psi,
                                                  const EnsembleSpec& ensemble,
                                                  std::span<const long> n_list);

}  // namespace svolterra
