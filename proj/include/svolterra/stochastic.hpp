#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "svolterra/spectral_operator.hpp"
#include "svolterra/time_grid.hpp"

namespace svolterra {

/// Independent scalar Brownian increments dW_i(t_j) ~ N(0, dt), one row per
/// noise mode, for a single Monte Carlo path.
class WienerBundle {
 public:
  WienerBundle(TimeGrid grid, std::size_t modes, std::uint64_t seed, std::uint64_t path,
               std::vector<double> increments);

  const TimeGrid& grid() const { return grid_; }
  std::size_t modes() const { return modes_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t path() const { return path_; }

  double increment(std::size_t mode, std::size_t step) const {
    return increments_[mode * grid_.steps() + step];
  }
  std::span<const double> increments(std::size_t mode) const {
    return {increments_.data() + mode * grid_.steps(), grid_.steps()};
  }
  /// W_i(t_j) = sum_{l < j} dW_i(t_l).
  double brownian(std::size_t mode, std::size_t j) const { return paths_[mode * grid_.size() + j]; }

  /// Coarse bundle whose increments are sums of `factor` consecutive fine
  /// increments, so both describe the same Brownian path.
  WienerBundle aggregated(std::size_t factor) const;

  /// Rows (mode, step, increment).
  void write_csv(std::ostream& out) const;
  static WienerBundle load_csv(const std::filesystem::path& path, const TimeGrid& grid,
                               std::uint64_t seed = 0, std::uint64_t path_index = 0);

  friend bool operator==(const WienerBundle& a, const WienerBundle& b) {
    return a.grid_ == b.grid_ && a.modes_ == b.modes_ && a.increments_ == b.increments_;
  }

 private:
  TimeGrid grid_;
  std::size_t modes_;
  std::uint64_t seed_;
  std::uint64_t path_;
  std::vector<double> increments_;
  std::vector<double> paths_;
};

/// Reproducible bundle for (seed, path); modes >= 1.
WienerBundle sample_bundle(const TimeGrid& grid, std::size_t modes, std::uint64_t seed,
                           std::uint64_t path = 0);

/// Read-only view of the noise history strictly before step j. This is the
/// only information an integrand can see, which makes every integrand adapted.
class IncrementPrefix {
 public:
  IncrementPrefix(const WienerBundle& bundle, std::size_t step) : bundle_(&bundle), step_(step) {}

  std::size_t step() const { return step_; }
  double time() const { return bundle_->grid().t(step_); }
  std::size_t modes() const { return bundle_->modes(); }
  /// dW_i(t_l) for l < step.
  std::span<const double> increments(std::size_t mode) const {
    return bundle_->increments(mode).first(step_);
  }
  /// W_i(t_step).
  double brownian(std::size_t mode) const { return bundle_->brownian(mode, step_); }

 private:
  const WienerBundle* bundle_;
  std::size_t step_;
};

/// Truncated series Psi = (Psi_1, ..., Psi_I) of H-valued adapted integrands.
class IntegrandSeries {
 public:
  /// Writes Psi_i(t_j) into `out` (pre-zeroed, length dim).
  using Eval = std::function<void(std::size_t mode, const IncrementPrefix& history,
                                  std::span<double> out)>;
  /// E|Psi_i(t)|_H^2.
  using SecondMoment = std::function<double(std::size_t mode, double t)>;

  IntegrandSeries(std::string name, std::size_t dim, std::size_t modes, Eval eval,
                  SecondMoment second_moment, std::vector<double> tail_bound,
                  bool deterministic);

  /// Psi = 0.
  static IntegrandSeries zero(std::size_t dim, std::size_t modes = 1);
  /// One noise mode with Psi_1 = e_k.
  static IntegrandSeries unit(std::size_t dim, std::size_t k = 0);
  /// Psi_i = 2^(-i/2) e_1, i = 1..modes.
  static IntegrandSeries geometric(std::size_t dim, std::size_t modes);
  /// Psi_i = i^(-decay) e_i, i = 1..modes (basis index wraps modulo dim).
  static IntegrandSeries diagonal_decay(std::size_t dim, std::size_t modes, double decay);
  /// One noise mode with Psi_1(t) = cos(pi t) e_1.
  static IntegrandSeries smooth_time(std::size_t dim);
  /// Two noise modes: Psi_1(t) = W_2(t) e_1, Psi_2 = e_2 (random, adapted).
  static IntegrandSeries brownian_feedback(std::size_t dim);
  /// Deterministic piecewise-constant integrand. values[i][j] is Psi_i on
  /// [t_j, t_{j+1}) as an H-vector; the user declares it piecewise uniformly
  /// continuous.
  static IntegrandSeries tabulated(const TimeGrid& grid, std::vector<std::vector<HVector>> values);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  std::size_t modes() const { return modes_; }
  bool deterministic() const { return deterministic_; }
  std::span<const double> tail_bound() const { return tail_bound_; }
  /// Total mass of the tail bounds, sum_i sup_t E|Psi_i|^2.
  double tail_total() const;

  void eval(std::size_t mode, const IncrementPrefix& history, std::span<double> out) const {
    eval_(mode, history, out);
  }
  double second_moment(std::size_t mode, double t) const { return second_moment_(mode, t); }

  /// Psi_i -> c Psi_i.
  IntegrandSeries scaled(double c) const;
  /// Psi_i -> A Psi_i.
  IntegrandSeries applied(const SpectralOperator& op) const;

 private:
  std::string name_;
  std::size_t dim_;
  std::size_t modes_;
  Eval eval_;
  SecondMoment second_moment_;
  std::vector<double> tail_bound_;
  bool deterministic_;
};

/// g[k][j] = sum_i (Psi_i(t_j))_k dW_i(t_j), for j < steps. The left-point
/// Riemann-sum increments of the Ito integral, per space coordinate.
std::vector<std::vector<double>> forcing_increments(const IntegrandSeries& psi,
                                                    const WienerBundle& bundle);

/// sum_{i} sum_{j < up_to} Psi_i(t_j) dW_i(t_j).
HVector ito_integral(const IntegrandSeries& psi, const WienerBundle& bundle, std::size_t up_to);

/// Ito integral at every grid point, [k][j].
std::vector<std::vector<double>> ito_path(const IntegrandSeries& psi, const WienerBundle& bundle);

struct IsometryReport {
  double lhs = 0.0;     ///< Monte Carlo E|int Psi dW|^2
  double rhs = 0.0;     ///< left-point quadrature of sum_i E|Psi_i|^2
  double std_error = 0.0; ///< standard error of lhs
};

IsometryReport ito_isometry_test(const IntegrandSeries& psi, const TimeGrid& grid,
                                 std::size_t modes, std::size_t paths, std::uint64_t seed);

struct CrossReport {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo E<int Psi_i dW_i, int Psi_j dW_j>. Modes are 0-based; i != j.
CrossReport cross_orthogonality_test(const IntegrandSeries& psi, const TimeGrid& grid,
                                     std::size_t i, std::size_t j, std::size_t paths,
                                     std::uint64_t seed);

/// Root-mean-square difference between the Riemann sums on `fine` and on the
/// 2x coarser grid driven by the aggregated increments of the same bundles.
double riemann_refinement_gap(const IntegrandSeries& psi, const TimeGrid& fine, std::size_t modes,
                              std::size_t paths, std::uint64_t seed);

}  // namespace svolterra
