#pragma once

#include <cstddef>

namespace svolterra {

/// Uniform lattice t_j = j * dt on [0, t_end], j = 0..steps.
class TimeGrid {
 public:
  TimeGrid(double t_end, std::size_t steps);

  double t_end() const { return t_end_; }
  std::size_t steps() const { return steps_; }
  /// Number of lattice points, steps + 1.
  std::size_t size() const { return steps_ + 1; }
  double dt() const { return t_end_ / static_cast<double>(steps_); }
  double t(std::size_t j) const { return static_cast<double>(j) * dt(); }

  /// Grid with steps * factor steps on the same interval.
  TimeGrid refined(std::size_t factor) const;
  /// Grid with steps / factor steps; steps must be divisible by factor.
  TimeGrid coarsened(std::size_t factor) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t_end_;
  std::size_t steps_;
};

}  // namespace svolterra
