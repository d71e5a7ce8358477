#include "svolterra/time_grid.hpp"

#include <cmath>
#include <string>

#include "svolterra/errors.hpp"

namespace svolterra {

TimeGrid::TimeGrid(double t_end, std::size_t steps) : t_end_(t_end), steps_(steps) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw DomainError("time grid: t_end must be positive and finite, got " + std::to_string(t_end));
  }
  if (steps < 1) throw DomainError("time grid: steps must be >= 1");
}

TimeGrid TimeGrid::refined(std::size_t factor) const {
  if (factor < 1) throw DomainError("time grid: refinement factor must be >= 1");
  return TimeGrid(t_end_, steps_ * factor);
}

TimeGrid TimeGrid::coarsened(std::size_t factor) const {
  if (factor < 1 || steps_ % factor != 0) {
    throw ShapeError("time grid: " + std::to_string(steps_) + " steps not divisible by " +
                     std::to_string(factor));
  }
  return TimeGrid(t_end_, steps_ / factor);
}

}  // namespace svolterra
