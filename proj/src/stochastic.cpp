#include "svolterra/stochastic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "svolterra/csv.hpp"
#include "svolterra/errors.hpp"
#include "svolterra/parallel.hpp"
#include "svolterra/rng.hpp"

namespace svolterra {

WienerBundle::WienerBundle(TimeGrid grid, std::size_t modes, std::uint64_t seed,
                           std::uint64_t path, std::vector<double> increments)
    : grid_(grid), modes_(modes), seed_(seed), path_(path), increments_(std::move(increments)) {
  if (modes_ < 1) throw PreconditionError("wiener bundle: modes must be >= 1");
  if (increments_.size() != modes_ * grid_.steps()) {
    throw ShapeError("wiener bundle: expected modes * steps increments");
  }
  paths_.assign(modes_ * grid_.size(), 0.0);
  for (std::size_t i = 0; i < modes_; ++i) {
    double w = 0.0;
    for (std::size_t j = 0; j < grid_.steps(); ++j) {
      w += increment(i, j);
      paths_[i * grid_.size() + j + 1] = w;
    }
  }
}

WienerBundle WienerBundle::aggregated(std::size_t factor) const {
  const TimeGrid coarse = grid_.coarsened(factor);
  std::vector<double> inc(modes_ * coarse.steps(), 0.0);
  for (std::size_t i = 0; i < modes_; ++i) {
    for (std::size_t j = 0; j < coarse.steps(); ++j) {
      double sum = 0.0;
      for (std::size_t l = 0; l < factor; ++l) sum += increment(i, j * factor + l);
      inc[i * coarse.steps() + j] = sum;
    }
  }
  return WienerBundle(coarse, modes_, seed_, path_, std::move(inc));
}

void WienerBundle::write_csv(std::ostream& out) const {
  out << "mode,step,increment\n";
  for (std::size_t i = 0; i < modes_; ++i) {
    for (std::size_t j = 0; j < grid_.steps(); ++j) {
      out << i << ',' << j << ',' << csv::format(increment(i, j)) << '\n';
    }
  }
}

WienerBundle WienerBundle::load_csv(const std::filesystem::path& file, const TimeGrid& grid,
                                    std::uint64_t seed, std::uint64_t path_index) {
  const auto rows = csv::read_rows(file);
  if (rows.empty()) throw ConfigError(file.string() + ": empty bundle file");
  std::size_t modes = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> by_mode;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 3) throw ConfigError(file.string() + ": rows need 3 columns");
    const auto mode = static_cast<std::size_t>(csv::parse_double(rows[r][0], "mode"));
    const auto step = static_cast<std::size_t>(csv::parse_double(rows[r][1], "step"));
    if (step >= grid.steps()) throw ShapeError(file.string() + ": step index beyond grid");
    if (mode >= by_mode.size()) by_mode.resize(mode + 1);
    by_mode[mode].emplace_back(step, csv::parse_double(rows[r][2], "increment"));
    modes = std::max(modes, mode + 1);
  }
  std::vector<double> inc(modes * grid.steps(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < modes; ++i) {
    for (const auto& [step, value] : by_mode[i]) inc[i * grid.steps() + step] = value;
  }
  for (double x : inc) {
    if (std::isnan(x)) throw ShapeError(file.string() + ": missing (mode, step) entries");
  }
  return WienerBundle(grid, modes, seed, path_index, std::move(inc));
}

WienerBundle sample_bundle(const TimeGrid& grid, std::size_t modes, std::uint64_t seed,
                           std::uint64_t path) {
  if (modes < 1) throw PreconditionError("sample_bundle: modes must be >= 1");
  const double scale = std::sqrt(grid.dt());
  std::vector<double> inc(modes * grid.steps());
  const std::size_t steps = grid.steps();
  for (std::size_t i = 0; i < modes; ++i) {
    double* row = inc.data() + i * steps;
    for (std::size_t j = 0; j < steps; j += 2) {
      const auto z = rng::standard_normal_pair(seed, path, static_cast<std::uint32_t>(i),
                                               static_cast<std::uint32_t>(j >> 1));
      row[j] = scale * z[0];
      if (j + 1 < steps) row[j + 1] = scale * z[1];
    }
  }
  return WienerBundle(grid, modes, seed, path, std::move(inc));
}

namespace {

std::vector<double> sqrt_all(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::sqrt(v[i]);
  return out;
}

}  // namespace

IntegrandSeries::IntegrandSeries(std::string name, std::size_t dim, std::size_t modes, Eval eval,
                                 SecondMoment second_moment, std::vector<double> tail_bound,
                                 bool deterministic)
    : name_(std::move(name)),
      dim_(dim),
      modes_(modes),
      eval_(std::move(eval)),
      second_moment_(std::move(second_moment)),
      tail_bound_(std::move(tail_bound)),
      deterministic_(deterministic) {
  if (dim_ < 1 || modes_ < 1) throw ShapeError("integrand: dim and modes must be >= 1");
  if (tail_bound_.size() != modes_) throw ShapeError("integrand: one tail bound per mode");
}

double IntegrandSeries::tail_total() const {
  double s = 0.0;
  for (double b : tail_bound_) s += b;
  return s;
}

IntegrandSeries IntegrandSeries::zero(std::size_t dim, std::size_t modes) {
  return IntegrandSeries(
      "zero", dim, modes, [](std::size_t, const IncrementPrefix&, std::span<double>) {},
      [](std::size_t, double) { return 0.0; }, std::vector<double>(modes, 0.0), true);
}

IntegrandSeries IntegrandSeries::unit(std::size_t dim, std::size_t k) {
  if (k >= dim) throw ShapeError("unit integrand: basis index out of range");
  return IntegrandSeries(
      "unit", dim, 1,
      [k](std::size_t, const IncrementPrefix&, std::span<double> out) { out[k] = 1.0; },
      [](std::size_t, double) { return 1.0; }, {1.0}, true);
}

IntegrandSeries IntegrandSeries::geometric(std::size_t dim, std::size_t modes) {
  std::vector<double> tail(modes);
  for (std::size_t i = 0; i < modes; ++i) tail[i] = std::pow(2.0, -static_cast<double>(i + 1));
  const std::vector<double> coeff = sqrt_all(tail);
  return IntegrandSeries(
      "geometric", dim, modes,
      [coeff](std::size_t i, const IncrementPrefix&, std::span<double> out) {
        out[0] = coeff[i];
      },
      [](std::size_t i, double) { return std::pow(2.0, -static_cast<double>(i + 1)); },
      std::move(tail), true);
}

IntegrandSeries IntegrandSeries::diagonal_decay(std::size_t dim, std::size_t modes, double decay) {
  std::vector<double> tail(modes);
  for (std::size_t i = 0; i < modes; ++i) tail[i] = std::pow(static_cast<double>(i + 1), -2.0 * decay);
  const std::vector<double> coeff = sqrt_all(tail);
  return IntegrandSeries(
      "diagonal-decay", dim, modes,
      [dim, coeff](std::size_t i, const IncrementPrefix&, std::span<double> out) {
        out[i % dim] = coeff[i];
      },
      [decay](std::size_t i, double) { return std::pow(static_cast<double>(i + 1), -2.0 * decay); },
      std::move(tail), true);
}

IntegrandSeries IntegrandSeries::smooth_time(std::size_t dim) {
  return IntegrandSeries(
      "smooth-time", dim, 1,
      [](std::size_t, const IncrementPrefix& h, std::span<double> out) {
        out[0] = std::cos(std::numbers::pi * h.time());
      },
      [](std::size_t, double t) {
        const double c = std::cos(std::numbers::pi * t);
        return c * c;
      },
      {1.0}, true);
}

IntegrandSeries IntegrandSeries::brownian_feedback(std::size_t dim) {
  if (dim < 2) throw ShapeError("brownian-feedback integrand needs dim >= 2");
  // sup_t E W_2(t)^2 = T is horizon dependent; the bound recorded here is per unit time.
  return IntegrandSeries(
      "brownian-feedback", dim, 2,
      [](std::size_t i, const IncrementPrefix& h, std::span<double> out) {
        if (i == 0) {
          out[0] = h.brownian(1);
        } else {
          out[1] = 1.0;
        }
      },
      [](std::size_t i, double t) { return i == 0 ? t : 1.0; }, {1.0, 1.0}, false);
}

IntegrandSeries IntegrandSeries::tabulated(const TimeGrid& grid,
                                           std::vector<std::vector<HVector>> values) {
  if (values.empty()) throw ShapeError("tabulated integrand: need at least one mode");
  const std::size_t dim = values.front().empty() ? 0 : values.front().front().size();
  std::vector<double> tail(values.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() != grid.steps()) {
      throw ShapeError("tabulated integrand: one value per grid step required");
    }
    for (const auto& v : values[i]) {
      if (v.size() != dim) throw ShapeError("tabulated integrand: inconsistent dimensions");
      tail[i] = std::max(tail[i], dot(v, v));
    }
  }
  auto shared = std::make_shared<const std::vector<std::vector<HVector>>>(std::move(values));
  const double dt = grid.dt();
  const std::size_t steps = grid.steps();
  auto lookup = [dt, steps](double t) {
    const auto j = static_cast<std::size_t>(std::floor(t / dt + 1e-9));
    return std::min(j, steps - 1);
  };
  return IntegrandSeries(
      "tabulated", dim, shared->size(),
      [shared, lookup](std::size_t i, const IncrementPrefix& h, std::span<double> out) {
        const HVector& v = (*shared)[i][lookup(h.time())];
        std::copy(v.coeffs.begin(), v.coeffs.end(), out.begin());
      },
      [shared, lookup](std::size_t i, double t) {
        const HVector& v = (*shared)[i][lookup(t)];
        return dot(v, v);
      },
      std::move(tail), true);
}

IntegrandSeries IntegrandSeries::scaled(double c) const {
  std::vector<double> tail(tail_bound_);
  for (double& b : tail) b *= c * c;
  auto inner = eval_;
  auto moment = second_moment_;
  return IntegrandSeries(
      name_ + "*c", dim_, modes_,
      [inner, c](std::size_t i, const IncrementPrefix& h, std::span<double> out) {
        inner(i, h, out);
        for (double& x : out) x *= c;
      },
      [moment, c](std::size_t i, double t) { return c * c * moment(i, t); }, std::move(tail),
      deterministic_);
}

IntegrandSeries IntegrandSeries::applied(const SpectralOperator& op) const {
  if (op.size() != dim_) throw ShapeError("integrand: operator dimension mismatch");
  std::vector<double> lambdas(op.eigenvalues().begin(), op.eigenvalues().end());
  double max_sq = 0.0;
  for (double l : lambdas) max_sq = std::max(max_sq, l * l);
  std::vector<double> tail(tail_bound_);
  for (double& b : tail) b *= max_sq;
  auto inner = eval_;
  auto moment = second_moment_;
  const std::size_t dim = dim_;
  const std::size_t modes = modes_;
  const bool det = deterministic_;
  // Deterministic integrands ignore the noise history, so E|A Psi_i(t)|^2 is
  // evaluated directly; for random ones only the operator-norm bound is known.
  SecondMoment applied_moment = [inner, lambdas, dim, modes, det, moment, max_sq](std::size_t i,
                                                                                 double t) {
    if (!det) return max_sq * moment(i, t);
    const bool at_origin = t <= 0.0;
    const TimeGrid g(at_origin ? 1.0 : t, 1);
    const WienerBundle quiet(g, modes, 0, 0, std::vector<double>(modes, 0.0));
    std::vector<double> value(dim, 0.0);
    inner(i, IncrementPrefix(quiet, at_origin ? 0 : 1), value);
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) s += lambdas[k] * lambdas[k] * value[k] * value[k];
    return s;
  };
  return IntegrandSeries(
      "A(" + name_ + ")", dim_, modes_,
      [inner, lambdas](std::size_t i, const IncrementPrefix& h, std::span<double> out) {
        inner(i, h, out);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] *= lambdas[k];
      },
      std::move(applied_moment), std::move(tail), deterministic_);
}

std::vector<std::vector<double>> forcing_increments(const IntegrandSeries& psi,
                                                    const WienerBundle& bundle) {
  if (psi.modes() > bundle.modes()) {
    throw ShapeError("integrand has " + std::to_string(psi.modes()) + " noise modes, bundle has " +
                     std::to_string(bundle.modes()));
  }
  const std::size_t steps = bundle.grid().steps();
  std::vector<std::vector<double>> g(psi.dim(), std::vector<double>(steps, 0.0));
  std::vector<double> value(psi.dim());
  for (std::size_t j = 0; j < steps; ++j) {
    const IncrementPrefix history(bundle, j);
    for (std::size_t i = 0; i < psi.modes(); ++i) {
      std::fill(value.begin(), value.end(), 0.0);
      psi.eval(i, history, value);
      const double dw = bundle.increment(i, j);
      for (std::size_t k = 0; k < psi.dim(); ++k) g[k][j] += value[k] * dw;
    }
  }
  return g;
}

HVector ito_integral(const IntegrandSeries& psi, const WienerBundle& bundle, std::size_t up_to) {
  if (up_to > bundle.grid().steps()) throw ShapeError("ito_integral: up_to beyond grid");
  if (psi.modes() > bundle.modes()) throw ShapeError("ito_integral: mode mismatch");
  HVector sum(psi.dim());
  std::vector<double> value(psi.dim());
  for (std::size_t j = 0; j < up_to; ++j) {
    const IncrementPrefix history(bundle, j);
    for (std::size_t i = 0; i < psi.modes(); ++i) {
      std::fill(value.begin(), value.end(), 0.0);
      psi.eval(i, history, value);
      const double dw = bundle.increment(i, j);
      for (std::size_t k = 0; k < psi.dim(); ++k) sum[k] += value[k] * dw;
    }
  }
  return sum;
}

std::vector<std::vector<double>> ito_path(const IntegrandSeries& psi, const WienerBundle& bundle) {
  const auto g = forcing_increments(psi, bundle);
  const std::size_t n = bundle.grid().size();
  std::vector<std::vector<double>> path(psi.dim(), std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < psi.dim(); ++k) {
    for (std::size_t j = 1; j < n; ++j) path[k][j] = path[k][j - 1] + g[k][j - 1];
  }
  return path;
}

namespace {

struct Moments2 {
  double sum = 0.0;
  double sum_sq = 0.0;
};

std::pair<double, double> mean_and_stderr(const Moments2& m, std::size_t n) {
  const double mean = m.sum / static_cast<double>(n);
  const double var = (m.sum_sq - m.sum * mean) / static_cast<double>(n - 1);
  return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(n))};
}

}  // namespace

IsometryReport ito_isometry_test(const IntegrandSeries& psi, const TimeGrid& grid,
                                 std::size_t modes, std::size_t paths, std::uint64_t seed) {
  if (paths < 100) throw PreconditionError("ito_isometry_test: paths must be >= 100");
  if (psi.modes() > modes) throw ShapeError("ito_isometry_test: integrand needs more noise modes");
  const auto total = parallel::reduce_paths(
      paths, Moments2{},
      [&](std::size_t p, Moments2& acc) {
        const WienerBundle bundle = sample_bundle(grid, modes, seed, p);
        const HVector value = ito_integral(psi, bundle, grid.steps());
        const double sq = dot(value, value);
        acc.sum += sq;
        acc.sum_sq += sq * sq;
      },
      [](Moments2& into, const Moments2& from) {
        into.sum += from.sum;
        into.sum_sq += from.sum_sq;
      });
  IsometryReport report;
  std::tie(report.lhs, report.std_error) = mean_and_stderr(total, paths);
  for (std::size_t i = 0; i < psi.modes(); ++i) {
    for (std::size_t j = 0; j < grid.steps(); ++j) {
      report.rhs += psi.second_moment(i, grid.t(j)) * grid.dt();
    }
  }
  return report;
}

CrossReport cross_orthogonality_test(const IntegrandSeries& psi, const TimeGrid& grid,
                                     std::size_t i, std::size_t j, std::size_t paths,
                                     std::uint64_t seed) {
  if (i == j) throw PreconditionError("cross_orthogonality_test: modes must differ");
  if (i >= psi.modes() || j >= psi.modes()) {
    throw ShapeError("cross_orthogonality_test: mode index out of range");
  }
  if (paths < 2) throw PreconditionError("cross_orthogonality_test: need at least 2 paths");
  // Only modes i and j enter; streams are per mode, so the draws match a full bundle.
  const std::size_t modes = std::max(i, j) + 1;
  const auto total = parallel::reduce_paths(
      paths, Moments2{},
      [&](std::size_t p, Moments2& acc) {
        const WienerBundle bundle = sample_bundle(grid, modes, seed, p);
        HVector int_i(psi.dim()), int_j(psi.dim());
        std::vector<double> value(psi.dim());
        for (std::size_t l = 0; l < grid.steps(); ++l) {
          const IncrementPrefix history(bundle, l);
          std::fill(value.begin(), value.end(), 0.0);
          psi.eval(i, history, value);
          for (std::size_t k = 0; k < psi.dim(); ++k) int_i[k] += value[k] * bundle.increment(i, l);
          std::fill(value.begin(), value.end(), 0.0);
          psi.eval(j, history, value);
          for (std::size_t k = 0; k < psi.dim(); ++k) int_j[k] += value[k] * bundle.increment(j, l);
        }
        const double x = dot(int_i, int_j);
        acc.sum += x;
        acc.sum_sq += x * x;
      },
      [](Moments2& into, const Moments2& from) {
        into.sum += from.sum;
        into.sum_sq += from.sum_sq;
      });
  CrossReport report;
  std::tie(report.estimate, report.std_error) = mean_and_stderr(total, paths);
  return report;
}

double riemann_refinement_gap(const IntegrandSeries& psi, const TimeGrid& fine, std::size_t modes,
                              std::size_t paths, std::uint64_t seed) {
  const auto total = parallel::reduce_paths(
      paths, 0.0,
      [&](std::size_t p, double& acc) {
        const WienerBundle bundle = sample_bundle(fine, modes, seed, p);
        const WienerBundle coarse = bundle.aggregated(2);
        const HVector d = ito_integral(psi, bundle, fine.steps()) -
                          ito_integral(psi, coarse, coarse.grid().steps());
        acc += dot(d, d);
      },
      [](double& into, double from) { into += from; });
  return std::sqrt(total / static_cast<double>(paths));
}

}  // namespace svolterra
