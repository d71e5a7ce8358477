#include "svolterra/volterra_solver.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <functional>
#include <sstream>

#include "svolterra/errors.hpp"

namespace svolterra {

QuadratureWeights::QuadratureWeights(TimeGrid grid, std::vector<double> moment0,
                                     std::vector<double> moment1, std::string kernel_label)
    : grid_(grid), kernel_label_(std::move(kernel_label)) {
  const std::size_t n = grid_.steps();
  if (moment0.size() != n + 1 || moment1.size() != n + 1) {
    throw ShapeError("quadrature weights: moment arrays must have steps + 1 entries");
  }
  first_ = moment1;
  lag_.assign(n, 0.0);
  lag_[0] = moment0[1] - moment1[1];
  for (std::size_t d = 1; d < n; ++d) lag_[d] = moment1[d] + moment0[d + 1] - moment1[d + 1];
  cumulative_.assign(n + 1, 0.0);
  for (std::size_t m = 1; m <= n; ++m) cumulative_[m] = cumulative_[m - 1] + moment0[m];
}

double QuadratureWeights::operator()(std::size_t j, std::size_t i) const {
  if (j == 0) return 0.0;
  const double base = i > j ? 0.0 : (i == 0 ? first_[j] : lag_[j - i]);
  return i < start_cols_ ? base + start_[j * start_cols_ + i] : base;
}

double QuadratureWeights::apply_row(std::size_t j, std::span<const double> x) const {
  if (j == 0) return 0.0;
  double sum = first_[j] * x[0];
  const double* lag = lag_.data() + j;
  for (std::size_t i = 1; i <= j; ++i) sum += *(lag - i) * x[i];
  const double* corr = start_.data() + j * start_cols_;
  for (std::size_t i = 0; i < start_cols_; ++i) sum += corr[i] * x[i];
  return sum;
}

QuadratureWeights QuadratureWeights::for_coefficient(double lambda) const {
  const std::size_t n = grid_.steps();
  if (!(lambda < 0.0) || -lambda * first_[1] <= 1.0) return *this;
  // Stiff and decaying: right-endpoint product rectangle, w[j][i] = M0[j - i + 1].
  QuadratureWeights rect(*this);
  rect.start_cols_ = 0;
  rect.start_.clear();
  std::fill(rect.first_.begin(), rect.first_.end(), 0.0);
  for (std::size_t d = 0; d < n; ++d) rect.lag_[d] = cumulative_[d + 1] - cumulative_[d];
  return rect;
}

void QuadratureWeights::set_starting_weights(std::size_t cols, std::vector<double> table) {
  if (table.size() != cols * grid_.size()) {
    throw ShapeError("quadrature weights: starting table must have cols * (steps + 1) entries");
  }
  start_cols_ = cols;
  start_ = std::move(table);
}

std::vector<double> QuadratureWeights::apply(std::span<const double> x) const {
  if (x.size() != grid_.size()) throw ShapeError("quadrature weights: vector length != grid size");
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t j = 1; j < x.size(); ++j) y[j] = apply_row(j, x);
  return y;
}

namespace {

struct Moments {
  std::vector<double> m0;
  std::vector<double> m1;
};

// x^b - (x-1)^b without cancellation for large x.
double power_difference(double x, double b) {
  if (x == 1.0) return 1.0;
  return -std::pow(x, b) * std::expm1(b * std::log1p(-1.0 / x));
}

Moments fractional_moments(double alpha, const TimeGrid& grid) {
  const std::size_t n = grid.steps();
  Moments mo{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)};
  const double scale = std::pow(grid.dt(), alpha) / std::tgamma(alpha);
  for (std::size_t m = 1; m <= n; ++m) {
    const double x = static_cast<double>(m);
    const double d_alpha = power_difference(x, alpha);
    const double d_alpha1 = power_difference(x, alpha + 1.0);
    mo.m0[m] = scale * d_alpha / alpha;
    mo.m1[m] = scale * (d_alpha1 / (alpha + 1.0) - (x - 1.0) * d_alpha / alpha);
  }
  return mo;
}

// 1 - e^{-h}(1 + h), accurate for small h.
double exp_moment_factor(double h) {
  if (h > 0.5) return 1.0 - std::exp(-h) * (1.0 + h);
  double term = h;  // h^k / k!
  double sum = 0.0;
  for (int k = 2; k < 60; ++k) {
    term *= h / k;
    const double contrib = ((k % 2 == 0) ? 1.0 : -1.0) * (k - 1) * term;
    sum += contrib;
    if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

Moments exponential_moments(const TimeGrid& grid, double sign) {
  const std::size_t n = grid.steps();
  const double h = grid.dt();
  Moments mo{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)};
  const double f0 = -std::expm1(-h);
  const double f1 = exp_moment_factor(h) / h;
  for (std::size_t m = 1; m <= n; ++m) {
    const double decay = std::exp(-static_cast<double>(m - 1) * h);
    mo.m0[m] = sign * decay * f0;
    mo.m1[m] = sign * decay * f1;
  }
  return mo;
}

// Gauss-Legendre on every piece between kernel breakpoints; exact for
// piecewise-polynomial kernels of degree <= 6.
Moments tabulated_moments(const Kernel& kernel, const TimeGrid& grid,
                          const std::function<double(std::size_t, double)>& piece_fn) {
  const std::size_t n = grid.steps();
  const double h = grid.dt();
  if (grid.t_end() > kernel.support_end() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "quadrature weights: grid end " << grid.t_end() << " exceeds tabulated kernel range "
       << kernel.support_end();
    throw RangeError(os.str());
  }
  const auto times = kernel.table_times();
  Moments mo{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)};
  using Gauss = boost::math::quadrature::gauss<double, 4>;
  std::size_t seg = 0;
  for (std::size_t m = 1; m <= n; ++m) {
    const double lo = static_cast<double>(m - 1) * h;
    const double hi = std::min(static_cast<double>(m) * h, kernel.support_end());
    double a = lo;
    while (a < hi) {
      while (seg + 2 < times.size() && times[seg + 1] <= a) ++seg;
      const double b = std::min(hi, times[seg + 1]);
      if (b > a) {
        const std::size_t piece = seg;
        mo.m0[m] += Gauss::integrate([&](double u) { return piece_fn(piece, u); }, a, b);
        mo.m1[m] += Gauss::integrate(
            [&](double u) { return piece_fn(piece, u) * (u - lo) / h; }, a, b);
      }
      if (b >= hi) break;
      a = b;
    }
  }
  return mo;
}

Moments kernel_moments(const Kernel& kernel, const TimeGrid& grid, bool derivative) {
  switch (kernel.kind()) {
    case Kernel::Kind::Fractional:
      if (!derivative) return fractional_moments(kernel.alpha(), grid);
      if (kernel.alpha() == 1.0) {
        return {std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
      }
      // d/dt t^{a-1}/Gamma(a) = t^{(a-1)-1}/Gamma(a-1).
      return fractional_moments(kernel.alpha() - 1.0, grid);
    case Kernel::Kind::Exponential:
      return exponential_moments(grid, derivative ? -1.0 : 1.0);
    case Kernel::Kind::Tabulated: {
      const auto t = kernel.table_times();
      const auto v = kernel.table_values();
      if (derivative) {
        return tabulated_moments(kernel, grid, [&](std::size_t s, double) {
          return (v[s + 1] - v[s]) / (t[s + 1] - t[s]);
        });
      }
      return tabulated_moments(kernel, grid, [&](std::size_t s, double u) {
        return v[s] + (u - t[s]) / (t[s + 1] - t[s]) * (v[s + 1] - v[s]);
      });
    }
  }
  throw UnsupportedOperation("quadrature weights: unknown kernel kind");
}

// Dense solve with partial pivoting; sizes here are at most a handful.
std::vector<double> solve_small(std::vector<std::vector<double>> m, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    }
    std::swap(m[c], m[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t c = n; c-- > 0;) {
    double acc = b[c];
    for (std::size_t k = c + 1; k < n; ++k) acc -= m[c][k] * x[k];
    x[c] = acc / m[c][c];
  }
  return x;
}

constexpr std::size_t kMaxStartingPowers = 3;

// Starting weights for a(t) = t^{alpha-1}/Gamma(alpha), alpha < 1. The
// solutions of interest expand in t^{k alpha}; the piecewise-linear rule is
// only O(dt^{k alpha + alpha}) on the non-integer powers below one, so every
// row is corrected on columns 0..q-1 to integrate 1, t^{alpha}, ..., t
// exactly. Rows below q-1 reach ahead of the diagonal; the solver handles
// them as one block.
void add_fractional_starting_weights(QuadratureWeights& w, double alpha) {
  std::vector<double> powers{0.0};
  for (int k = 1; k * alpha < 1.0 && powers.size() <= kMaxStartingPowers; ++k) {
    const double g = k * alpha;
    if (std::abs(g - std::round(g)) > 1e-12) powers.push_back(g);
  }
  if (powers.size() == 1) return;
  powers.push_back(1.0);
  const std::size_t cols = powers.size();
  const TimeGrid& grid = w.grid();
  const std::size_t n = grid.steps();
  if (n + 1 < cols) return;
  const std::size_t rows = grid.size();
  // Unit-step weights; the corrections scale with dt^alpha.
  const TimeGrid unit_grid(static_cast<double>(n), n);
  const auto unit = fractional_moments(alpha, unit_grid);
  const QuadratureWeights base(unit_grid, unit.m0, unit.m1, "");
  const double scale = std::pow(grid.dt(), alpha);
  std::vector<std::vector<double>> node_pow(cols, std::vector<double>(rows, 0.0));
  std::vector<double> exact_coeff(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const double g = powers[c];
    for (std::size_t i = 0; i < rows; ++i) {
      node_pow[c][i] = (i == 0) ? (g == 0.0 ? 1.0 : 0.0) : std::pow(static_cast<double>(i), g);
    }
    exact_coeff[c] = std::tgamma(g + 1.0) / std::tgamma(g + 1.0 + alpha);
  }
  std::vector<std::vector<double>> mat(cols, std::vector<double>(cols));
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t k = 0; k < cols; ++k) mat[c][k] = node_pow[c][k];
  }
  std::vector<double> table(cols * rows, 0.0);
  for (std::size_t j = 1; j < rows; ++j) {
    std::vector<double> rhs(cols);
    for (std::size_t c = 0; c < cols; ++c) {
      long double quad = 0.0L;
      for (std::size_t i = 0; i <= j; ++i) quad += static_cast<long double>(base(j, i)) * node_pow[c][i];
      const long double exact =
          exact_coeff[c] * std::pow(static_cast<long double>(j), powers[c] + alpha);
      rhs[c] = static_cast<double>(exact - quad);
    }
    const auto corr = solve_small(mat, std::move(rhs));
    for (std::size_t k = 0; k < cols; ++k) table[j * cols + k] = scale * corr[k];
  }
  w.set_starting_weights(cols, std::move(table));
}

}  // namespace

QuadratureWeights build_weights(const Kernel& kernel, const TimeGrid& grid) {
  auto mo = kernel_moments(kernel, grid, false);
  QuadratureWeights w(grid, std::move(mo.m0), std::move(mo.m1), kernel.label());
  if (kernel.kind() == Kernel::Kind::Fractional && kernel.alpha() < 1.0) {
    add_fractional_starting_weights(w, kernel.alpha());
  }
  return w;
}

QuadratureWeights build_derivative_weights(const Kernel& kernel, const TimeGrid& grid) {
  if (!kernel.differentiable()) {
    throw UnsupportedOperation("quadrature weights: " + kernel.label() +
                               " has no locally integrable derivative");
  }
  auto mo = kernel_moments(kernel, grid, true);
  return QuadratureWeights(grid, std::move(mo.m0), std::move(mo.m1), kernel.label() + "'");
}

std::vector<double> solve_second_kind(const QuadratureWeights& all_weights, double lambda,
                                      std::span<const double> f) {
  const QuadratureWeights weights = all_weights.for_coefficient(lambda);
  const TimeGrid& grid = weights.grid();
  if (f.size() != grid.size()) {
    throw ShapeError("solve_second_kind: right-hand side has " + std::to_string(f.size()) +
                     " entries, grid has " + std::to_string(grid.size()));
  }
  std::vector<double> x(f.size(), 0.0);
  x[0] = f[0];
  if (lambda == 0.0) {
    std::copy(f.begin(), f.end(), x.begin());
    return x;
  }
  auto singular = [&](std::size_t j, double pivot) {
    std::ostringstream os;
    os << "singular step at j=" << j << " (1 - lambda w_jj = " << pivot << ", lambda=" << lambda
       << ", dt=" << grid.dt() << "); use a finer grid";
    return NumericError(os.str());
  };
  // Rows 1..block-1 couple to the starting columns ahead of the diagonal.
  const std::size_t block = weights.starting_columns();
  std::size_t next = 1;
  if (block > 1) {
    const std::size_t m = block - 1;
    std::vector<std::vector<double>> mat(m, std::vector<double>(m));
    std::vector<double> rhs(m);
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t j = r + 1;
      for (std::size_t c = 0; c < m; ++c) mat[r][c] = (r == c ? 1.0 : 0.0) - lambda * weights(j, c + 1);
      rhs[r] = f[j] + lambda * weights(j, 0) * x[0];
    }
    const auto head = solve_small(std::move(mat), std::move(rhs));
    for (std::size_t r = 0; r < m; ++r) {
      if (!std::isfinite(head[r])) throw singular(r + 1, 0.0);
    }
    for (std::size_t r = 0; r < m; ++r) x[r + 1] = head[r];
    next = block;
  }
  if (next < x.size()) {
    const double pivot = 1.0 - lambda * weights(next, next);
    if (!(std::abs(pivot) > 1e-12)) throw singular(next, pivot);
    for (std::size_t j = next; j < x.size(); ++j) {
      // Row j without its diagonal term.
      double acc = weights(j, 0) * x[0];
      for (std::size_t i = 1; i < j; ++i) acc += weights(j, i) * x[i];
      x[j] = (f[j] + lambda * acc) / pivot;
    }
  }
  return x;
}

}  // namespace svolterra
