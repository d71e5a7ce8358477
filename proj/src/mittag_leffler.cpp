#include <boost/math/quadrature/exp_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "svolterra/errors.hpp"
#include "svolterra/volterra_solver.hpp"

namespace svolterra {

namespace {

constexpr int kMaxTerms = 20000;

// log of the largest series term |z|^k / Gamma(alpha k + 1).
double log_peak_term(double alpha, double log_abs_z) {
  double best = 0.0;
  double previous = 0.0;
  for (int k = 1; k < kMaxTerms; ++k) {
    const double lt = k * log_abs_z - std::lgamma(alpha * k + 1.0);
    best = std::max(best, lt);
    if (lt < previous && lt < best - 40.0) break;
    previous = lt;
  }
  return best;
}

double series(double alpha, double z) {
  const double log_abs_z = std::log(std::abs(z));
  const bool negative = z < 0.0;
  // Neumaier-compensated summation.
  double sum = 1.0;
  double comp = 0.0;
  double peak = 0.0;
  for (int k = 1; k < kMaxTerms; ++k) {
    const double magnitude = std::exp(k * log_abs_z - std::lgamma(alpha * k + 1.0));
    const double term = (negative && (k % 2 == 1)) ? -magnitude : magnitude;
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
    peak = std::max(peak, magnitude);
    if (magnitude < peak && magnitude <= 1e-17 * std::abs(sum + comp)) return sum + comp;
    if (magnitude == 0.0) return sum + comp;
  }
  throw NumericError("mittag_leffler: power series did not converge");
}

// E_alpha(-x) = int_0^inf exp(-r t) K(r) dr, t = x^(1/alpha), for 0 < alpha < 1, with
// K(r) = sin(alpha pi) r^(alpha-1) / (pi (r^(2 alpha) + 2 r^alpha cos(alpha pi) + 1)).
double laplace_representation(double alpha, double x) {
  const double t = std::pow(x, 1.0 / alpha);
  const double s = std::sin(alpha * std::numbers::pi);
  const double c = std::cos(alpha * std::numbers::pi);
  // Substitute r = u / t so the exponential factor is e^{-u}.
  auto integrand = [&](double u) {
    if (u == 0.0) return 0.0;
    const double r = u / t;
    const double ra = std::pow(r, alpha);
    const double k = s * std::pow(r, alpha - 1.0) / (std::numbers::pi * (ra * ra + 2.0 * ra * c + 1.0));
    return std::exp(-u) * k / t;
  };
  boost::math::quadrature::exp_sinh<double> quad;
  double error = 0.0;
  const double value = quad.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(),
                                      1e-14, &error);
  if (!(error <= 1e-10 * std::max(1.0, std::abs(value)))) {
    throw NumericError("mittag_leffler: integral representation did not converge");
  }
  return value;
}

}  // namespace

double mittag_leffler(double alpha, double z) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw UnsupportedOperation("mittag_leffler: alpha must lie in (0, 2)");
  }
  if (!std::isfinite(z)) throw UnsupportedOperation("mittag_leffler: z must be finite");
  if (z == 0.0) return 1.0;
  if (alpha == 1.0) return std::exp(z);
  if (z > 0.0) return series(alpha, z);

  // Negative argument: alternating series loses about log10(peak) digits.
  const double peak = log_peak_term(alpha, std::log(-z));
  if (alpha < 1.0) {
    return peak <= std::log(1e1) ? series(alpha, z) : laplace_representation(alpha, -z);
  }
  if (peak <= std::log(1e8)) return series(alpha, z);
  throw UnsupportedOperation(
      "mittag_leffler: alpha in (1, 2) with large negative argument is not supported");
}

}  // namespace svolterra
