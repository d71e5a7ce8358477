#include "svolterra/spectral_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "svolterra/csv.hpp"
#include "svolterra/errors.hpp"

namespace svolterra {

HVector HVector::basis(std::size_t dim, std::size_t k) {
  if (k >= dim) throw ShapeError("basis vector index out of range");
  HVector v(dim);
  v[k] = 1.0;
  return v;
}

namespace {
void require_same(const HVector& u, const HVector& v, const char* what) {
  if (u.size() != v.size()) {
    throw ShapeError(std::string(what) + ": dimension mismatch (" + std::to_string(u.size()) +
                     " vs " + std::to_string(v.size()) + ")");
  }
}
}  // namespace

double dot(const HVector& u, const HVector& v) {
  require_same(u, v, "dot");
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return s;
}

double norm(const HVector& v) { return std::sqrt(dot(v, v)); }

HVector operator-(const HVector& u, const HVector& v) {
  require_same(u, v, "subtract");
  HVector r(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) r[k] = u[k] - v[k];
  return r;
}

HVector operator+(const HVector& u, const HVector& v) {
  require_same(u, v, "add");
  HVector r(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) r[k] = u[k] + v[k];
  return r;
}

HVector operator*(double c, const HVector& v) {
  HVector r(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) r[k] = c * v[k];
  return r;
}

SpectralOperator::SpectralOperator(std::vector<double> eigenvalues, std::string description)
    : eigenvalues_(std::move(eigenvalues)), description_(std::move(description)) {
  if (eigenvalues_.empty()) throw ShapeError("spectral operator: need at least one eigenvalue");
  for (double l : eigenvalues_) {
    if (!std::isfinite(l)) throw DomainError("spectral operator: eigenvalues must be finite");
  }
  if (!std::is_sorted(eigenvalues_.begin(), eigenvalues_.end(), std::greater<>())) {
    throw DomainError("spectral operator: eigenvalues must be sorted in decreasing order");
  }
}

SpectralOperator SpectralOperator::dirichlet_laplacian(std::size_t modes) {
  std::vector<double> ev(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    const double kp = static_cast<double>(k + 1) * std::numbers::pi;
    ev[k] = -kp * kp;
  }
  return SpectralOperator(std::move(ev), "Dirichlet Laplacian on (0,1), lambda_k = -(k pi)^2");
}

SpectralOperator SpectralOperator::zero(std::size_t modes) {
  return SpectralOperator(std::vector<double>(modes, 0.0), "zero operator");
}

SpectralOperator SpectralOperator::load_csv(const std::filesystem::path& path) {
  const auto rows = csv::read_rows(path);
  std::vector<double> ev;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 1) {
      throw ConfigError(path.string() + ": row " + std::to_string(r + 1) + " must have 1 column");
    }
    try {
      ev.push_back(csv::parse_double(rows[r][0], path.string()));
    } catch (const ConfigError&) {
      if (r != 0) throw;
    }
  }
  return SpectralOperator(std::move(ev), "eigenvalues from " + path.filename().string());
}

HVector SpectralOperator::apply(const HVector& v) const {
  if (v.size() != size()) {
    throw ShapeError("spectral operator: vector has dimension " + std::to_string(v.size()) +
                     ", operator has " + std::to_string(size()));
  }
  HVector r(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) r[k] = eigenvalues_[k] * v[k];
  return r;
}

double SpectralOperator::graph_norm(const HVector& v) const {
  const HVector av = apply(v);
  return std::sqrt(dot(v, v) + dot(av, av));
}

namespace {
void require_resolvent_set(long n, double lambda) {
  if (n <= 0 || !(static_cast<double>(n) > lambda)) {
    std::ostringstream os;
    os << "n=" << n << " is not in the resolvent set (need n > 0 and n > lambda=" << lambda << ")";
    throw ResolventSetError(os.str());
  }
}
}  // namespace

double yosida_scalar(long n, double lambda) {
  require_resolvent_set(n, lambda);
  const double nd = static_cast<double>(n);
  return nd * lambda / (nd - lambda);
}

double j_scalar(long n, double lambda) {
  require_resolvent_set(n, lambda);
  const double nd = static_cast<double>(n);
  return nd / (nd - lambda);
}

double semigroup_scalar(double t, double lambda) {
  if (t < 0.0) throw DomainError("semigroup_scalar: t must be >= 0");
  return std::exp(lambda * t);
}

}  // namespace svolterra
