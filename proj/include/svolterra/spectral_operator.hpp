#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace svolterra {

/// Element of the truncated Hilbert space, in the operator's eigenbasis.
struct HVector {
  std::vector<double> coeffs;

  HVector() = default;
  explicit HVector(std::size_t dim) : coeffs(dim, 0.0) {}
  explicit HVector(std::vector<double> c) : coeffs(std::move(c)) {}

  std::size_t size() const { return coeffs.size(); }
  double& operator[](std::size_t k) { return coeffs[k]; }
  double operator[](std::size_t k) const { return coeffs[k]; }

  static HVector basis(std::size_t dim, std::size_t k);

  friend bool operator==(const HVector&, const HVector&) = default;
};

double dot(const HVector& u, const HVector& v);
/// |v|_H.
double norm(const HVector& v);
HVector operator-(const HVector& u, const HVector& v);
HVector operator+(const HVector& u, const HVector& v);
HVector operator*(double c, const HVector& v);

/// Diagonal generator A with eigenvalues sorted decreasingly
/// (lambda_1 closest to zero). All eigenvalues are bounded above, which is the
/// C0-semigroup generation condition in this representation.
class SpectralOperator {
 public:
  SpectralOperator(std::vector<double> eigenvalues, std::string description);

  /// lambda_k = -(k pi)^2, k = 1..modes.
  static SpectralOperator dirichlet_laplacian(std::size_t modes);
  /// A = 0 on a space of the given dimension.
  static SpectralOperator zero(std::size_t modes);
  /// One eigenvalue per row; a non-numeric first row is treated as a header.
  static SpectralOperator load_csv(const std::filesystem::path& path);

  std::size_t size() const { return eigenvalues_.size(); }
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  double eigenvalue(std::size_t k) const { return eigenvalues_[k]; }
  double max_eigenvalue() const { return eigenvalues_.front(); }
  const std::string& description() const { return description_; }

  /// Coordinate-wise multiplication by the eigenvalues.
  HVector apply(const HVector& v) const;
  /// (|v|^2 + |Av|^2)^(1/2).
  double graph_norm(const HVector& v) const;

 private:
  std::vector<double> eigenvalues_;
  std::string description_;
};

/// Eigenvalue of the Yosida approximation A_n = n^2 R(n, A) - n I on the
/// lambda-eigenvector: n lambda / (n - lambda). Requires n > lambda.
double yosida_scalar(long n, double lambda);
/// Eigenvalue of J_n = n R(n, A): n / (n - lambda). Requires n > lambda.
double j_scalar(long n, double lambda);
/// Eigenvalue exp(lambda t) of the semigroup generated by A.
double semigroup_scalar(double t, double lambda);

}  // namespace svolterra
