#pragma once

// Riemannian geometry of symmetric positive definite matrices.
//
// Every spectral function (log, exp, square roots) goes through one
// symmetric eigendecomposition; inputs are symmetrized before decomposing.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hgd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class SymMatrix {
 public:
  SymMatrix() = default;
  // Throws NotSymmetric when |a_ij - a_ji| exceeds 1e-12 (scaled by the
  // largest entry when that exceeds one).
  explicit SymMatrix(Matrix data);
  // Averages with the transpose instead of checking.
  static SymMatrix symmetrized(const Matrix& data);

  const Matrix& data() const noexcept { return data_; }
  Eigen::Index dim() const noexcept { return data_.rows(); }

 private:
  struct Trusted {};
  SymMatrix(Matrix data, Trusted) : data_(std::move(data)) {}
  Matrix data_;
};

class SpdMatrix {
 public:
  SpdMatrix() = default;
  // Validates symmetry and a strictly positive spectrum.
  explicit SpdMatrix(Matrix data);
  // Skips the eigenvalue check; only for values produced by this library
  // whose positivity follows by construction (expm, congruences).
  static SpdMatrix trusted(Matrix data);

  const Matrix& data() const noexcept { return data_; }
  Eigen::Index dim() const noexcept { return data_.rows(); }

 private:
  Matrix data_;
};

class TangentVector {
 public:
  TangentVector() = default;
  // Throws BadLength unless data.size() == side*(side+1)/2.
  TangentVector(Vector data, Eigen::Index side);

  const Vector& data() const noexcept { return data_; }
  Eigen::Index side() const noexcept { return side_; }
  Eigen::Index size() const noexcept { return data_.size(); }

 private:
  Vector data_;
  Eigen::Index side_ = 0;
};

struct EigenDecomposition {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // columns, orthonormal
};

EigenDecomposition eigen_sym(const Matrix& x);

// Rebuilds U f(Diag(lambda)) U^T.
template <typename F>
Matrix spectral_apply(const EigenDecomposition& e, F&& f) {
  Vector mapped = e.eigenvalues.unaryExpr(f);
  return e.eigenvectors * mapped.asDiagonal() * e.eigenvectors.transpose();
}

SymMatrix logm(const SpdMatrix& x);
SpdMatrix expm(const SymMatrix& x);
SpdMatrix sqrtm(const SpdMatrix& x);
SpdMatrix inverse_sqrtm(const SpdMatrix& x);

double airm_distance(const SpdMatrix& x, const SpdMatrix& y);
double lerm_distance(const SpdMatrix& x, const SpdMatrix& y);

// |X|^{-1/d} X through the determinant. Throws Overflow when the
// determinant or its root leaves the finite positive range; use
// log_scale_normalize for large sides.
SpdMatrix scale_normalize(const SpdMatrix& x);
// log(X) - mean(ln lambda) I, without forming the determinant.
SymMatrix log_scale_normalize(const SpdMatrix& x);

// Layout: n diagonal entries in row order, then sqrt(2) times the strict
// upper triangle in row-major order. Persisted models depend on this order.
TangentVector half_vectorize(const SymMatrix& x);
SymMatrix half_unvectorize(const TangentVector& v);
// Recovers the side n from a length n(n+1)/2; throws BadLength otherwise.
Eigen::Index side_from_half_length(Eigen::Index length);

SpdMatrix log_euclidean_mean(std::span<const SpdMatrix> xs);

struct KarcherOptions {
  double step = 0.5;
  int max_iters = 50;
  double tol = 1e-7;
};

struct KarcherResult {
  SpdMatrix mean;
  // ||(1/N) sum log_M A_i||_F at the returned mean.
  double residual = 0.0;
  // Same quantity in whitened coordinates, ||(1/N) sum log(M^-1/2 A_i M^-1/2)||_F.
  double whitened_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Gradient descent M <- exp_M((step/N) sum log_M A_i), started from the
// log-Euclidean mean. Stops once both residuals drop below tol; on
// non-convergence the iterate with the smallest residual is returned.
KarcherResult karcher_mean(std::span<const SpdMatrix> xs, const KarcherOptions& opts = {});

// half_vectorize(log(M^{-1/2} X M^{-1/2})).
TangentVector tangent_at(const SpdMatrix& pole, const SpdMatrix& x);
// Same, with the pole's inverse square root precomputed.
TangentVector tangent_at_whitened(const Matrix& pole_inv_sqrt, const SpdMatrix& x);

struct LogEigenSplit {
  double alpha = 0.0;  // mean log-eigenvalue
  Vector residuals;    // ln lambda_i - alpha, eigenvalues descending
};

LogEigenSplit log_eigen_split(const SpdMatrix& x);

namespace detail {
// Raw-matrix variants used by the descriptor pipeline; they symmetrize the
// input and throw NonPositiveEigenvalue on a non-positive spectrum.
Matrix logm_raw(const Matrix& x);
Matrix log_scale_normalize_raw(const Matrix& x);
Vector half_vectorize_raw(const Matrix& x);
}  // namespace detail

}  // namespace hgd
