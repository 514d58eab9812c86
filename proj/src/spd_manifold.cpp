#include "hgd/spd_manifold.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hgd/error.hpp"

namespace hgd {

namespace {

constexpr double kSymmetryTol = 1e-12;

void require_square(const Matrix& x, const char* what) {
  if (x.rows() != x.cols()) {
    fail(ErrorCode::DimensionMismatch, std::string(what) + ": matrix is not square");
  }
}

void require_same_dim(const SpdMatrix& x, const SpdMatrix& y) {
  if (x.dim() != y.dim()) {
    fail(ErrorCode::DimensionMismatch,
         "sides " + std::to_string(x.dim()) + " and " + std::to_string(y.dim()));
  }
}

void require_positive(const EigenDecomposition& e) {
  // Descending order: the last eigenvalue is the smallest.
  const double smallest = e.eigenvalues.size() ? e.eigenvalues(e.eigenvalues.size() - 1) : 1.0;
  if (!(smallest > 0.0)) {
    fail(ErrorCode::NonPositiveEigenvalue, "smallest eigenvalue " + std::to_string(smallest));
  }
}

Matrix symmetrize(const Matrix& x) { return 0.5 * (x + x.transpose()); }

}  // namespace

SymMatrix::SymMatrix(Matrix data) : data_(std::move(data)) {
  require_square(data_, "SymMatrix");
  const double scale = std::max(1.0, data_.cwiseAbs().maxCoeff());
  if (data_.size() && (data_ - data_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    fail(ErrorCode::NotSymmetric, "asymmetry exceeds tolerance");
  }
}

SymMatrix SymMatrix::symmetrized(const Matrix& data) {
  require_square(data, "SymMatrix");
  return SymMatrix(symmetrize(data), Trusted{});
}

SpdMatrix::SpdMatrix(Matrix data) {
  SymMatrix sym(std::move(data));
  require_positive(eigen_sym(sym.data()));
  data_ = sym.data();
}

SpdMatrix SpdMatrix::trusted(Matrix data) {
  require_square(data, "SpdMatrix");
  SpdMatrix out;
  out.data_ = symmetrize(data);
  return out;
}

TangentVector::TangentVector(Vector data, Eigen::Index side) : data_(std::move(data)), side_(side) {
  if (side < 0 || data_.size() != side * (side + 1) / 2) {
    fail(ErrorCode::BadLength, "length " + std::to_string(data_.size()) + " does not match side " +
                                   std::to_string(side));
  }
}

EigenDecomposition eigen_sym(const Matrix& x) {
  require_square(x, "eigen_sym");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(x));
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::NonPositiveEigenvalue, "eigendecomposition did not converge");
  }
  // Eigen returns ascending order.
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

namespace detail {

Matrix logm_raw(const Matrix& x) {
  const auto e = eigen_sym(x);
  require_positive(e);
  return symmetrize(spectral_apply(e, [](double l) { return std::log(l); }));
}

Matrix log_scale_normalize_raw(const Matrix& x) {
  const auto e = eigen_sym(x);
  require_positive(e);
  const Vector logs = e.eigenvalues.array().log();
  const double alpha = logs.mean();
  Vector shifted = logs.array() - alpha;
  Matrix out = e.eigenvectors * shifted.asDiagonal() * e.eigenvectors.transpose();
  return symmetrize(out);
}

Vector half_vectorize_raw(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Vector v(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) v(k++) = x(i, i);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) v(k++) = M_SQRT2 * x(i, j);
  }
  return v;
}

}  // namespace detail

SymMatrix logm(const SpdMatrix& x) { return SymMatrix::symmetrized(detail::logm_raw(x.data())); }

SpdMatrix expm(const SymMatrix& x) {
  const auto e = eigen_sym(x.data());
  return SpdMatrix::trusted(spectral_apply(e, [](double l) { return std::exp(l); }));
}

SpdMatrix sqrtm(const SpdMatrix& x) {
  const auto e = eigen_sym(x.data());
  require_positive(e);
  return SpdMatrix::trusted(spectral_apply(e, [](double l) { return std::sqrt(l); }));
}

SpdMatrix inverse_sqrtm(const SpdMatrix& x) {
  const auto e = eigen_sym(x.data());
  require_positive(e);
  return SpdMatrix::trusted(spectral_apply(e, [](double l) { return 1.0 / std::sqrt(l); }));
}

double airm_distance(const SpdMatrix& x, const SpdMatrix& y) {
  require_same_dim(x, y);
  const Matrix w = inverse_sqrtm(x).data();
  const auto e = eigen_sym(w * y.data() * w);
  require_positive(e);
  return std::sqrt(e.eigenvalues.array().log().square().sum());
}

double lerm_distance(const SpdMatrix& x, const SpdMatrix& y) {
  require_same_dim(x, y);
  return (logm(x).data() - logm(y).data()).norm();
}

SpdMatrix scale_normalize(const SpdMatrix& x) {
  const auto d = static_cast<double>(x.dim());
  const double det = x.data().determinant();
  if (!(det > 0.0) || !std::isfinite(det)) {
    fail(ErrorCode::Overflow, "determinant " + std::to_string(det) + " is not a finite positive value");
  }
  const double factor = std::pow(det, -1.0 / d);
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    fail(ErrorCode::Overflow, "scale factor is not finite");
  }
  return SpdMatrix::trusted(factor * x.data());
}

SymMatrix log_scale_normalize(const SpdMatrix& x) {
  return SymMatrix::symmetrized(detail::log_scale_normalize_raw(x.data()));
}

TangentVector half_vectorize(const SymMatrix& x) {
  return TangentVector(detail::half_vectorize_raw(x.data()), x.dim());
}

Eigen::Index side_from_half_length(Eigen::Index length) {
  const auto n = static_cast<Eigen::Index>(std::llround((std::sqrt(8.0 * length + 1.0) - 1.0) / 2.0));
  if (length < 0 || n * (n + 1) / 2 != length) {
    fail(ErrorCode::BadLength, "length " + std::to_string(length) + " is not triangular");
  }
  return n;
}

SymMatrix half_unvectorize(const TangentVector& v) {
  const Eigen::Index n = side_from_half_length(v.size());
  Matrix x(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) x(i, i) = v.data()(k++);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      x(i, j) = x(j, i) = v.data()(k++) / M_SQRT2;
    }
  }
  return SymMatrix(std::move(x));
}

SpdMatrix log_euclidean_mean(std::span<const SpdMatrix> xs) {
  if (xs.empty()) fail(ErrorCode::EmptyInput, "log_euclidean_mean of no matrices");
  const Eigen::Index d = xs.front().dim();
  Matrix acc = Matrix::Zero(d, d);
  for (const auto& x : xs) {
    if (x.dim() != d) fail(ErrorCode::DimensionMismatch, "log_euclidean_mean: mixed sides");
    acc += detail::logm_raw(x.data());
  }
  acc /= static_cast<double>(xs.size());
  return expm(SymMatrix::symmetrized(acc));
}

namespace {

struct KarcherStep {
  Matrix whitened_mean;  // (1/N) sum log(M^-1/2 A_i M^-1/2)
  Matrix pole_sqrt;
  double residual = 0.0;
  double whitened_residual = 0.0;
};

KarcherStep karcher_gradient(const Matrix& pole, std::span<const SpdMatrix> xs) {
  const auto e = eigen_sym(pole);
  require_positive(e);
  const Matrix inv_sqrt = spectral_apply(e, [](double l) { return 1.0 / std::sqrt(l); });
  KarcherStep step;
  step.pole_sqrt = spectral_apply(e, [](double l) { return std::sqrt(l); });
  step.whitened_mean = Matrix::Zero(pole.rows(), pole.cols());
  for (const auto& a : xs) step.whitened_mean += detail::logm_raw(inv_sqrt * a.data() * inv_sqrt);
  step.whitened_mean /= static_cast<double>(xs.size());
  step.whitened_mean = symmetrize(step.whitened_mean);
  step.whitened_residual = step.whitened_mean.norm();
  step.residual = (step.pole_sqrt * step.whitened_mean * step.pole_sqrt).norm();
  return step;
}

}  // namespace

KarcherResult karcher_mean(std::span<const SpdMatrix> xs, const KarcherOptions& opts) {
  if (xs.empty()) fail(ErrorCode::EmptyInput, "karcher_mean of no matrices");
  if (!(opts.step > 0.0 && opts.step <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "karcher step must lie in (0, 1]");
  }
  const Eigen::Index d = xs.front().dim();
  bool all_equal = true;
  for (const auto& x : xs) {
    if (x.dim() != d) fail(ErrorCode::DimensionMismatch, "karcher_mean: mixed sides");
    all_equal = all_equal && x.data() == xs.front().data();
  }
  if (all_equal) {
    return KarcherResult{xs.front(), 0.0, 0.0, 0, true};
  }

  Matrix pole = log_euclidean_mean(xs).data();
  KarcherStep step = karcher_gradient(pole, xs);
  KarcherResult best{SpdMatrix::trusted(pole), step.residual, step.whitened_residual, 0, false};
  for (int it = 1; it <= opts.max_iters; ++it) {
    if (step.residual < opts.tol && step.whitened_residual < opts.tol) break;
    const Matrix update =
        spectral_apply(eigen_sym(opts.step * step.whitened_mean), [](double l) { return std::exp(l); });
    pole = symmetrize(step.pole_sqrt * update * step.pole_sqrt);
    step = karcher_gradient(pole, xs);
    if (step.residual < best.residual) {
      best = KarcherResult{SpdMatrix::trusted(pole), step.residual, step.whitened_residual, it, false};
    }
  }
  best.converged = best.residual < opts.tol && best.whitened_residual < opts.tol;
  return best;
}

TangentVector tangent_at_whitened(const Matrix& pole_inv_sqrt, const SpdMatrix& x) {
  if (pole_inv_sqrt.rows() != x.dim()) fail(ErrorCode::DimensionMismatch, "tangent_at: sides differ");
  const Matrix l = detail::logm_raw(pole_inv_sqrt * x.data() * pole_inv_sqrt);
  return TangentVector(detail::half_vectorize_raw(l), x.dim());
}

TangentVector tangent_at(const SpdMatrix& pole, const SpdMatrix& x) {
  require_same_dim(pole, x);
  return tangent_at_whitened(inverse_sqrtm(pole).data(), x);
}

LogEigenSplit log_eigen_split(const SpdMatrix& x) {
  const auto e = eigen_sym(x.data());
  require_positive(e);
  const Vector logs = e.eigenvalues.array().log();
  LogEigenSplit out;
  out.alpha = logs.mean();
  out.residuals = logs.array() - out.alpha;
  return out;
}

}  // namespace hgd
