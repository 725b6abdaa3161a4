#include "msvar/linalg.hpp"

#include "msvar/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace msvar {

namespace {

constexpr double kRankTolerance = 1e-10;

Eigen::ColPivHouseholderQR<Matrix> pivoted_qr(const Matrix& X) {
  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  qr.setThreshold(kRankTolerance);
  return qr;
}

}  // namespace

int first_dependent_column(const Matrix& X) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (X.col(j).norm() == 0.0) return static_cast<int>(j);
    if (pivoted_qr(X.leftCols(j + 1)).rank() < j + 1) return static_cast<int>(j);
  }
  return -1;
}

LeastSquaresFit least_squares(const Vector& y, const Matrix& X,
                              std::span<const std::string> names) {
  const auto n = X.rows();
  const auto k = X.cols();
  if (y.size() != n) throw ValidationError("least_squares: y and X row counts differ");
  if (n <= k) {
    throw ValidationError("least_squares: need more observations (" + std::to_string(n) +
                          ") than regressors (" + std::to_string(k) + ")");
  }
  const auto qr = pivoted_qr(X);
  if (qr.rank() < k) {
    const int bad = first_dependent_column(X);
    std::string column = bad >= 0 && static_cast<std::size_t>(bad) < names.size()
                             ? names[static_cast<std::size_t>(bad)]
                             : "column " + std::to_string(bad);
    throw NumericalError("rank-deficient regressor matrix: " + column +
                         " is collinear with preceding columns");
  }

  LeastSquaresFit fit;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - X * fit.coefficients;
  fit.rss = fit.residuals.squaredNorm();
  fit.observations = static_cast<int>(n);
  fit.sigma2 = fit.rss / static_cast<double>(n - k);

  // (X'X)^{-1} = P R^{-1} R^{-T} P'
  const Matrix R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Matrix Rinv = R.triangularView<Eigen::Upper>().solve(Matrix::Identity(k, k));
  const Matrix xtx_inv_perm = Rinv * Rinv.transpose();
  const auto& perm = qr.colsPermutation();
  const Matrix xtx_inv = perm * xtx_inv_perm * perm.transpose();
  fit.standard_errors = (fit.sigma2 * xtx_inv.diagonal()).cwiseSqrt();
  return fit;
}

bool is_positive_definite(const Matrix& S) {
  if (S.rows() != S.cols() || !S.allFinite()) return false;
  Eigen::LLT<Matrix> llt(S);
  return llt.info() == Eigen::Success;
}

Matrix cholesky_lower(const Matrix& S) {
  if (S.rows() != S.cols()) throw ValidationError("cholesky: matrix is not square");
  Eigen::LLT<Matrix> llt(S);
  if (!S.allFinite() || llt.info() != Eigen::Success) {
    throw NumericalError("covariance matrix is not positive definite");
  }
  return llt.matrixL();
}

Vector gaussian_log_density_rows(const Matrix& residuals, const Matrix& chol_lower) {
  const auto n = chol_lower.rows();
  const double log_det_half = chol_lower.diagonal().array().log().sum();
  const double constant = -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  const Matrix whitened =
      chol_lower.triangularView<Eigen::Lower>().solve(residuals.transpose());
  return (constant - log_det_half - 0.5 * whitened.colwise().squaredNorm().array())
      .transpose();
}

Vector stationary_distribution(const Matrix& P) {
  const auto K = P.rows();
  if (K == 1) return Vector::Ones(1);
  // Solve pi' (I - P) = 0 with sum(pi) = 1 as an overdetermined system.
  Matrix A(K + 1, K);
  A.topRows(K) = (Matrix::Identity(K, K) - P).transpose();
  A.row(K).setOnes();
  Vector b = Vector::Zero(K + 1);
  b(K) = 1.0;
  Vector pi = A.colPivHouseholderQr().solve(b);
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

double spectral_radius(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double log_sum_exp(const Eigen::Ref<const Vector>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace msvar
