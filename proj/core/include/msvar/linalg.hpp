#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace msvar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct LeastSquaresFit {
  Vector coefficients;
  Vector residuals;
  Vector standard_errors;
  double rss = 0.0;
  double sigma2 = 0.0;  // rss / (rows - cols)
  int observations = 0;
};

/// Least squares through a column-pivoted Householder QR.
///
/// Throws NumericalError when X is rank deficient, naming the first column
/// that is linearly dependent on the ones before it (by `names` when given,
/// else by index).
LeastSquaresFit least_squares(const Vector& y, const Matrix& X,
                              std::span<const std::string> names = {});

/// Index of the first column of X lying in the span of its predecessors,
/// or -1 when X has full column rank.
int first_dependent_column(const Matrix& X);

/// Lower Cholesky factor; throws NumericalError if `S` is not positive definite.
Matrix cholesky_lower(const Matrix& S);

bool is_positive_definite(const Matrix& S);

/// Multivariate normal log densities of the rows of `residuals` under N(0, S),
/// given the lower Cholesky factor of S.
Vector gaussian_log_density_rows(const Matrix& residuals, const Matrix& chol_lower);

/// Stationary distribution of a row-stochastic matrix (left unit eigenvector).
Vector stationary_distribution(const Matrix& P);

/// Largest eigenvalue modulus.
double spectral_radius(const Matrix& A);

/// log(sum(exp(v))) without overflow.
double log_sum_exp(const Eigen::Ref<const Vector>& v);

}  // namespace msvar
