#include "nsim/linalg.hpp"

#include <limits>
#include <string>

#include "nsim/error.hpp"

namespace nsim::linalg {

namespace {

void require_rows(const Matrix& rows) {
  if (rows.rows() < 1 || rows.cols() < 1) {
    fail(ErrorKind::data, "empty_sample", "empty sample");
  }
}

}  // namespace

bool all_finite(const Matrix& m) { return m.allFinite(); }

Vector sample_mean(const Matrix& rows) {
  require_rows(rows);
  return rows.colwise().sum().transpose() / static_cast<double>(rows.rows());
}

Matrix sample_covariance(const Matrix& rows) {
  require_rows(rows);
  const Vector mean = sample_mean(rows);
  const Matrix centered = rows.rowwise() - mean.transpose();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(rows.rows());
  // The product is symmetric in exact arithmetic; make it so bitwise.
  return 0.5 * (cov + cov.transpose());
}

Vector cross_covariance(const Matrix& rows, const Vector& responses) {
  require_rows(rows);
  if (rows.rows() != responses.size()) {
    fail(ErrorKind::data, "length_mismatch",
         "row count " + std::to_string(rows.rows()) + " does not match response count " +
             std::to_string(responses.size()));
  }
  const Vector mean = sample_mean(rows);
  const double y_mean = responses.mean();
  const Matrix centered = rows.rowwise() - mean.transpose();
  const Vector y_centered = responses.array() - y_mean;
  return centered.transpose() * y_centered / static_cast<double>(rows.rows());
}

double default_rank_tol(Index dim) {
  return static_cast<double>(dim) * std::numeric_limits<double>::epsilon();
}

Matrix pseudo_inverse(const Matrix& m, std::optional<double> rank_tol) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    fail(ErrorKind::usage, "invalid_argument", "pseudo_inverse expects a non-empty square matrix");
  }
  if (!m.allFinite()) {
    fail(ErrorKind::data, "non_finite", "pseudo_inverse input has non-finite entries");
  }
  const double tol = rank_tol.value_or(default_rank_tol(m.rows()));
  if (!(tol > 0.0)) {
    fail(ErrorKind::usage, "invalid_argument", "rank_tol must be positive");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) {
    fail(ErrorKind::internal, "eigensolver_failed", "eigendecomposition did not converge");
  }
  const Vector& values = eig.eigenvalues();
  const Matrix& vectors = eig.eigenvectors();
  const double lambda_max = values.maxCoeff();
  if (!(lambda_max > 0.0)) {
    return Matrix::Zero(m.rows(), m.cols());
  }

  const double cutoff = tol * lambda_max;
  Vector inverted = Vector::Zero(values.size());
  for (Index i = 0; i < values.size(); ++i) {
    if (values[i] > cutoff) inverted[i] = 1.0 / values[i];
  }
  Matrix pinv = vectors * inverted.asDiagonal() * vectors.transpose();
  return 0.5 * (pinv + pinv.transpose());
}

}  // namespace nsim::linalg
