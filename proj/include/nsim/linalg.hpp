#pragma once

#include <Eigen/Dense>
#include <optional>

namespace nsim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace linalg {

/// Column-wise arithmetic mean of the rows of `rows`.
Vector sample_mean(const Matrix& rows);

/// Population covariance (1/n normalization), computed in two passes:
/// centering first, then accumulating outer products of deviations.
Matrix sample_covariance(const Matrix& rows);

/// (1/n) * sum_i (y_i - mean(y)) (x_i - mean(x)).
Vector cross_covariance(const Matrix& rows, const Vector& responses);

/// Relative eigenvalue cutoff used when `pseudo_inverse` gets no explicit
/// threshold: dim * machine epsilon.
double default_rank_tol(Index dim);

/// Moore-Penrose inverse of a symmetric positive semi-definite matrix through
/// its eigendecomposition. Eigenvalues at or below rank_tol * lambda_max are
/// treated as exact zeros.
Matrix pseudo_inverse(const Matrix& m, std::optional<double> rank_tol = std::nullopt);

bool all_finite(const Matrix& m);

}  // namespace linalg
}  // namespace nsim
