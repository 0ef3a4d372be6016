#pragma once

#include <Eigen/Dense>
#include <string>

namespace privlq {

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

/// Max-abs asymmetry relative to max(1, max-abs entry).
double relative_asymmetry(const Eigen::MatrixXd& m);

bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol = 1e-10);

/// Positive definiteness by symmetric eigendecomposition:
/// min-eig > 1e-12 * max(1, max-eig).
bool is_positive_definite(const Eigen::MatrixXd& m);

bool is_positive_semidefinite(const Eigen::MatrixXd& m, double tol = 1e-10);

/// Throws NonSymmetricError / NotPositiveDefiniteError naming the matrix.
void require_spd(const std::string& name, const Eigen::MatrixXd& m);

/// Numerical rank: count of singular values > rel_tol * largest.
int rank_by_svd(const Eigen::MatrixXd& m, double rel_tol = 1e-9);

}  // namespace privlq
