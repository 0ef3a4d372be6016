#include "privlq/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "privlq/errors.hpp"

namespace privlq {

double relative_asymmetry(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return 1.0;
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol) {
  return m.rows() == m.cols() && relative_asymmetry(m) <= rel_tol;
}

bool is_positive_definite(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  const double min_eig = es.eigenvalues().minCoeff();
  const double max_eig = es.eigenvalues().maxCoeff();
  return min_eig > 1e-12 * std::max(1.0, max_eig);
}

bool is_positive_semidefinite(const Eigen::MatrixXd& m, double tol) {
  if (!is_symmetric(m, tol)) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  const double max_eig = std::max(0.0, es.eigenvalues().maxCoeff());
  return es.eigenvalues().minCoeff() >= -tol * std::max(1.0, max_eig);
}

void require_spd(const std::string& name, const Eigen::MatrixXd& m) {
  if (!is_symmetric(m)) throw NonSymmetricError(name);
  if (!is_positive_definite(m)) throw NotPositiveDefiniteError(name);
}

int rank_by_svd(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

}  // namespace privlq
