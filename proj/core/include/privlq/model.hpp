#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace privlq {

/// Discrete-time LTI plant x(k+1) = A x(k) + B u(k) + w(k) with quadratic
/// cost weights and a finite horizon. Immutable by convention after
/// validate_model(); safe to share across workers.
struct SystemModel {
  Eigen::MatrixXd A;   // n x n
  Eigen::MatrixXd B;   // n x m
  Eigen::MatrixXd W;   // n x n, process-noise covariance
  Eigen::MatrixXd Q;   // n x n, stage state weight
  Eigen::MatrixXd QN;  // n x n, terminal state weight
  Eigen::MatrixXd U;   // m x m, control weight
  int N = 0;           // horizon length in steps
  Eigen::VectorXd x0;  // initial state

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
};

/// Checks symmetry/positive-definiteness of W, Q, QN, U, dimensional
/// consistency, and N >= 1; throws NonSymmetricError,
/// NotPositiveDefiniteError or DimensionMismatchError naming the offender.
///
/// Controllability of (A,B) and observability of (A, sqrt(Q)) are rank
/// checks only; failures land in *warnings (the finite-horizon recursion
/// is well-defined without them).
SystemModel validate_model(SystemModel model, std::vector<std::string>* warnings = nullptr);

/// JSON with keys A, B, W, Q, QN, U, N, x0; matrices row-major nested arrays.
SystemModel parse_model_json(const std::string& text);
std::string write_model_json(const SystemModel& model);

}  // namespace privlq
