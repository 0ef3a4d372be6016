#pragma once

#include <Eigen/Dense>
#include <ostream>
#include <vector>

#include "privlq/model.hpp"

namespace privlq {

/// Backward Riccati solution S(0..N) and feedback gains L(0..N-1).
/// Immutable and shareable once computed.
struct GainSchedule {
  std::vector<Eigen::MatrixXd> S;  // S[k], k = 0..N
  std::vector<Eigen::MatrixXd> L;  // L[k], k = 0..N-1

  int horizon() const { return static_cast<int>(L.size()); }
};

/// Riccati recursion from S(N) = QN with
///   L(k) = -[B'S(k+1)B + U]^{-1} B'S(k+1)A,
/// S(k) symmetrized after each update. Pure function of the model.
GainSchedule compute_gain_schedule(const SystemModel& model);

/// u = L_k x.
Eigen::VectorXd lq_control(const Eigen::MatrixXd& L_k, const Eigen::VectorXd& x);

/// Realized cost of one trajectory:
///   (1/N) [ sum_{k=1}^{N-1} x(k)'Qx(k) + x(N)'QN x(N) + sum_{k=1}^{N-1} u(k)'Uu(k) ].
/// `states` holds x(1..N) (length N), `controls` holds u(1..N-1) (length N-1).
double evaluate_cost(const std::vector<Eigen::VectorXd>& states, const std::vector<Eigen::VectorXd>& controls,
                     const SystemModel& model);

/// One row per k: k, vec(L(k)) row-major, vec(S(k)) row-major.
/// The final row (k = N) has empty L cells.
void write_gain_schedule_csv(std::ostream& out, const GainSchedule& schedule);

}  // namespace privlq
