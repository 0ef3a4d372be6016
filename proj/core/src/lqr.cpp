#include "privlq/lqr.hpp"

#include <Eigen/Cholesky>
#include <cstdio>

#include "privlq/errors.hpp"
#include "privlq/linalg.hpp"

namespace privlq {

GainSchedule compute_gain_schedule(const SystemModel& model) {
  const int N = model.N;
  GainSchedule sched;
  sched.S.assign(N + 1, Eigen::MatrixXd());
  sched.L.assign(N, Eigen::MatrixXd());
  sched.S[N] = symmetrized(model.QN);

  for (int k = N - 1; k >= 0; --k) {
    const Eigen::MatrixXd& S_next = sched.S[k + 1];
    const Eigen::MatrixXd inner = model.B.transpose() * S_next * model.B + model.U;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(symmetrized(inner));
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw SingularInnerMatrixError("B'S(" + std::to_string(k + 1) + ")B + U is numerically singular");
    // L(k) = -inner^{-1} B'S(k+1)A, solved rather than inverted.
    sched.L[k] = -ldlt.solve(model.B.transpose() * S_next * model.A);
    Eigen::MatrixXd S_k =
        model.A.transpose() * S_next * model.A + model.Q + model.A.transpose() * S_next * model.B * sched.L[k];
    sched.S[k] = symmetrized(S_k);
  }
  return sched;
}

Eigen::VectorXd lq_control(const Eigen::MatrixXd& L_k, const Eigen::VectorXd& x) {
  if (L_k.cols() != x.size())
    throw DimensionMismatchError("gain is " + std::to_string(L_k.rows()) + "x" + std::to_string(L_k.cols()) +
                                 " but state has length " + std::to_string(x.size()));
  return L_k * x;
}

double evaluate_cost(const std::vector<Eigen::VectorXd>& states, const std::vector<Eigen::VectorXd>& controls,
                     const SystemModel& model) {
  const int N = model.N;
  if (static_cast<int>(states.size()) != N)
    throw DimensionMismatchError("states must hold x(1..N), expected length " + std::to_string(N) + ", got " +
                                 std::to_string(states.size()));
  if (static_cast<int>(controls.size()) != N - 1)
    throw DimensionMismatchError("controls must hold u(1..N-1), expected length " + std::to_string(N - 1) +
                                 ", got " + std::to_string(controls.size()));
  const int n = model.state_dim();
  const int m = model.input_dim();
  double acc = 0.0;
  for (int k = 1; k <= N - 1; ++k) {
    const Eigen::VectorXd& x = states[k - 1];
    if (x.size() != n) throw DimensionMismatchError("state x(" + std::to_string(k) + ") has wrong length");
    acc += x.dot(model.Q * x);
  }
  const Eigen::VectorXd& xN = states[N - 1];
  if (xN.size() != n) throw DimensionMismatchError("state x(N) has wrong length");
  acc += xN.dot(model.QN * xN);
  for (int k = 1; k <= N - 1; ++k) {
    const Eigen::VectorXd& u = controls[k - 1];
    if (u.size() != m) throw DimensionMismatchError("control u(" + std::to_string(k) + ") has wrong length");
    acc += u.dot(model.U * u);
  }
  return acc / static_cast<double>(N);
}

namespace {

void append_num(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += ',';
  line += buf;
}

}  // namespace

void write_gain_schedule_csv(std::ostream& out, const GainSchedule& schedule) {
  const int N = schedule.horizon();
  if (N == 0) return;
  const auto& L0 = schedule.L[0];
  const auto& S0 = schedule.S[0];
  std::string header = "k";
  for (Eigen::Index r = 0; r < L0.rows(); ++r)
    for (Eigen::Index c = 0; c < L0.cols(); ++c)
      header += ",L_" + std::to_string(r + 1) + "_" + std::to_string(c + 1);
  for (Eigen::Index r = 0; r < S0.rows(); ++r)
    for (Eigen::Index c = 0; c < S0.cols(); ++c)
      header += ",S_" + std::to_string(r + 1) + "_" + std::to_string(c + 1);
  out << header << '\n';
  for (int k = 0; k <= N; ++k) {
    std::string line = std::to_string(k);
    if (k < N) {
      const auto& L = schedule.L[k];
      for (Eigen::Index r = 0; r < L.rows(); ++r)
        for (Eigen::Index c = 0; c < L.cols(); ++c) append_num(line, L(r, c));
    } else {
      line.append(static_cast<std::size_t>(L0.size()), ',');
    }
    const auto& S = schedule.S[k];
    for (Eigen::Index r = 0; r < S.rows(); ++r)
      for (Eigen::Index c = 0; c < S.cols(); ++c) append_num(line, S(r, c));
    out << line << '\n';
  }
}

}  // namespace privlq
