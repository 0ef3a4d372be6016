#include "privlq/model.hpp"

#include <Eigen/Cholesky>

#include "json_util.hpp"
#include "privlq/errors.hpp"
#include "privlq/linalg.hpp"

namespace privlq {

namespace {

void check_square(const std::string& name, const Eigen::MatrixXd& m, int dim) {
  if (m.rows() != dim || m.cols() != dim)
    throw DimensionMismatchError("matrix " + name + " must be " + std::to_string(dim) + "x" +
                                 std::to_string(dim) + ", got " + std::to_string(m.rows()) + "x" +
                                 std::to_string(m.cols()));
}

// Rank of [B, AB, ..., A^{n-1}B].
int controllability_rank(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  Eigen::MatrixXd K(n, n * m);
  Eigen::MatrixXd block = B;
  for (int i = 0; i < n; ++i) {
    K.middleCols(i * m, m) = block;
    block = A * block;
  }
  return rank_by_svd(K, 1e-9);
}

// Rank of [C; CA; ...; CA^{n-1}] with C a square root factor of Q.
int observability_rank(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(A.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(Q));
  // Q is PD by the time we get here; the factor choice does not change rank.
  const Eigen::MatrixXd C = llt.matrixU();
  Eigen::MatrixXd O(n * n, n);
  Eigen::MatrixXd block = C;
  for (int i = 0; i < n; ++i) {
    O.middleRows(i * n, n) = block;
    block = block * A;
  }
  return rank_by_svd(O, 1e-9);
}

}  // namespace

SystemModel validate_model(SystemModel model, std::vector<std::string>* warnings) {
  const int n = model.state_dim();
  const int m = model.input_dim();
  if (n <= 0 || m <= 0) throw DimensionMismatchError("A must be square and B must have n rows, m >= 1 columns");
  if (model.A.cols() != n) throw DimensionMismatchError("matrix A must be square");
  if (model.B.rows() != n)
    throw DimensionMismatchError("matrix B must have " + std::to_string(n) + " rows, got " +
                                 std::to_string(model.B.rows()));
  check_square("W", model.W, n);
  check_square("Q", model.Q, n);
  check_square("QN", model.QN, n);
  check_square("U", model.U, m);
  if (model.x0.size() != n)
    throw DimensionMismatchError("x0 must have length " + std::to_string(n) + ", got " +
                                 std::to_string(model.x0.size()));
  if (model.N < 1) throw ParameterOutOfRangeError("horizon N must be >= 1, got " + std::to_string(model.N));

  require_spd("W", model.W);
  require_spd("Q", model.Q);
  require_spd("QN", model.QN);
  require_spd("U", model.U);

  if (warnings) {
    if (controllability_rank(model.A, model.B) < n) warnings->push_back("(A,B) is not controllable");
    if (observability_rank(model.A, model.Q) < n) warnings->push_back("(A,sqrt(Q)) is not observable");
  }
  return model;
}

namespace detail {

SystemModel model_from_json_obj(const json& j) {
  SystemModel m;
  m.A = matrix_from_json(require_field(j, "A", "model"), "A");
  m.B = matrix_from_json(require_field(j, "B", "model"), "B");
  m.W = matrix_from_json(require_field(j, "W", "model"), "W");
  m.Q = matrix_from_json(require_field(j, "Q", "model"), "Q");
  m.QN = matrix_from_json(require_field(j, "QN", "model"), "QN");
  m.U = matrix_from_json(require_field(j, "U", "model"), "U");
  const auto& nj = require_field(j, "N", "model");
  if (!nj.is_number_integer()) throw ConfigError("model: N must be an integer");
  m.N = nj.get<int>();
  m.x0 = vector_from_json(require_field(j, "x0", "model"), "x0");
  return m;
}

}  // namespace detail

SystemModel parse_model_json(const std::string& text) {
  detail::json j;
  try {
    j = detail::json::parse(text);
  } catch (const detail::json::parse_error& e) {
    throw ConfigError(std::string("model JSON parse error: ") + e.what());
  }
  return detail::model_from_json_obj(j);
}

std::string write_model_json(const SystemModel& model) {
  detail::json j;
  j["A"] = detail::matrix_to_json(model.A);
  j["B"] = detail::matrix_to_json(model.B);
  j["W"] = detail::matrix_to_json(model.W);
  j["Q"] = detail::matrix_to_json(model.Q);
  j["QN"] = detail::matrix_to_json(model.QN);
  j["U"] = detail::matrix_to_json(model.U);
  j["N"] = model.N;
  j["x0"] = detail::vector_to_json(model.x0);
  return j.dump(2);
}

}  // namespace privlq
