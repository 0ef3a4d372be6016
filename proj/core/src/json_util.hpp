#pragma once

#include <Eigen/Dense>
#include <string>

#include <json.hpp>

#include "privlq/errors.hpp"

namespace privlq::detail {

using nlohmann::json;

inline Eigen::MatrixXd matrix_from_json(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ConfigError("field " + name + " must be a nested array of numbers");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError("field " + name + " has ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ConfigError("field " + name + " has a non-numeric entry");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

inline Eigen::VectorXd vector_from_json(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) throw ConfigError("field " + name + " must be an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("field " + name + " has a non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline const json& require_field(const json& j, const std::string& key, const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(context + ": missing field " + key);
  return *it;
}

}  // namespace privlq::detail

namespace privlq {
struct SystemModel;
namespace detail {
SystemModel model_from_json_obj(const json& j);
}  // namespace detail
}  // namespace privlq
