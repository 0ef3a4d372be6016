#include "privlq/privacy.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "privlq/errors.hpp"
#include "privlq/linalg.hpp"

namespace privlq {

double NoiseScheme::rho_second_moment() const {
  if (const auto* fixed = std::get_if<FixedRho>(&rho_mode)) return fixed->rho * fixed->rho;
  const auto& values = std::get<RandomRho>(rho_mode).values;
  double acc = 0.0;
  for (double m : values) acc += m * m;
  return acc / static_cast<double>(values.size());
}

NoiseScheme validate_scheme(NoiseScheme scheme) {
  require_spd("Rbeta", scheme.Rbeta);
  if (!(scheme.min_rho_gap > 0.0))
    throw ParameterOutOfRangeError("min_rho_gap must be positive");
  if (const auto* fixed = std::get_if<FixedRho>(&scheme.rho_mode)) {
    if (fixed->rho == 0.0 || fixed->rho == 1.0)
      throw ParameterOutOfRangeError("rho must not be 0 or 1");
    if (std::abs(fixed->rho - 1.0) < scheme.min_rho_gap)
      throw RhoTooCloseToOneError("|rho - 1| = " + std::to_string(std::abs(fixed->rho - 1.0)) +
                                  " is below the floor " + std::to_string(scheme.min_rho_gap));
  } else {
    const auto& values = std::get<RandomRho>(scheme.rho_mode).values;
    if (values.empty()) throw ParameterOutOfRangeError("the set M must be non-empty");
    double mean = 0.0;
    for (double m : values) {
      if (m == 0.0 || m == 1.0) throw ParameterOutOfRangeError("the set M must not contain 0 or 1");
      if (std::abs(m - 1.0) < scheme.min_rho_gap)
        throw RhoTooCloseToOneError("M contains " + std::to_string(m) + " with |m - 1| below the floor " +
                                    std::to_string(scheme.min_rho_gap));
      mean += m;
    }
    mean /= static_cast<double>(values.size());
    if (std::abs(mean) > 1e-12)
      throw ParameterOutOfRangeError("the set M must have zero mean, got " + std::to_string(mean));
  }
  return scheme;
}

Eigen::MatrixXd effective_alpha_covariance(const NoiseScheme& scheme) {
  return scheme.rho_second_moment() * scheme.Rbeta;
}

double sample_rho(const NoiseScheme& scheme, RngStream& rng) {
  if (const auto* fixed = std::get_if<FixedRho>(&scheme.rho_mode)) return fixed->rho;
  const auto& values = std::get<RandomRho>(scheme.rho_mode).values;
  return values[rng.uniform_index(values.size())];
}

NoiseDraw generate_noise(const NoiseScheme& scheme, int k, RngStream& rng) {
  const int n = scheme.dim();
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) {
    switch (scheme.family) {
      case NoiseFamily::Gaussian: z(i) = rng.gaussian(); break;
      case NoiseFamily::Uniform: z(i) = rng.uniform_unit(); break;
      case NoiseFamily::Laplace: z(i) = rng.laplace_unit(); break;
    }
  }
  NoiseDraw draw;
  draw.k = k;
  draw.beta = Eigen::LLT<Eigen::MatrixXd>(scheme.Rbeta).matrixL() * z;
  draw.rho_used = sample_rho(scheme, rng);
  draw.alpha = draw.rho_used * draw.beta;
  return draw;
}

BlurredStatePair encode(const Eigen::VectorXd& x, const NoiseDraw& draw) {
  if (x.size() != draw.beta.size())
    throw DimensionMismatchError("state has length " + std::to_string(x.size()) + " but noise has length " +
                                 std::to_string(draw.beta.size()));
  BlurredStatePair pair;
  pair.k = draw.k;
  pair.x_alpha = x + draw.alpha;
  pair.x_beta = x + draw.beta;
  return pair;
}

Eigen::VectorXd restore(const Eigen::VectorXd& u_alpha, const Eigen::VectorXd& u_beta, double rho_used,
                        double min_rho_gap) {
  if (u_alpha.size() != u_beta.size())
    throw DimensionMismatchError("controller replies have mismatched lengths");
  if (std::abs(rho_used - 1.0) < min_rho_gap)
    throw RhoTooCloseToOneError("restorer called with |rho - 1| = " +
                                std::to_string(std::abs(rho_used - 1.0)) + " below the floor " +
                                std::to_string(min_rho_gap));
  const double denom = rho_used - 1.0;
  return (rho_used / denom) * u_beta - (1.0 / denom) * u_alpha;
}

}  // namespace privlq
