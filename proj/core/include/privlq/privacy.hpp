#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "privlq/rng.hpp"

namespace privlq {

enum class NoiseFamily { Gaussian, Uniform, Laplace };

/// rho is a fixed public-shape parameter; the plant keeps the value private.
struct FixedRho {
  double rho = 2.0;
};

/// rho(k) drawn per step with equal probability from the finite set M.
/// Defeats covariance-ratio recovery of rho when the controllers collude.
struct RandomRho {
  std::vector<double> values;  // the set M
};

/// Scale-noise scheme: beta(k) i.i.d. zero-mean with covariance Rbeta,
/// alpha(k) = rho * beta(k).
struct NoiseScheme {
  NoiseFamily family = NoiseFamily::Gaussian;
  Eigen::MatrixXd Rbeta;
  std::variant<FixedRho, RandomRho> rho_mode = FixedRho{};

  // Restorer coefficients 1/(rho-1) blow up as rho -> 1; every admissible
  // rho must keep |rho - 1| >= this floor.
  double min_rho_gap = 0.5;

  int dim() const { return static_cast<int>(Rbeta.rows()); }
  bool is_random_rho() const { return std::holds_alternative<RandomRho>(rho_mode); }

  /// E[rho^2]: rho^2 for FixedRho, R_rho = mean of m_i^2 for RandomRho.
  double rho_second_moment() const;
};

/// Enforces: Rbeta SPD; FixedRho rho not in {0,1} with |rho-1| >= min_rho_gap;
/// RandomRho set disjoint from {0,1}, zero mean (1e-12), |m-1| >= min_rho_gap.
NoiseScheme validate_scheme(NoiseScheme scheme);

/// Covariance of alpha(k): rho^2 Rbeta (fixed) or R_rho Rbeta (random).
Eigen::MatrixXd effective_alpha_covariance(const NoiseScheme& scheme);

double sample_rho(const NoiseScheme& scheme, RngStream& rng);

struct NoiseDraw {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  double rho_used = 0.0;
  int k = 0;
};

/// beta from the configured zero-mean family with covariance Rbeta
/// (unit-variance i.i.d. components mixed by the Cholesky factor of Rbeta),
/// alpha = rho * beta with rho from sample_rho.
NoiseDraw generate_noise(const NoiseScheme& scheme, int k, RngStream& rng);

struct BlurredStatePair {
  Eigen::VectorXd x_alpha;
  Eigen::VectorXd x_beta;
  int k = 0;
};

/// x_alpha = x + alpha, x_beta = x + beta.
BlurredStatePair encode(const Eigen::VectorXd& x, const NoiseDraw& draw);

/// rho/(rho-1) u_beta - 1/(rho-1) u_alpha; equals L x exactly (in exact
/// arithmetic) when u_alpha = L(x + rho beta) and u_beta = L(x + beta).
/// The 1/(rho-1) coefficients amplify controller-side round-off by
/// O(1/|rho-1|), hence the enforced gap.
Eigen::VectorXd restore(const Eigen::VectorXd& u_alpha, const Eigen::VectorXd& u_beta, double rho_used,
                        double min_rho_gap = 0.5);

}  // namespace privlq
