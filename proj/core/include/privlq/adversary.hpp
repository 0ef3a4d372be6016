#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "privlq/privacy.hpp"

namespace privlq {

enum class Side { Alpha, Beta };

/// Which observation stream the curious-but-honest estimator consumes:
/// one blurred state (non-colluding, per side) or both stacked (colluding).
struct AdversaryMode {
  enum class Kind { NonColluding, Colluding };
  Kind kind = Kind::NonColluding;
  Side side = Side::Alpha;  // meaningful only when non-colluding

  static AdversaryMode non_colluding(Side s) { return {Kind::NonColluding, s}; }
  static AdversaryMode colluding() { return {Kind::Colluding, Side::Alpha}; }

  bool is_colluding() const { return kind == Kind::Colluding; }
  std::string tag() const;

  /// Observation length: n (non-colluding) or 2n (colluding).
  int observation_dim(int n) const { return is_colluding() ? 2 * n : n; }
};

/// How the colluding filter is seeded at k = 0: LMMSE fusion of both blurred
/// states (default) or single-sided trust in one of them.
enum class CollusionInit { Fused, AlphaSided, BetaSided };

/// Posterior estimate and covariance at step k. A value type; kf_step is
/// state-in, state-out.
struct AdversaryState {
  Eigen::VectorXd xhat;
  Eigen::MatrixXd P;
  int k = 0;
};

/// R (per side) or blockdiag(R_alpha, R_beta); alpha uses the effective
/// covariance rho^2 Rbeta / R_rho Rbeta.
Eigen::MatrixXd observation_covariance(const NoiseScheme& scheme, const AdversaryMode& mode);

/// Stacked observation matrix H = [I; I] for collusion, I otherwise.
Eigen::MatrixXd observation_matrix(int n, const AdversaryMode& mode);

/// Non-colluding: xhat(0) = obs, P(0) = R.
/// Colluding: LMMSE fusion of the two halves, or single-sided per `init`.
AdversaryState kf_init(const NoiseScheme& scheme, const Eigen::VectorXd& first_obs, const AdversaryMode& mode,
                       CollusionInit init = CollusionInit::Fused);

struct KfStepResult {
  AdversaryState state;
  Eigen::MatrixXd gain;  // n x n, or n x 2n when colluding
};

/// Predict with F_prev = A + B L(k-1) and W, then measurement-update with the
/// blurred observation. P is symmetrized after the update.
KfStepResult kf_step(const AdversaryState& state, const Eigen::VectorXd& obs, const Eigen::MatrixXd& F_prev,
                     const Eigen::MatrixXd& W, const NoiseScheme& scheme, const AdversaryMode& mode);

/// Analytic trace bounds on P(k):
///   non-colluding: [tr((W^{-1}+R^{-1})^{-1}), tr(R)]
///   colluding:     [tr((R_a^{-1}+R_b^{-1}+W^{-1})^{-1}), tr((R_a^{-1}+R_b^{-1})^{-1})].
std::pair<double, double> trace_bounds(const NoiseScheme& scheme, const Eigen::MatrixXd& W,
                                       const AdversaryMode& mode);

/// History a completed run leaves behind for the error-coefficient analysis:
/// closed-loop matrices F(k) = A + B L(k) for k = 0..N-1 and estimator gains
/// G(k) for k = 1..N-1 (slot 0 is empty; no gain at the init step).
struct GainRecord {
  std::vector<Eigen::MatrixXd> F;
  std::vector<Eigen::MatrixXd> G;

  int last_step() const { return static_cast<int>(G.size()) - 1; }
};

}  // namespace privlq
