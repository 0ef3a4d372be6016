#include "privlq/adversary.hpp"

#include <Eigen/Cholesky>

#include "privlq/errors.hpp"
#include "privlq/linalg.hpp"

namespace privlq {

std::string AdversaryMode::tag() const {
  if (is_colluding()) return "colluding";
  return side == Side::Alpha ? "alpha" : "beta";
}

Eigen::MatrixXd observation_covariance(const NoiseScheme& scheme, const AdversaryMode& mode) {
  const int n = scheme.dim();
  const Eigen::MatrixXd R_alpha = effective_alpha_covariance(scheme);
  if (!mode.is_colluding()) return mode.side == Side::Alpha ? R_alpha : scheme.Rbeta;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  R.topLeftCorner(n, n) = R_alpha;
  R.bottomRightCorner(n, n) = scheme.Rbeta;
  return R;
}

Eigen::MatrixXd observation_matrix(int n, const AdversaryMode& mode) {
  if (!mode.is_colluding()) return Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd H(2 * n, n);
  H.topRows(n) = Eigen::MatrixXd::Identity(n, n);
  H.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
  return H;
}

AdversaryState kf_init(const NoiseScheme& scheme, const Eigen::VectorXd& first_obs, const AdversaryMode& mode,
                       CollusionInit init) {
  const int n = scheme.dim();
  if (first_obs.size() != mode.observation_dim(n))
    throw DimensionMismatchError("first observation has length " + std::to_string(first_obs.size()) +
                                 ", expected " + std::to_string(mode.observation_dim(n)));
  AdversaryState state;
  state.k = 0;
  if (!mode.is_colluding()) {
    state.xhat = first_obs;
    state.P = observation_covariance(scheme, mode);
    return state;
  }
  const Eigen::VectorXd obs_alpha = first_obs.head(n);
  const Eigen::VectorXd obs_beta = first_obs.tail(n);
  switch (init) {
    case CollusionInit::AlphaSided:
      state.xhat = obs_alpha;
      state.P = effective_alpha_covariance(scheme);
      break;
    case CollusionInit::BetaSided:
      state.xhat = obs_beta;
      state.P = scheme.Rbeta;
      break;
    case CollusionInit::Fused: {
      const Eigen::MatrixXd Ra_inv = effective_alpha_covariance(scheme).llt().solve(Eigen::MatrixXd::Identity(n, n));
      const Eigen::MatrixXd Rb_inv = scheme.Rbeta.llt().solve(Eigen::MatrixXd::Identity(n, n));
      Eigen::LLT<Eigen::MatrixXd> info((Ra_inv + Rb_inv).eval());
      state.P = symmetrized(info.solve(Eigen::MatrixXd::Identity(n, n)));
      state.xhat = info.solve(Ra_inv * obs_alpha + Rb_inv * obs_beta);
      break;
    }
  }
  return state;
}

KfStepResult kf_step(const AdversaryState& state, const Eigen::VectorXd& obs, const Eigen::MatrixXd& F_prev,
                     const Eigen::MatrixXd& W, const NoiseScheme& scheme, const AdversaryMode& mode) {
  const int n = scheme.dim();
  if (obs.size() != mode.observation_dim(n))
    throw DimensionMismatchError("observation has length " + std::to_string(obs.size()) + ", expected " +
                                 std::to_string(mode.observation_dim(n)));

  const Eigen::VectorXd xpred = F_prev * state.xhat;
  const Eigen::MatrixXd Ppred = symmetrized(F_prev * state.P * F_prev.transpose() + W);
  const Eigen::MatrixXd H = observation_matrix(n, mode);
  const Eigen::MatrixXd R = observation_covariance(scheme, mode);

  const Eigen::MatrixXd innovation_cov = symmetrized(H * Ppred * H.transpose() + R);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(innovation_cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw SingularInnovationError("innovation covariance is numerically singular at step " +
                                  std::to_string(state.k + 1));

  // G = Ppred H' S^{-1}; solve S X = H Ppred and transpose (S symmetric).
  const Eigen::MatrixXd gain = ldlt.solve(H * Ppred).transpose();

  KfStepResult result;
  result.gain = gain;
  result.state.k = state.k + 1;
  result.state.xhat = xpred + gain * (obs - H * xpred);
  result.state.P = symmetrized((Eigen::MatrixXd::Identity(n, n) - gain * H) * Ppred);
  return result;
}

std::pair<double, double> trace_bounds(const NoiseScheme& scheme, const Eigen::MatrixXd& W,
                                       const AdversaryMode& mode) {
  const int n = scheme.dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd W_inv = W.llt().solve(I);
  if (!mode.is_colluding()) {
    const Eigen::MatrixXd R = observation_covariance(scheme, mode);
    const Eigen::MatrixXd R_inv = R.llt().solve(I);
    const Eigen::MatrixXd sum = W_inv + R_inv;
    return {sum.llt().solve(I).trace(), R.trace()};
  }
  const Eigen::MatrixXd Ra_inv = effective_alpha_covariance(scheme).llt().solve(I);
  const Eigen::MatrixXd Rb_inv = scheme.Rbeta.llt().solve(I);
  const Eigen::MatrixXd info = Ra_inv + Rb_inv;  // H' bmR^{-1} H
  const Eigen::MatrixXd info_w = info + W_inv;
  return {info_w.llt().solve(I).trace(), info.llt().solve(I).trace()};
}

}  // namespace privlq
