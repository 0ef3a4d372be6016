#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>
#include <vector>

#include "privlq/adversary.hpp"
#include "privlq/analysis.hpp"
#include "privlq/lqr.hpp"
#include "privlq/model.hpp"
#include "privlq/privacy.hpp"
#include "privlq/rng.hpp"

namespace privlq {

/// One hop on the plant-controller channel. Channels are reliable, in-order
/// and lossless; the scheduler is k-synchronous.
struct Message {
  enum class Kind { StateToController, ControlToPlant };
  Kind kind = Kind::StateToController;
  int k = 0;
  Side side = Side::Alpha;
  Eigen::VectorXd payload;
  std::int64_t sequence = 0;
};

/// Everything one adversary left behind: per-step estimate, covariance and
/// trace, the gain history for the error-coefficient analysis, and the
/// analytic trace bounds of its mode.
struct AdversaryTrace {
  AdversaryMode mode;
  CollusionInit init = CollusionInit::Fused;
  std::vector<Eigen::VectorXd> xhat;   // k = 0..N-1
  std::vector<Eigen::MatrixXd> P;      // k = 0..N-1
  std::vector<double> trace_P;         // k = 0..N-1
  GainRecord gains;
  double trace_lower = 0.0;
  double trace_upper = 0.0;
};

struct SimTrace {
  int n = 0, m = 0, N = 0;
  std::vector<Eigen::VectorXd> x;          // k = 0..N
  std::vector<Eigen::VectorXd> u;          // applied control, k = 0..N-1
  std::vector<Eigen::VectorXd> u_nominal;  // L(k) x(k) from the true state
  std::vector<Eigen::VectorXd> x_alpha, x_beta;
  std::vector<Eigen::VectorXd> u_alpha, u_beta;
  std::vector<double> rho;
  std::vector<Eigen::VectorXd> w;
  std::vector<AdversaryTrace> adversaries;
  std::vector<Message> messages;
  double cost = 0.0;
  /// max over k of ||u(k) - L(k)x(k)||_inf / (1 + ||L(k)x(k)||_inf)
  double max_restoration_residual = 0.0;
};

struct SimOptions {
  bool restorer_enabled = true;  // off: apply the beta-side reply raw
  CollusionInit collusion_init = CollusionInit::Fused;
  const std::vector<Eigen::VectorXd>* w_override = nullptr;  // length N process-noise sequence
};

/// x(k+1) = A x(k) + B u(k) + w(k); the one place the plant recursion lives.
Eigen::VectorXd plant_step(const SystemModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& w);

/// Runs the encoder / two-controller / restorer loop for k = 0..N-1 with the
/// configured adversary estimators riding on their observation streams.
/// Deterministic given the stream: equal seeds give bit-identical traces.
SimTrace run_closed_loop(const SystemModel& model, const NoiseScheme& scheme,
                         const std::vector<AdversaryMode>& adversaries, RngStream rng, SimOptions options = {});

struct PairedCostResult {
  double j_privacy_mean = 0.0;
  double j_plain_mean = 0.0;
  double delta_j_mean = 0.0;
  double delta_j_stderr = 0.0;
  std::vector<double> delta_j;       // per run
  std::vector<double> j_plain;       // per run
  std::vector<double> j_privacy;     // per run
};

/// For each run one w-sequence is drawn and replayed through both the
/// privacy-scheme rollout and a plain rollout (u = L x directly); DeltaJ is
/// computed per run on identical noise. restorer_enabled = false emulates a
/// single-controller added-noise scheme (the beta-side control applied raw).
PairedCostResult paired_cost_experiment(const SystemModel& model, const NoiseScheme& scheme, RngStream rng,
                                        int runs, bool restorer_enabled = true);

struct CollusionResult {
  SimTrace trace;
  PrivacyReport report;
};

/// RandomRho run with the colluding estimator on the stacked observations,
/// plus its per-step disclosure report against the collusion bound.
CollusionResult collusion_experiment(const SystemModel& model, const NoiseScheme& scheme, RngStream rng,
                                     double epsilon, std::int64_t mc_samples,
                                     CollusionInit init = CollusionInit::Fused);

/// Fixed header: k, x_*, u_*, xt_a_*, xt_b_*, ut_a_*, ut_b_*, rho, w_*, then
/// per adversary <tag>_xhat_*, <tag>_trP, <tag>_trP_lo, <tag>_trP_hi.
void write_trace_csv(std::ostream& out, const SimTrace& trace);

}  // namespace privlq
