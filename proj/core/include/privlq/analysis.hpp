#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>
#include <vector>

#include "privlq/adversary.hpp"
#include "privlq/privacy.hpp"
#include "privlq/rng.hpp"

namespace privlq {

/// Linear map from the stacked noise history gamma(k) to the estimation
/// error e(k), stored as ordered n x n blocks.
///
/// Non-colluding (2k+1 blocks), gamma = [theta(0..k); w(0..k-1)]:
///   theta(0): -T(k,0)        theta(j): -T(k,j) G(j)        theta(k): -G(k)
///   w(j):      T(k,j+1)[I-G(j+1)]                          w(k-1):  I-G(k)
/// with T(k,j) = [I-G(k)]F(k-1) ... [I-G(j+1)]F(j).
///
/// Colluding (3k+1 blocks), gamma = [e(0); alpha(1..k); beta(1..k); w(0..k-1)]:
/// same structure with H = [I;I], G = [G1 G2], and the first block T_H(k,0)
/// applied to the realized initial error e(0) (which the init mode determines
/// from alpha(0), beta(0)).
struct ErrorCoefficients {
  int k = 0;
  int n = 0;
  AdversaryMode mode;
  CollusionInit init = CollusionInit::Fused;
  std::vector<Eigen::MatrixXd> blocks;

  int block_count() const { return static_cast<int>(blocks.size()); }
  int gamma_dim() const { return block_count() * n; }
  Eigen::MatrixXd dense() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& gamma) const;
};

ErrorCoefficients build_error_coefficients(const GainRecord& record, int k, const AdversaryMode& mode,
                                           CollusionInit init = CollusionInit::Fused);

/// Weights of the colluding filter's initial error:
/// e(0) = -(Ka alpha(0) + Kb beta(0)).
struct CollusionInitWeights {
  Eigen::MatrixXd Ka;
  Eigen::MatrixXd Kb;
};
CollusionInitWeights collusion_init_weights(const NoiseScheme& scheme, CollusionInit init);

/// Stepwise error recursion, the independent oracle for the block formulas:
///   e(t) = -G(t) theta(t) + [I-G(t)H] w(t-1) + [I-G(t)H] F(t-1) e(t-1)
/// starting from e(0) = -theta(0) (non-colluding; theta entries length n) or
/// the init-mode map of theta(0) = [alpha(0); beta(0)] (colluding; length 2n).
/// theta_seq holds theta(0..k), w_seq holds w(0..k-1).
Eigen::VectorXd error_recursion_oracle(const std::vector<Eigen::VectorXd>& theta_seq,
                                       const std::vector<Eigen::VectorXd>& w_seq, const GainRecord& record,
                                       const AdversaryMode& mode, const NoiseScheme& scheme,
                                       CollusionInit init = CollusionInit::Fused);

/// Thin SVD of the dense C(k) with full right factor; rank counts singular
/// values above 1e-10 * largest. ||C gamma|| = ||diag(sv) (V gamma)_{1:r}||.
struct ReducedError {
  Eigen::VectorXd singular_values;  // the r kept values, descending
  Eigen::MatrixXd V;                // gamma_dim x gamma_dim, rows of V' in SVD C = O S V'
  int r = 0;
};
ReducedError svd_reduce(const ErrorCoefficients& coeffs);

enum class DisclosureMethod { ClosedForm, MonteCarlo };

struct DisclosureEstimate {
  double delta = 0.0;
  double stderr_value = 0.0;  // 0 for closed form
  DisclosureMethod method = DisclosureMethod::ClosedForm;
  std::int64_t samples = 0;
};

/// P(||e|| <= epsilon) for e ~ N(0, P): error function for n = 1, whitened
/// generalized-chi-square quadrature (absolute tolerance 1e-6) for n in {2,3},
/// Monte Carlo with reported stderr above that.
DisclosureEstimate disclosure_gaussian(const Eigen::MatrixXd& P, double epsilon,
                                       std::int64_t mc_samples = 100000,
                                       RngStream rng = RngStream(0x9e3779b9, 0));

/// Monte Carlo estimate of P(||C gamma|| <= epsilon) with gamma drawn from
/// the configured laws: theta per scheme (colluding: rho(t) from M, then
/// alpha = rho beta), w Gaussian with covariance W.
DisclosureEstimate disclosure_mc(const ErrorCoefficients& coeffs, const NoiseScheme& scheme,
                                 const Eigen::MatrixXd& W, double epsilon, std::int64_t samples,
                                 RngStream& rng);

/// Per-step Monte Carlo disclosure profile for k = 0..k_max, estimated by
/// running the error recursion along sampled noise paths; each step's
/// estimate has the same law as disclosure_mc at that k.
std::vector<DisclosureEstimate> disclosure_profile_mc(const GainRecord& record, const NoiseScheme& scheme,
                                                      const Eigen::MatrixXd& W, double epsilon,
                                                      std::int64_t samples, RngStream& rng,
                                                      const AdversaryMode& mode,
                                                      CollusionInit init = CollusionInit::Fused,
                                                      int k_max = -1);

/// Closed-form upper bound on the disclosure probability for Gaussian beta:
///   non-colluding: min{ eps^n sqrt(|R^{-1}+W^{-1}|) / (2^{n/2} Gamma(n/2+1)), 1 }
///   colluding:     min{ eps^n |Ra^{-1}+Rb^{-1}+W^{-1}| Delta / (2^{n/2} Gamma(n/2+1)), 1 }
/// with Delta = (1/M) sum_i sqrt(|Rb| / (1 + m_i^2 / R_rho^{2n})).
double delta_upper_bound(const NoiseScheme& scheme, const Eigen::MatrixXd& W, double epsilon,
                         const AdversaryMode& mode);

/// Gamma(n/2 + 1) by the parity-split factorial/double-factorial formula.
double gamma_half_integer(int n);

/// Upper-tail standard normal quantile: x with Q(x) = p, accurate to 1e-10.
double normal_quantile_upper(double p);

/// Upper-tail standard normal probability Q(x) = P(Z >= x).
double normal_upper_tail(double x);

struct DpParams {
  double epsilon = 0.0;  // DP privacy parameter
  double gamma = 0.0;    // tail probability in (0, 1/2)
  double b = 0.0;        // l2 adjacency radius
  double r_min = 0.0;    // required per-axis noise standard deviation
};

/// r_min = (b / 2 epsilon) (K + sqrt(K^2 + 2 epsilon)), K = Q^{-1}(gamma).
DpParams dp_calibrate(double epsilon, double gamma, double b);

/// true iff Q(epsilon r / b - b / (2r)) <= gamma at the worst adjacency.
bool dp_verify(double r, double epsilon, double gamma, double b);

struct PrivacyReportRow {
  int k = 0;
  double trace_P = 0.0;
  double trace_lower = 0.0;
  double trace_upper = 0.0;
  DisclosureEstimate delta;
  double delta_bar = 0.0;
};

/// Per-step privacy quantification of one adversary along one run.
struct PrivacyReport {
  AdversaryMode mode;
  double epsilon = 0.0;
  std::vector<PrivacyReportRow> rows;
};

/// Assembles the per-step report from one adversary's run history.
/// delta(k) is closed-form (Theorem-style Gaussian ball probability of
/// P_history[k]) whenever the error is exactly Gaussian -- Gaussian family,
/// non-colluding, and not the alpha side of a RandomRho scheme -- and n <= 3;
/// otherwise Monte Carlo over the noise history at `mc_samples` paths.
/// delta_bar is the Gaussian closed-form bound (NaN for non-Gaussian beta).
PrivacyReport make_privacy_report(const AdversaryMode& mode, CollusionInit init,
                                  const std::vector<Eigen::MatrixXd>& P_history, const GainRecord& record,
                                  const NoiseScheme& scheme, const Eigen::MatrixXd& W, double epsilon,
                                  std::int64_t mc_samples, RngStream rng);

/// Columns: k, trP, trP_lo, trP_hi, delta, delta_stderr, delta_bar, method.
void write_privacy_report_csv(std::ostream& out, const PrivacyReport& report);

}  // namespace privlq
