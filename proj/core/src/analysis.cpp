#include "privlq/analysis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "privlq/errors.hpp"
#include "privlq/linalg.hpp"

namespace privlq {

namespace {

int state_dim_of(const GainRecord& record) {
  if (record.F.empty()) throw InsufficientHistoryError("gain record holds no closed-loop matrices");
  return static_cast<int>(record.F.front().rows());
}

void check_history(const GainRecord& record, int k) {
  if (k < 0) throw InsufficientHistoryError("step index must be non-negative");
  if (k > record.last_step() || static_cast<int>(record.F.size()) < k)
    throw InsufficientHistoryError("gain record covers steps up to " + std::to_string(record.last_step()) +
                                   ", requested k = " + std::to_string(k));
}

}  // namespace

Eigen::MatrixXd ErrorCoefficients::dense() const {
  Eigen::MatrixXd C(n, gamma_dim());
  for (int i = 0; i < block_count(); ++i) C.middleCols(i * n, n) = blocks[i];
  return C;
}

Eigen::VectorXd ErrorCoefficients::apply(const Eigen::VectorXd& gamma) const {
  if (gamma.size() != gamma_dim())
    throw DimensionMismatchError("gamma has length " + std::to_string(gamma.size()) + ", expected " +
                                 std::to_string(gamma_dim()));
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < block_count(); ++i) e += blocks[i] * gamma.segment(i * n, n);
  return e;
}

ErrorCoefficients build_error_coefficients(const GainRecord& record, int k, const AdversaryMode& mode,
                                           CollusionInit init) {
  check_history(record, k);
  const int n = state_dim_of(record);
  const bool colluding = mode.is_colluding();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  ErrorCoefficients coeffs;
  coeffs.k = k;
  coeffs.n = n;
  coeffs.mode = mode;
  coeffs.init = init;

  if (k == 0) {
    // e(0) = -theta(0) non-colluding; the colluding first slot carries e(0) itself.
    coeffs.blocks.assign(1, colluding ? I : Eigen::MatrixXd(-I));
    return coeffs;
  }

  // update_factor(t) = I - G(t)      (non-colluding)
  //                  = I - G(t) H    (colluding, H = [I; I])
  auto update_factor = [&](int t) -> Eigen::MatrixXd {
    const Eigen::MatrixXd& G = record.G[t];
    if (!colluding) return I - G;
    return I - G.leftCols(n) - G.rightCols(n);
  };

  // T[j] = T(k,j) = update_factor(k) F(k-1) ... update_factor(j+1) F(j), T[k] = I.
  std::vector<Eigen::MatrixXd> T(k + 1);
  T[k] = I;
  for (int j = k - 1; j >= 0; --j) T[j] = T[j + 1] * update_factor(j + 1) * record.F[j];

  if (!colluding) {
    coeffs.blocks.resize(2 * k + 1);
    coeffs.blocks[0] = -T[0];
    for (int j = 1; j < k; ++j) coeffs.blocks[j] = -T[j] * record.G[j];
    coeffs.blocks[k] = -record.G[k];
    for (int j = 0; j <= k - 2; ++j) coeffs.blocks[k + 1 + j] = T[j + 1] * update_factor(j + 1);
    coeffs.blocks[2 * k] = update_factor(k);
    return coeffs;
  }

  coeffs.blocks.resize(3 * k + 1);
  coeffs.blocks[0] = T[0];  // applied to the realized e(0)
  for (int j = 1; j < k; ++j) {
    coeffs.blocks[j] = -T[j] * record.G[j].leftCols(n);       // alpha(j)
    coeffs.blocks[k + j] = -T[j] * record.G[j].rightCols(n);  // beta(j)
  }
  coeffs.blocks[k] = -record.G[k].leftCols(n);        // alpha(k)
  coeffs.blocks[2 * k] = -record.G[k].rightCols(n);   // beta(k)
  for (int j = 0; j <= k - 2; ++j) coeffs.blocks[2 * k + 1 + j] = T[j + 1] * update_factor(j + 1);
  coeffs.blocks[3 * k] = update_factor(k);
  return coeffs;
}

CollusionInitWeights collusion_init_weights(const NoiseScheme& scheme, CollusionInit init) {
  const int n = scheme.dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  switch (init) {
    case CollusionInit::AlphaSided: return {I, Eigen::MatrixXd::Zero(n, n)};
    case CollusionInit::BetaSided: return {Eigen::MatrixXd::Zero(n, n), I};
    case CollusionInit::Fused: break;
  }
  const Eigen::MatrixXd Ra_inv = effective_alpha_covariance(scheme).llt().solve(I);
  const Eigen::MatrixXd Rb_inv = scheme.Rbeta.llt().solve(I);
  const Eigen::MatrixXd info = Ra_inv + Rb_inv;
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  return {llt.solve(Ra_inv), llt.solve(Rb_inv)};
}

Eigen::VectorXd error_recursion_oracle(const std::vector<Eigen::VectorXd>& theta_seq,
                                       const std::vector<Eigen::VectorXd>& w_seq, const GainRecord& record,
                                       const AdversaryMode& mode, const NoiseScheme& scheme,
                                       CollusionInit init) {
  if (theta_seq.empty()) throw DimensionMismatchError("theta_seq must hold theta(0..k)");
  const int k = static_cast<int>(theta_seq.size()) - 1;
  if (static_cast<int>(w_seq.size()) != k)
    throw DimensionMismatchError("w_seq must hold w(0..k-1), expected length " + std::to_string(k));
  check_history(record, k);
  const int n = state_dim_of(record);
  const bool colluding = mode.is_colluding();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  Eigen::VectorXd e;
  if (!colluding) {
    e = -theta_seq[0];
  } else {
    const CollusionInitWeights weights = collusion_init_weights(scheme, init);
    e = -(weights.Ka * theta_seq[0].head(n) + weights.Kb * theta_seq[0].tail(n));
  }

  for (int t = 1; t <= k; ++t) {
    const Eigen::MatrixXd& G = record.G[t];
    Eigen::MatrixXd update = colluding ? Eigen::MatrixXd(I - G.leftCols(n) - G.rightCols(n))
                                       : Eigen::MatrixXd(I - G);
    e = -G * theta_seq[t] + update * w_seq[t - 1] + update * record.F[t - 1] * e;
  }
  return e;
}

ReducedError svd_reduce(const ErrorCoefficients& coeffs) {
  const Eigen::MatrixXd C = coeffs.dense();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  ReducedError reduced;
  reduced.r = r;
  reduced.singular_values = sv.head(r);
  reduced.V = svd.matrixV().transpose();  // rows are right singular vectors
  return reduced;
}

double gamma_half_integer(int n) {
  if (n < 1) throw ParameterOutOfRangeError("gamma_half_integer requires n >= 1");
  if (n % 2 == 0) {
    double acc = 1.0;
    for (int i = 2; i <= n / 2; ++i) acc *= i;
    return acc;
  }
  double dfac = 1.0;
  for (int i = n; i >= 1; i -= 2) dfac *= i;
  return dfac * std::sqrt(std::numbers::pi) / std::pow(2.0, (n + 1) / 2.0);
}

double delta_upper_bound(const NoiseScheme& scheme, const Eigen::MatrixXd& W, double epsilon,
                         const AdversaryMode& mode) {
  if (scheme.family != NoiseFamily::Gaussian)
    throw ParameterOutOfRangeError("the closed-form bound assumes Gaussian beta noise");
  if (!(epsilon > 0.0)) throw ParameterOutOfRangeError("epsilon must be positive");
  const int n = scheme.dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd W_inv = W.llt().solve(I);
  const double norm = std::pow(epsilon, n) / (std::pow(2.0, n / 2.0) * gamma_half_integer(n));

  if (!mode.is_colluding()) {
    const Eigen::MatrixXd R = observation_covariance(scheme, mode);
    const Eigen::MatrixXd sum = R.llt().solve(I) + W_inv;
    return std::min(norm * std::sqrt(sum.determinant()), 1.0);
  }

  const Eigen::MatrixXd Ra_inv = effective_alpha_covariance(scheme).llt().solve(I);
  const Eigen::MatrixXd Rb_inv = scheme.Rbeta.llt().solve(I);
  const Eigen::MatrixXd sum = Ra_inv + Rb_inv + W_inv;
  const double det_Rb = scheme.Rbeta.determinant();
  const double R_rho = scheme.rho_second_moment();
  const double R_rho_2n = std::pow(R_rho, 2 * n);
  std::vector<double> members;
  if (const auto* random = std::get_if<RandomRho>(&scheme.rho_mode)) {
    members = random->values;
  } else {
    members = {std::get<FixedRho>(scheme.rho_mode).rho};
  }
  double delta_sum = 0.0;
  for (double m : members) delta_sum += std::sqrt(det_Rb / (1.0 + m * m / R_rho_2n));
  const double Delta = delta_sum / static_cast<double>(members.size());
  return std::min(norm * sum.determinant() * Delta, 1.0);
}

double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

namespace {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Acklam's rational approximation to the standard normal quantile.
double acklam_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,  -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01, -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double p_low = 0.02425;
  double q, r;
  if (p < p_low) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_quantile_upper(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterOutOfRangeError("tail probability must lie in (0,1)");
  // Q(x) = p  <=>  Phi(x) = 1 - p.
  double x = acklam_quantile(1.0 - p);
  // Two Newton steps on Q(x) - p drive the error to ~1e-15.
  for (int it = 0; it < 2; ++it) {
    const double err = normal_upper_tail(x) - p;
    x += err / normal_pdf(x);
  }
  return x;
}

DpParams dp_calibrate(double epsilon, double gamma, double b) {
  if (!(epsilon > 0.0)) throw ParameterOutOfRangeError("epsilon must be positive");
  if (!(gamma > 0.0 && gamma < 0.5)) throw ParameterOutOfRangeError("gamma must lie in (0, 1/2)");
  if (!(b > 0.0)) throw ParameterOutOfRangeError("adjacency radius b must be positive");
  const double K = normal_quantile_upper(gamma);
  DpParams params;
  params.epsilon = epsilon;
  params.gamma = gamma;
  params.b = b;
  params.r_min = b / (2.0 * epsilon) * (K + std::sqrt(K * K + 2.0 * epsilon));
  return params;
}

bool dp_verify(double r, double epsilon, double gamma, double b) {
  if (!(r > 0.0)) throw ParameterOutOfRangeError("noise standard deviation r must be positive");
  if (!(epsilon > 0.0)) throw ParameterOutOfRangeError("epsilon must be positive");
  if (!(gamma > 0.0 && gamma < 0.5)) throw ParameterOutOfRangeError("gamma must lie in (0, 1/2)");
  if (!(b > 0.0)) throw ParameterOutOfRangeError("adjacency radius b must be positive");
  const double arg = epsilon * r / b - b / (2.0 * r);
  return normal_upper_tail(arg) <= gamma + 1e-10 + 1e-9 * gamma;
}

void write_privacy_report_csv(std::ostream& out, const PrivacyReport& report) {
  out << "k,trP,trP_lo,trP_hi,delta,delta_stderr,delta_bar,method\n";
  char buf[512];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", row.k, row.trace_P,
                  row.trace_lower, row.trace_upper, row.delta.delta, row.delta.stderr_value, row.delta_bar,
                  row.delta.method == DisclosureMethod::ClosedForm ? "closed_form" : "monte_carlo");
    out << buf;
  }
}

}  // namespace privlq
