#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "privlq/analysis.hpp"
#include "privlq/errors.hpp"
#include "privlq/linalg.hpp"

namespace privlq {

namespace {

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// P(lambda z^2 <= c) for z ~ N(0,1).
double ball_prob_1d(double c, double lambda) {
  if (c <= 0.0) return 0.0;
  return std::erf(std::sqrt(c / lambda) / std::numbers::sqrt2);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// P(sum_i lambda_i z_i^2 <= c), lambdas sorted descending, recursive
// whitened-quadrature evaluation for 2 or 3 terms.
double ball_prob_recursive(const std::vector<double>& lambdas, std::size_t first, double c, double tol) {
  const std::size_t remaining = lambdas.size() - first;
  if (c <= 0.0) return 0.0;
  if (remaining == 1) return ball_prob_1d(c, lambdas[first]);
  const double lambda = lambdas[first];
  const double a = std::sqrt(c / lambda);
  auto integrand = [&](double t) {
    return 2.0 * std_normal_pdf(t) * ball_prob_recursive(lambdas, first + 1, c - lambda * t * t, tol * 0.1);
  };
  return integrate(integrand, 0.0, a, tol);
}

}  // namespace

DisclosureEstimate disclosure_gaussian(const Eigen::MatrixXd& P, double epsilon, std::int64_t mc_samples,
                                       RngStream rng) {
  if (P.rows() != P.cols()) throw NotPsdError("covariance must be square");
  if (!is_symmetric(P, 1e-8)) throw NotPsdError("covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(P));
  if (es.info() != Eigen::Success) throw NotPsdError("eigendecomposition of the covariance failed");
  const double max_eig = std::max(0.0, es.eigenvalues().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, max_eig))
    throw NotPsdError("covariance has a negative eigenvalue");

  // Zero modes carry no probability mass away from the origin; drop them.
  std::vector<double> lambdas;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = es.eigenvalues()(i);
    if (v > 1e-14 * std::max(1.0, max_eig)) lambdas.push_back(v);
  }
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());

  DisclosureEstimate est;
  est.method = DisclosureMethod::ClosedForm;
  const double c = epsilon * epsilon;
  if (lambdas.empty()) {
    est.delta = epsilon >= 0.0 ? 1.0 : 0.0;
    return est;
  }
  if (epsilon <= 0.0) {
    est.delta = 0.0;
    return est;
  }
  if (lambdas.size() == 1) {
    est.delta = ball_prob_1d(c, lambdas[0]);
    return est;
  }
  if (lambdas.size() <= 3) {
    est.delta = std::clamp(ball_prob_recursive(lambdas, 0, c, 1e-8), 0.0, 1.0);
    return est;
  }

  // High dimension: Monte Carlo over the whitened representation.
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < mc_samples; ++s) {
    double acc = 0.0;
    for (double lambda : lambdas) {
      const double z = rng.gaussian();
      acc += lambda * z * z;
    }
    if (acc <= c) ++hits;
  }
  est.method = DisclosureMethod::MonteCarlo;
  est.samples = mc_samples;
  est.delta = static_cast<double>(hits) / static_cast<double>(mc_samples);
  est.stderr_value = std::sqrt(est.delta * (1.0 - est.delta) / static_cast<double>(mc_samples));
  return est;
}

namespace {

// Per-sample noise source for the gamma vector: standardized i.i.d.
// components of the configured family mixed by chol(Rbeta).
class ThetaSampler {
 public:
  ThetaSampler(const NoiseScheme& scheme, RngStream& rng)
      : scheme_(scheme), rng_(rng), chol_(Eigen::LLT<Eigen::MatrixXd>(scheme.Rbeta).matrixL()) {}

  Eigen::VectorXd draw_beta() {
    const int n = scheme_.dim();
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) {
      switch (scheme_.family) {
        case NoiseFamily::Gaussian: z(i) = rng_.gaussian(); break;
        case NoiseFamily::Uniform: z(i) = rng_.uniform_unit(); break;
        case NoiseFamily::Laplace: z(i) = rng_.laplace_unit(); break;
      }
    }
    return chol_ * z;
  }

  double draw_rho() { return sample_rho(scheme_, rng_); }

 private:
  const NoiseScheme& scheme_;
  RngStream& rng_;
  Eigen::MatrixXd chol_;
};

}  // namespace

DisclosureEstimate disclosure_mc(const ErrorCoefficients& coeffs, const NoiseScheme& scheme,
                                 const Eigen::MatrixXd& W, double epsilon, std::int64_t samples,
                                 RngStream& rng) {
  if (samples < 1) throw ParameterOutOfRangeError("samples must be >= 1");
  const int n = coeffs.n;
  const int k = coeffs.k;
  const bool colluding = coeffs.mode.is_colluding();
  ThetaSampler sampler(scheme, rng);
  const Eigen::MatrixXd chol_w = Eigen::LLT<Eigen::MatrixXd>(W).matrixL();
  CollusionInitWeights init_weights;
  if (colluding) init_weights = collusion_init_weights(scheme, coeffs.init);

  const double c = epsilon * epsilon;
  std::int64_t hits = 0;
  Eigen::VectorXd gamma(coeffs.gamma_dim());
  Eigen::VectorXd wz(n);
  for (std::int64_t s = 0; s < samples; ++s) {
    if (!colluding) {
      for (int t = 0; t <= k; ++t) {
        Eigen::VectorXd beta = sampler.draw_beta();
        const double rho = sampler.draw_rho();
        gamma.segment(t * n, n) = coeffs.mode.side == Side::Alpha ? Eigen::VectorXd(rho * beta) : beta;
      }
      for (int t = 0; t < k; ++t) {
        for (int i = 0; i < n; ++i) wz(i) = rng.gaussian();
        gamma.segment((k + 1 + t) * n, n) = chol_w * wz;
      }
    } else {
      // Slot 0 carries the realized e(0) = -(Ka alpha(0) + Kb beta(0)).
      Eigen::VectorXd beta0 = sampler.draw_beta();
      const double rho0 = sampler.draw_rho();
      gamma.segment(0, n) = -(init_weights.Ka * (rho0 * beta0) + init_weights.Kb * beta0);
      for (int t = 1; t <= k; ++t) {
        Eigen::VectorXd beta = sampler.draw_beta();
        const double rho = sampler.draw_rho();
        gamma.segment(t * n, n) = rho * beta;        // alpha(t)
        gamma.segment((k + t) * n, n) = beta;        // beta(t), Dirac-coupled
      }
      for (int t = 0; t < k; ++t) {
        for (int i = 0; i < n; ++i) wz(i) = rng.gaussian();
        gamma.segment((2 * k + 1 + t) * n, n) = chol_w * wz;
      }
    }
    if (coeffs.apply(gamma).squaredNorm() <= c) ++hits;
  }

  DisclosureEstimate est;
  est.method = DisclosureMethod::MonteCarlo;
  est.samples = samples;
  est.delta = static_cast<double>(hits) / static_cast<double>(samples);
  est.stderr_value = std::sqrt(est.delta * (1.0 - est.delta) / static_cast<double>(samples));
  return est;
}

std::vector<DisclosureEstimate> disclosure_profile_mc(const GainRecord& record, const NoiseScheme& scheme,
                                                      const Eigen::MatrixXd& W, double epsilon,
                                                      std::int64_t samples, RngStream& rng,
                                                      const AdversaryMode& mode, CollusionInit init,
                                                      int k_max) {
  if (samples < 1) throw ParameterOutOfRangeError("samples must be >= 1");
  if (k_max < 0) k_max = record.last_step();
  if (k_max > record.last_step())
    throw InsufficientHistoryError("gain record covers steps up to " + std::to_string(record.last_step()));
  const int n = static_cast<int>(record.F.front().rows());
  const bool colluding = mode.is_colluding();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  ThetaSampler sampler(scheme, rng);
  const Eigen::MatrixXd chol_w = Eigen::LLT<Eigen::MatrixXd>(W).matrixL();
  CollusionInitWeights init_weights;
  if (colluding) init_weights = collusion_init_weights(scheme, init);

  // Pre-assembled per-step update maps so the sample loop is matvec-only.
  std::vector<Eigen::MatrixXd> update(k_max + 1), propagate(k_max + 1);
  for (int t = 1; t <= k_max; ++t) {
    const Eigen::MatrixXd& G = record.G[t];
    update[t] = colluding ? Eigen::MatrixXd(I - G.leftCols(n) - G.rightCols(n)) : Eigen::MatrixXd(I - G);
    propagate[t] = update[t] * record.F[t - 1];
  }

  const double c = epsilon * epsilon;
  std::vector<std::int64_t> hits(k_max + 1, 0);
  Eigen::VectorXd wz(n);
  for (std::int64_t s = 0; s < samples; ++s) {
    Eigen::VectorXd beta = sampler.draw_beta();
    double rho = sampler.draw_rho();
    Eigen::VectorXd e;
    if (!colluding) {
      e = mode.side == Side::Alpha ? Eigen::VectorXd(-(rho * beta)) : Eigen::VectorXd(-beta);
    } else {
      e = -(init_weights.Ka * (rho * beta) + init_weights.Kb * beta);
    }
    if (e.squaredNorm() <= c) ++hits[0];
    for (int t = 1; t <= k_max; ++t) {
      for (int i = 0; i < n; ++i) wz(i) = rng.gaussian();
      const Eigen::VectorXd w = chol_w * wz;
      beta = sampler.draw_beta();
      rho = sampler.draw_rho();
      if (!colluding) {
        const Eigen::VectorXd theta = mode.side == Side::Alpha ? Eigen::VectorXd(rho * beta) : beta;
        e = (-record.G[t] * theta + update[t] * w + propagate[t] * e).eval();
      } else {
        Eigen::VectorXd theta(2 * n);
        theta.head(n) = rho * beta;
        theta.tail(n) = beta;
        e = (-record.G[t] * theta + update[t] * w + propagate[t] * e).eval();
      }
      if (e.squaredNorm() <= c) ++hits[t];
    }
  }

  std::vector<DisclosureEstimate> profile(k_max + 1);
  for (int t = 0; t <= k_max; ++t) {
    DisclosureEstimate est;
    est.method = DisclosureMethod::MonteCarlo;
    est.samples = samples;
    est.delta = static_cast<double>(hits[t]) / static_cast<double>(samples);
    est.stderr_value = std::sqrt(est.delta * (1.0 - est.delta) / static_cast<double>(samples));
    profile[t] = est;
  }
  return profile;
}

}  // namespace privlq
