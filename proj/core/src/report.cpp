#include <cmath>
#include <limits>

#include "privlq/analysis.hpp"
#include "privlq/errors.hpp"

namespace privlq {

PrivacyReport make_privacy_report(const AdversaryMode& mode, CollusionInit init,
                                  const std::vector<Eigen::MatrixXd>& P_history, const GainRecord& record,
                                  const NoiseScheme& scheme, const Eigen::MatrixXd& W, double epsilon,
                                  std::int64_t mc_samples, RngStream rng) {
  if (P_history.empty()) throw InsufficientHistoryError("privacy report needs at least one recorded step");
  const int steps = static_cast<int>(P_history.size());
  const int n = scheme.dim();

  const bool gaussian_error = scheme.family == NoiseFamily::Gaussian && !mode.is_colluding() &&
                              !(mode.side == Side::Alpha && scheme.is_random_rho());
  const bool closed_form = gaussian_error && n <= 3;

  double delta_bar = std::numeric_limits<double>::quiet_NaN();
  if (scheme.family == NoiseFamily::Gaussian) delta_bar = delta_upper_bound(scheme, W, epsilon, mode);

  const auto bounds = trace_bounds(scheme, W, mode);

  PrivacyReport report;
  report.mode = mode;
  report.epsilon = epsilon;
  report.rows.resize(steps);

  std::vector<DisclosureEstimate> profile;
  if (!closed_form)
    profile = disclosure_profile_mc(record, scheme, W, epsilon, mc_samples, rng, mode, init, steps - 1);

  for (int k = 0; k < steps; ++k) {
    PrivacyReportRow& row = report.rows[k];
    row.k = k;
    row.trace_P = P_history[k].trace();
    row.trace_lower = bounds.first;
    row.trace_upper = bounds.second;
    row.delta_bar = delta_bar;
    row.delta = closed_form ? disclosure_gaussian(P_history[k], epsilon) : profile[k];
  }
  return report;
}

}  // namespace privlq
