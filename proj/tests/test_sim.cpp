#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "privlq/errors.hpp"
#include "privlq/sim.hpp"
#include "test_util.hpp"

using namespace privlq;

TEST_CASE("noise-free limit follows the deterministic closed loop") {
  SystemModel model = testutil::paper_model();
  model.W = 1e-18 * Eigen::MatrixXd::Identity(2, 2);  // built directly, below the validator floor
  NoiseScheme scheme;
  scheme.family = NoiseFamily::Gaussian;
  scheme.Rbeta = 1e-18 * Eigen::MatrixXd::Identity(2, 2);
  scheme.rho_mode = FixedRho{2.0};

  const SimTrace trace = run_closed_loop(model, scheme, {}, RngStream(5, 0));
  const GainSchedule gains = compute_gain_schedule(model);
  Eigen::VectorXd x = model.x0;
  for (int k = 0; k < model.N; ++k) {
    CHECK((trace.x[k] - x).cwiseAbs().maxCoeff() < 1e-8);
    x = (model.A + model.B * gains.L[k]) * x;
  }
}

TEST_CASE("same seed gives a bit-identical trace") {
  const SystemModel model = testutil::paper_model();
  const NoiseScheme scheme = testutil::paper_scheme_collusion();
  const std::vector<AdversaryMode> adversaries = {AdversaryMode::colluding(),
                                                  AdversaryMode::non_colluding(Side::Beta)};
  const SimTrace a = run_closed_loop(model, scheme, adversaries, RngStream(77, 3));
  const SimTrace b = run_closed_loop(model, scheme, adversaries, RngStream(77, 3));
  for (int k = 0; k < model.N; ++k) {
    REQUIRE(a.x[k] == b.x[k]);
    REQUIRE(a.u[k] == b.u[k]);
    REQUIRE(a.rho[k] == b.rho[k]);
    REQUIRE(a.w[k] == b.w[k]);
    for (std::size_t i = 0; i < a.adversaries.size(); ++i) {
      REQUIRE(a.adversaries[i].xhat[k] == b.adversaries[i].xhat[k]);
      REQUIRE(a.adversaries[i].trace_P[k] == b.adversaries[i].trace_P[k]);
    }
  }
  CHECK(a.cost == b.cost);
}

TEST_CASE("paper configuration holds the restoration identity and bounds") {
  const SystemModel model = testutil::paper_model();
  const NoiseScheme scheme = testutil::paper_scheme_fixed();
  const SimTrace trace = run_closed_loop(model, scheme,
                                         {AdversaryMode::non_colluding(Side::Alpha),
                                          AdversaryMode::non_colluding(Side::Beta)},
                                         RngStream(2025, 0));
  CHECK(trace.max_restoration_residual <= 1e-10);
  for (int k = 0; k < model.N; ++k) {
    const Eigen::VectorXd recombined =
        (trace.rho[k] / (trace.rho[k] - 1.0)) * trace.u_beta[k] -
        (1.0 / (trace.rho[k] - 1.0)) * trace.u_alpha[k];
    CHECK((trace.u[k] - recombined).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + recombined.cwiseAbs().maxCoeff()));
  }
  for (const auto& at : trace.adversaries) {
    for (double tr : at.trace_P) {
      CHECK(tr >= at.trace_lower - 1e-9);
      CHECK(tr <= at.trace_upper + 1e-9);
    }
  }
}

TEST_CASE("message discipline: two state and two control messages per step") {
  const SystemModel model = testutil::paper_model();
  const SimTrace trace = run_closed_loop(model, testutil::paper_scheme_fixed(), {}, RngStream(5, 0));
  std::map<std::pair<int, int>, int> state_count, control_count;
  std::int64_t last_seq = -1;
  int last_k = 0;
  for (const auto& msg : trace.messages) {
    CHECK(msg.sequence > last_seq);
    last_seq = msg.sequence;
    CHECK(msg.k >= last_k);
    last_k = msg.k;
    auto key = std::make_pair(msg.k, msg.side == Side::Alpha ? 0 : 1);
    if (msg.kind == Message::Kind::StateToController)
      state_count[key]++;
    else
      control_count[key]++;
  }
  for (int k = 0; k < model.N; ++k) {
    for (int side = 0; side < 2; ++side) {
      CHECK(state_count[{k, side}] == 1);
      CHECK(control_count[{k, side}] == 1);
    }
  }
}

TEST_CASE("replaying the recorded inputs reproduces the states exactly") {
  const SystemModel model = testutil::paper_model();
  const SimTrace trace =
      run_closed_loop(model, testutil::paper_scheme_fixed(), {}, RngStream(6, 0));
  for (int k = 0; k < model.N; ++k) {
    const Eigen::VectorXd next = plant_step(model, trace.x[k], trace.u[k], trace.w[k]);
    CHECK(next == trace.x[k + 1]);
  }
}

TEST_CASE("paired experiment sees no cost difference with the restorer on") {
  const SystemModel model = testutil::paper_model();
  const NoiseScheme scheme = testutil::paper_scheme_fixed();
  const PairedCostResult result = paired_cost_experiment(model, scheme, RngStream(9, 0), 100);
  for (int run = 0; run < 100; ++run) {
    CHECK(std::abs(result.delta_j[run]) <= 1e-9 * std::max(1.0, std::abs(result.j_plain[run])));
  }
  CHECK(std::abs(result.delta_j_mean) <= 1e-9);
}

TEST_CASE("disabling the restorer hurts, and more so with more noise") {
  const SystemModel model = testutil::paper_model();
  double previous = 0.0;
  for (double scale : {1.0, 2.0, 4.0}) {
    NoiseScheme scheme;
    scheme.family = NoiseFamily::Gaussian;
    scheme.Rbeta = scale * Eigen::MatrixXd::Identity(2, 2);
    scheme.rho_mode = FixedRho{2.0};
    const PairedCostResult result =
        paired_cost_experiment(model, scheme, RngStream(10, 0), 60, /*restorer_enabled=*/false);
    CHECK(result.delta_j_mean > previous);
    previous = result.delta_j_mean;
  }
}

TEST_CASE("collusion experiment keeps restoration exact under sign-flipping rho") {
  SystemModel model = testutil::paper_model();
  model.N = 30;
  NoiseScheme scheme;
  scheme.family = NoiseFamily::Gaussian;
  scheme.Rbeta = 3.0 * Eigen::MatrixXd::Identity(2, 2);
  scheme.rho_mode = RandomRho{{2.0, -2.0}};
  const CollusionResult result = collusion_experiment(model, scheme, RngStream(11, 0), 0.4, 2000);
  CHECK(result.trace.max_restoration_residual <= 1e-10);
  CHECK(result.report.rows.size() == 30);

  NoiseScheme fixed = testutil::paper_scheme_fixed();
  CHECK_THROWS_AS(collusion_experiment(model, fixed, RngStream(11, 0), 0.4, 2000),
                  ParameterOutOfRangeError);
}

TEST_CASE("covariance-ratio rho recovery is no better than the filter") {
  // Colluding controllers that guess a fixed rho from |R_alpha|/|R_beta|
  // and invert the blur do not beat their own LMMSE estimate.
  const SystemModel model = testutil::paper_model();
  const NoiseScheme scheme = testutil::paper_scheme_collusion();
  const double rho_hat = std::sqrt(scheme.rho_second_moment());  // 2n-th root of |Ra|/|Rb|
  double attack_sq = 0.0, filter_sq = 0.0;
  int count = 0;
  RngStream root(12, 0);
  for (int run = 0; run < 20; ++run) {
    const SimTrace trace =
        run_closed_loop(model, scheme, {AdversaryMode::colluding()}, root.substream(run));
    for (int k = 0; k < model.N; ++k) {
      const Eigen::VectorXd beta_hat = (trace.x_alpha[k] - trace.x_beta[k]) / (rho_hat - 1.0);
      const Eigen::VectorXd x_attack = trace.x_beta[k] - beta_hat;
      attack_sq += (x_attack - trace.x[k]).squaredNorm();
      filter_sq += (trace.adversaries[0].xhat[k] - trace.x[k]).squaredNorm();
      ++count;
    }
  }
  CHECK(attack_sq / count >= filter_sq / count);
}

TEST_CASE("trace CSV has the fixed header and one row per step") {
  const SystemModel model = testutil::paper_model();
  const SimTrace trace = run_closed_loop(model, testutil::paper_scheme_fixed(),
                                         {AdversaryMode::non_colluding(Side::Alpha),
                                          AdversaryMode::non_colluding(Side::Beta)},
                                         RngStream(13, 0));
  std::ostringstream out;
  write_trace_csv(out, trace);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "k,x_1,x_2,u_1,xt_a_1,xt_a_2,xt_b_1,xt_b_2,ut_a_1,ut_b_1,rho,w_1,w_2,"
        "alpha_xhat_1,alpha_xhat_2,alpha_trP,alpha_trP_lo,alpha_trP_hi,"
        "beta_xhat_1,beta_xhat_2,beta_trP,beta_trP_lo,beta_trP_hi");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == model.N);
}

TEST_CASE("mismatched scheme dimension is rejected") {
  const SystemModel model = testutil::paper_model();
  NoiseScheme scheme;
  scheme.family = NoiseFamily::Gaussian;
  scheme.Rbeta = Eigen::MatrixXd::Identity(3, 3);
  scheme.rho_mode = FixedRho{2.0};
  CHECK_THROWS_AS(run_closed_loop(model, scheme, {}, RngStream(1, 0)), DimensionMismatchError);
}
