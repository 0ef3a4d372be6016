#include <benchmark/benchmark.h>

#include "privlq/analysis.hpp"
#include "privlq/lqr.hpp"
#include "privlq/sim.hpp"
#include "test_util.hpp"

using namespace privlq;

namespace {

void BM_GainSchedule(benchmark::State& state) {
  const SystemModel model = testutil::paper_model();
  for (auto _ : state) benchmark::DoNotOptimize(compute_gain_schedule(model));
}
BENCHMARK(BM_GainSchedule);

void BM_ClosedLoopRun(benchmark::State& state) {
  const SystemModel model = testutil::paper_model();
  const NoiseScheme scheme = testutil::paper_scheme_fixed();
  const std::vector<AdversaryMode> adversaries = {AdversaryMode::non_colluding(Side::Alpha),
                                                  AdversaryMode::non_colluding(Side::Beta)};
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_closed_loop(model, scheme, adversaries, RngStream(++seed, 0)));
}
BENCHMARK(BM_ClosedLoopRun);

void BM_EncodeRestore(benchmark::State& state) {
  const NoiseScheme scheme = testutil::paper_scheme_fixed();
  RngStream rng(1, 0);
  Eigen::VectorXd x(2);
  x << 1.5, 0.0;
  Eigen::MatrixXd L(1, 2);
  L << 0.34, -1.0;
  for (auto _ : state) {
    const NoiseDraw draw = generate_noise(scheme, 0, rng);
    const BlurredStatePair pair = encode(x, draw);
    benchmark::DoNotOptimize(restore(L * pair.x_alpha, L * pair.x_beta, draw.rho_used));
  }
}
BENCHMARK(BM_EncodeRestore);

void BM_DisclosureMc(benchmark::State& state) {
  const SystemModel model = testutil::paper_model();
  const NoiseScheme scheme = testutil::paper_scheme_collusion();
  const SimTrace trace =
      run_closed_loop(model, scheme, {AdversaryMode::colluding()}, RngStream(3, 0));
  const auto coeffs = build_error_coefficients(trace.adversaries[0].gains, static_cast<int>(state.range(0)),
                                               AdversaryMode::colluding());
  RngStream rng(4, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(disclosure_mc(coeffs, scheme, model.W, 0.4, 10000, rng));
}
BENCHMARK(BM_DisclosureMc)->Arg(5)->Arg(20)->Arg(59);

void BM_DisclosureProfile(benchmark::State& state) {
  const SystemModel model = testutil::paper_model();
  const NoiseScheme scheme = testutil::paper_scheme_collusion();
  const SimTrace trace =
      run_closed_loop(model, scheme, {AdversaryMode::colluding()}, RngStream(5, 0));
  RngStream rng(6, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(disclosure_profile_mc(trace.adversaries[0].gains, scheme, model.W, 0.4,
                                                   static_cast<std::int64_t>(state.range(0)), rng,
                                                   AdversaryMode::colluding()));
}
BENCHMARK(BM_DisclosureProfile)->Arg(10000)->Arg(100000);

void BM_GaussianBallProbability(benchmark::State& state) {
  Eigen::MatrixXd P(2, 2);
  P << 2.0, 0.7, 0.7, 0.9;
  for (auto _ : state) benchmark::DoNotOptimize(disclosure_gaussian(P, 0.8));
}
BENCHMARK(BM_GaussianBallProbability);

}  // namespace

BENCHMARK_MAIN();
