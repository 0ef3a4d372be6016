// Command-line experiment runner: closed-loop traces, per-step privacy
// reports, paired-cost sweeps, and DP noise calibration.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "privlq/errors.hpp"
#include "privlq/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::int64_t> samples;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config JSON")->required();
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--out", args.out_dir, "override the output directory");
  cmd->add_option("--samples", args.samples, "override mc_samples");
}

privlq::ExperimentConfig load_with_overrides(const CommonArgs& args) {
  privlq::ExperimentConfig config = privlq::load_config(args.config_path);
  if (args.seed) config.seed = *args.seed;
  if (args.out_dir) config.output_dir = *args.out_dir;
  if (args.samples) {
    if (*args.samples < 1000) throw privlq::ConfigError("--samples must be >= 1000");
    config.mc_samples = *args.samples;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privlq: two-controller added-noise privacy for networked LQ control"};
  app.require_subcommand(1);

  CommonArgs run_args, report_args, sweep_args;
  std::string sweep_param;
  std::vector<double> sweep_values;
  double dp_epsilon = 0.0, dp_gamma = 0.0, dp_b = 0.0;
  std::string dp_out;

  CLI::App* run = app.add_subcommand("run", "simulate the closed loop; writes trace.csv and summary.json");
  add_common(run, run_args);

  CLI::App* report =
      app.add_subcommand("privacy-report", "per-step disclosure probabilities and bounds per adversary");
  add_common(report, report_args);

  CLI::App* sweep = app.add_subcommand("sweep", "paired-cost sweep over a numeric config field");
  add_common(sweep, sweep_args);
  sweep->add_option("--param", sweep_param, "sweep path (e.g. scheme.rbeta_scale); overrides the config block");
  sweep->add_option("--values", sweep_values, "sweep values; overrides the config block")->delimiter(',');

  CLI::App* dp = app.add_subcommand("dp-calibrate", "minimum noise stddev for the DP guarantee");
  dp->add_option("--epsilon", dp_epsilon, "DP epsilon > 0")->required();
  dp->add_option("--gamma", dp_gamma, "tail probability in (0, 1/2)")->required();
  dp->add_option("--b", dp_b, "l2 adjacency radius > 0")->required();
  dp->add_option("--out", dp_out, "directory for dp_calibration.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      privlq::cmd_run(load_with_overrides(run_args));
    } else if (report->parsed()) {
      privlq::cmd_privacy_report(load_with_overrides(report_args));
    } else if (sweep->parsed()) {
      privlq::ExperimentConfig config = load_with_overrides(sweep_args);
      if (!sweep_param.empty() || !sweep_values.empty()) {
        if (sweep_param.empty() || sweep_values.empty())
          throw privlq::ConfigError("sweep overrides need both --param and --values");
        config.sweep = privlq::ExperimentConfig::Sweep{sweep_param, sweep_values};
      }
      privlq::cmd_sweep(config);
    } else if (dp->parsed()) {
      std::cout << privlq::cmd_dp_calibrate(dp_epsilon, dp_gamma, dp_b, dp_out);
    }
  } catch (const privlq::ConfigError& e) {
    std::cerr << "ConfigError: " << e.what() << "\n";
    return kExitConfig;
  } catch (const privlq::ParameterOutOfRangeError& e) {
    std::cerr << "ParameterOutOfRange: " << e.what() << "\n";
    return kExitConfig;
  } catch (const privlq::NonSymmetricError& e) {
    std::cerr << "NonSymmetric: " << e.what() << "\n";
    return kExitConfig;
  } catch (const privlq::NotPositiveDefiniteError& e) {
    std::cerr << "NotPositiveDefinite: " << e.what() << "\n";
    return kExitConfig;
  } catch (const privlq::DimensionMismatchError& e) {
    std::cerr << "DimensionMismatch: " << e.what() << "\n";
    return kExitConfig;
  } catch (const privlq::Error& e) {
    std::cerr << "NumericError: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "Error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
