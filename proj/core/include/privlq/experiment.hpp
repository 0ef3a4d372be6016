#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "privlq/analysis.hpp"
#include "privlq/model.hpp"
#include "privlq/privacy.hpp"
#include "privlq/sim.hpp"

namespace privlq {

/// Parsed and validated experiment description. Matches the JSON schema
/// documented in the README: model, scheme, adversaries, epsilon,
/// mc_samples, seed, output_dir, and an optional sweep block.
struct ExperimentConfig {
  SystemModel model;
  NoiseScheme scheme;
  std::vector<AdversaryMode> adversaries;
  CollusionInit collusion_init = CollusionInit::Fused;
  double epsilon = 0.4;
  std::int64_t mc_samples = 100000;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  int runs = 100;  // paired-cost runs for summaries and sweeps

  struct Sweep {
    std::string path;  // dotted numeric config field, e.g. "scheme.rbeta_scale"
    std::vector<double> values;
  };
  std::optional<Sweep> sweep;
};

/// Throws ConfigError naming the file or field on any parse/validation issue.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text, const std::string& origin = "config");

/// Applies one sweep value to a copy of the config. Supported paths:
/// "epsilon", "scheme.rho", "scheme.rbeta_scale", "model.N", "mc_samples".
ExperimentConfig apply_sweep_value(const ExperimentConfig& base, const std::string& path, double value);

/// run: trace.csv + summary.json (realized costs, paired DeltaJ, final
/// estimator traces) under config.output_dir.
void cmd_run(const ExperimentConfig& config);

/// privacy-report: privacy_<tag>.csv per configured adversary.
void cmd_privacy_report(const ExperimentConfig& config);

/// sweep: sweep.csv with one row per value (paired DeltaJ with the restorer
/// on and off).
void cmd_sweep(const ExperimentConfig& config);

/// dp-calibrate: dp_calibration.json; returns the serialized JSON text.
std::string cmd_dp_calibrate(double epsilon, double gamma, double b, const std::string& output_dir);

}  // namespace privlq
