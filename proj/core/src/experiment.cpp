#include "privlq/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "privlq/errors.hpp"

namespace privlq {

namespace {

using detail::json;

NoiseFamily family_from_string(const std::string& s) {
  if (s == "gaussian") return NoiseFamily::Gaussian;
  if (s == "uniform") return NoiseFamily::Uniform;
  if (s == "laplace") return NoiseFamily::Laplace;
  throw ConfigError("scheme.family must be one of gaussian|uniform|laplace, got \"" + s + "\"");
}

NoiseScheme scheme_from_json(const json& j) {
  NoiseScheme scheme;
  const auto& family = detail::require_field(j, "family", "scheme");
  if (!family.is_string()) throw ConfigError("scheme.family must be a string");
  scheme.family = family_from_string(family.get<std::string>());
  scheme.Rbeta = detail::matrix_from_json(detail::require_field(j, "Rbeta", "scheme"), "Rbeta");
  const bool has_rho = j.contains("rho");
  const bool has_set = j.contains("M");
  if (has_rho == has_set) throw ConfigError("scheme must set exactly one of rho (number) or M (array)");
  if (has_rho) {
    if (!j["rho"].is_number()) throw ConfigError("scheme.rho must be a number");
    scheme.rho_mode = FixedRho{j["rho"].get<double>()};
  } else {
    const auto& m = j["M"];
    if (!m.is_array() || m.empty()) throw ConfigError("scheme.M must be a non-empty array of numbers");
    RandomRho random;
    for (const auto& v : m) {
      if (!v.is_number()) throw ConfigError("scheme.M has a non-numeric entry");
      random.values.push_back(v.get<double>());
    }
    scheme.rho_mode = std::move(random);
  }
  if (j.contains("min_rho_gap")) {
    if (!j["min_rho_gap"].is_number()) throw ConfigError("scheme.min_rho_gap must be a number");
    scheme.min_rho_gap = j["min_rho_gap"].get<double>();
  }
  return scheme;
}

AdversaryMode adversary_from_string(const std::string& s) {
  if (s == "alpha") return AdversaryMode::non_colluding(Side::Alpha);
  if (s == "beta") return AdversaryMode::non_colluding(Side::Beta);
  if (s == "colluding") return AdversaryMode::colluding();
  throw ConfigError("adversaries entries must be alpha|beta|colluding, got \"" + s + "\"");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::filesystem::path ensure_output_dir(const ExperimentConfig& config) {
  std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": JSON parse error: " + e.what());
  }
  ExperimentConfig config;
  config.model = detail::model_from_json_obj(detail::require_field(j, "model", origin));
  std::vector<std::string> warnings;
  try {
    config.model = validate_model(std::move(config.model), &warnings);
  } catch (const Error& e) {
    throw ConfigError(origin + ": model: " + e.what());
  }
  try {
    config.scheme = validate_scheme(scheme_from_json(detail::require_field(j, "scheme", origin)));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(origin + ": scheme: " + e.what());
  }
  if (config.scheme.dim() != config.model.state_dim())
    throw ConfigError(origin + ": scheme.Rbeta dimension does not match the model state dimension");

  if (j.contains("adversaries")) {
    if (!j["adversaries"].is_array()) throw ConfigError(origin + ": adversaries must be an array");
    for (const auto& a : j["adversaries"]) {
      if (!a.is_string()) throw ConfigError(origin + ": adversaries entries must be strings");
      config.adversaries.push_back(adversary_from_string(a.get<std::string>()));
    }
  }
  if (j.contains("collusion_init")) {
    const std::string v = j["collusion_init"].get<std::string>();
    if (v == "fused")
      config.collusion_init = CollusionInit::Fused;
    else if (v == "alpha")
      config.collusion_init = CollusionInit::AlphaSided;
    else if (v == "beta")
      config.collusion_init = CollusionInit::BetaSided;
    else
      throw ConfigError(origin + ": collusion_init must be fused|alpha|beta");
  }
  if (j.contains("epsilon")) config.epsilon = j["epsilon"].get<double>();
  if (!(config.epsilon > 0.0)) throw ConfigError(origin + ": epsilon must be positive");
  if (j.contains("mc_samples")) config.mc_samples = j["mc_samples"].get<std::int64_t>();
  if (config.mc_samples < 1000) throw ConfigError(origin + ": mc_samples must be >= 1000");
  if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) config.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("runs")) config.runs = j["runs"].get<int>();
  if (config.runs < 1) throw ConfigError(origin + ": runs must be >= 1");

  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    ExperimentConfig::Sweep sweep;
    const auto& path = detail::require_field(s, "path", origin + ": sweep");
    if (!path.is_string()) throw ConfigError(origin + ": sweep.path must be a string");
    sweep.path = path.get<std::string>();
    const auto& values = detail::require_field(s, "values", origin + ": sweep");
    if (!values.is_array() || values.empty())
      throw ConfigError(origin + ": sweep.values must be a non-empty array");
    for (const auto& v : values) {
      if (!v.is_number()) throw ConfigError(origin + ": sweep.values has a non-numeric entry");
      sweep.values.push_back(v.get<double>());
    }
    config.sweep = std::move(sweep);
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str(), path);
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, const std::string& path, double value) {
  ExperimentConfig config = base;
  if (path == "epsilon") {
    config.epsilon = value;
    if (!(config.epsilon > 0.0)) throw ConfigError("sweep: epsilon must stay positive");
  } else if (path == "scheme.rho") {
    config.scheme.rho_mode = FixedRho{value};
    config.scheme = validate_scheme(std::move(config.scheme));
  } else if (path == "scheme.rbeta_scale") {
    if (!(value > 0.0)) throw ConfigError("sweep: scheme.rbeta_scale must be positive");
    config.scheme.Rbeta = value * base.scheme.Rbeta;
  } else if (path == "model.N") {
    config.model.N = static_cast<int>(value);
    if (config.model.N < 1) throw ConfigError("sweep: model.N must be >= 1");
  } else if (path == "mc_samples") {
    config.mc_samples = static_cast<std::int64_t>(value);
    if (config.mc_samples < 1000) throw ConfigError("sweep: mc_samples must stay >= 1000");
  } else {
    throw ConfigError("unknown sweep path \"" + path + "\"");
  }
  return config;
}

void cmd_run(const ExperimentConfig& config) {
  const auto dir = ensure_output_dir(config);
  SimOptions options;
  options.collusion_init = config.collusion_init;
  const SimTrace trace =
      run_closed_loop(config.model, config.scheme, config.adversaries, RngStream(config.seed, 0), options);

  std::ostringstream trace_csv;
  write_trace_csv(trace_csv, trace);
  write_text_file(dir / "trace.csv", trace_csv.str());

  // One paired rollout on the same seed quantifies the cost of privacy.
  const PairedCostResult paired = paired_cost_experiment(config.model, config.scheme, RngStream(config.seed, 1),
                                                         config.runs);
  json summary;
  summary["J_privacy"] = paired.j_privacy_mean;
  summary["J_plain"] = paired.j_plain_mean;
  summary["DeltaJ"] = paired.delta_j_mean;
  summary["DeltaJ_stderr"] = paired.delta_j_stderr;
  summary["J_realized"] = trace.cost;
  summary["max_restoration_residual"] = trace.max_restoration_residual;
  json finals = json::object();
  for (const auto& at : trace.adversaries) finals[at.mode.tag()] = at.trace_P.back();
  summary["final_trP"] = finals;
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");
}

void cmd_privacy_report(const ExperimentConfig& config) {
  if (config.adversaries.empty()) throw ConfigError("privacy-report needs at least one adversary configured");
  const auto dir = ensure_output_dir(config);
  SimOptions options;
  options.collusion_init = config.collusion_init;
  const SimTrace trace =
      run_closed_loop(config.model, config.scheme, config.adversaries, RngStream(config.seed, 0), options);
  for (std::size_t a = 0; a < trace.adversaries.size(); ++a) {
    const AdversaryTrace& at = trace.adversaries[a];
    const PrivacyReport report =
        make_privacy_report(at.mode, at.init, at.P, at.gains, config.scheme, config.model.W, config.epsilon,
                            config.mc_samples, RngStream(config.seed, 1000 + a));
    std::ostringstream csv;
    write_privacy_report_csv(csv, report);
    write_text_file(dir / ("privacy_" + at.mode.tag() + ".csv"), csv.str());
  }
}

void cmd_sweep(const ExperimentConfig& config) {
  if (!config.sweep) throw ConfigError("sweep requires a sweep block (path + values) or --param/--values");
  const auto dir = ensure_output_dir(config);
  std::ostringstream csv;
  csv << "value,delta_j_on,delta_j_on_stderr,delta_j_off,delta_j_off_stderr\n";
  char buf[256];
  for (double value : config.sweep->values) {
    const ExperimentConfig point = apply_sweep_value(config, config.sweep->path, value);
    const PairedCostResult on = paired_cost_experiment(point.model, point.scheme, RngStream(point.seed, 1),
                                                       point.runs, /*restorer_enabled=*/true);
    const PairedCostResult off = paired_cost_experiment(point.model, point.scheme, RngStream(point.seed, 1),
                                                        point.runs, /*restorer_enabled=*/false);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", value, on.delta_j_mean,
                  on.delta_j_stderr, off.delta_j_mean, off.delta_j_stderr);
    csv << buf;
  }
  write_text_file(dir / "sweep.csv", csv.str());
}

std::string cmd_dp_calibrate(double epsilon, double gamma, double b, const std::string& output_dir) {
  const DpParams params = dp_calibrate(epsilon, gamma, b);
  json out;
  out["epsilon"] = params.epsilon;
  out["gamma"] = params.gamma;
  out["b"] = params.b;
  out["r_min"] = params.r_min;
  out["verified"] = dp_verify(params.r_min, epsilon, gamma, b);
  const std::string text = out.dump(2) + "\n";
  if (!output_dir.empty()) {
    std::filesystem::path dir(output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    write_text_file(dir / "dp_calibration.json", text);
  }
  return text;
}

}  // namespace privlq
