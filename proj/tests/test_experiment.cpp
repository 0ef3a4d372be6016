#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "privlq/errors.hpp"
#include "privlq/experiment.hpp"

using namespace privlq;
namespace fs = std::filesystem;

namespace {

std::string small_config_text(const std::string& extra = "") {
  return std::string(R"({
    "model": {
      "A": [[0.9, 0.1], [0.0, 0.8]],
      "B": [[1.0], [0.5]],
      "W": [[0.4, 0.0], [0.0, 0.3]],
      "Q": [[1.0, 0.0], [0.0, 1.0]],
      "QN": [[1.0, 0.0], [0.0, 1.0]],
      "U": [[1.0]],
      "N": 12,
      "x0": [1.0, -0.5]
    },
    "scheme": {"family": "gaussian", "Rbeta": [[0.8, 0.0], [0.0, 0.6]], "rho": 2.0},
    "adversaries": ["beta"],
    "epsilon": 0.4,
    "mc_samples": 2000,
    "seed": 99,
    "runs": 5)") +
         extra + "\n}";
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("privlq_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("config parses and validates") {
  const ExperimentConfig config = parse_config_json(small_config_text());
  CHECK(config.model.N == 12);
  CHECK(config.scheme.dim() == 2);
  CHECK(config.adversaries.size() == 1);
  CHECK(config.epsilon == 0.4);
  CHECK(config.seed == 99);
}

TEST_CASE("config rejections name the problem") {
  CHECK_THROWS_AS(parse_config_json("{"), ConfigError);
  CHECK_THROWS_AS(parse_config_json("{}"), ConfigError);

  std::string text = small_config_text();
  CHECK_THROWS_AS(parse_config_json(text + "junk"), ConfigError);

  // epsilon must be positive
  std::string bad = small_config_text(",\n\"epsilon\": 0");
  CHECK_THROWS_AS(parse_config_json(bad), ConfigError);

  bad = small_config_text(",\n\"mc_samples\": 10");
  CHECK_THROWS_AS(parse_config_json(bad), ConfigError);

  bad = small_config_text(",\n\"adversaries\": [\"eve\"]");
  CHECK_THROWS_AS(parse_config_json(bad), ConfigError);

  // scheme must pick exactly one rho mode
  std::string both = small_config_text();
  both.replace(both.find("\"rho\": 2.0"), 10, "\"rho\": 2.0, \"M\": [2.0, -2.0]");
  CHECK_THROWS_AS(parse_config_json(both), ConfigError);

  // asymmetric Q surfaces as a config error naming Q
  std::string asym = small_config_text();
  asym.replace(asym.find("\"Q\": [[1.0, 0.0], [0.0, 1.0]]"), 29, "\"Q\": [[1.0, 0.7], [0.0, 1.0]]");
  try {
    parse_config_json(asym);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("Q") != std::string::npos);
  }
}

TEST_CASE("missing config file names the path") {
  try {
    load_config("/nonexistent/place/config.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/place/config.json") != std::string::npos);
  }
}

TEST_CASE("sweep value application") {
  const ExperimentConfig base = parse_config_json(small_config_text());
  CHECK(apply_sweep_value(base, "epsilon", 0.9).epsilon == 0.9);
  CHECK(apply_sweep_value(base, "scheme.rbeta_scale", 2.0).scheme.Rbeta(0, 0) == doctest::Approx(1.6));
  CHECK(apply_sweep_value(base, "scheme.rho", -3.0).scheme.rho_second_moment() == doctest::Approx(9.0));
  CHECK(apply_sweep_value(base, "model.N", 20).model.N == 20);
  CHECK_THROWS_AS(apply_sweep_value(base, "model.A", 1.0), ConfigError);
  CHECK_THROWS_AS(apply_sweep_value(base, "epsilon", -1.0), ConfigError);
}

TEST_CASE("cmd_run writes a trace and summary and is byte deterministic") {
  TempDir dir("run");
  ExperimentConfig config = parse_config_json(small_config_text());
  config.output_dir = (dir.path / "a").string();
  cmd_run(config);
  const auto trace_a = slurp(dir.path / "a" / "trace.csv");
  const auto summary_a = slurp(dir.path / "a" / "summary.json");

  config.output_dir = (dir.path / "b").string();
  cmd_run(config);
  CHECK(trace_a == slurp(dir.path / "b" / "trace.csv"));
  CHECK(summary_a == slurp(dir.path / "b" / "summary.json"));

  const auto rows = read_csv(dir.path / "a" / "trace.csv");
  REQUIRE(rows.size() == 13u);  // header + N rows
  CHECK(rows[0][0] == "k");

  const auto summary = nlohmann::json::parse(summary_a);
  CHECK(std::abs(summary["DeltaJ"].get<double>()) <= 1e-9);
  CHECK(summary.contains("final_trP"));
  CHECK(summary["final_trP"].contains("beta"));
}

TEST_CASE("cmd_privacy_report emits bounded deltas per adversary") {
  TempDir dir("report");
  ExperimentConfig config = parse_config_json(small_config_text());
  config.adversaries = {AdversaryMode::non_colluding(Side::Alpha), AdversaryMode::non_colluding(Side::Beta)};
  config.output_dir = (dir.path / "r").string();
  cmd_privacy_report(config);

  for (const std::string tag : {"alpha", "beta"}) {
    const auto rows = read_csv(dir.path / "r" / ("privacy_" + tag + ".csv"));
    REQUIRE(rows.size() == 13u);
    CHECK(rows[0] == std::vector<std::string>{"k", "trP", "trP_lo", "trP_hi", "delta", "delta_stderr",
                                              "delta_bar", "method"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double trP = std::stod(rows[i][1]);
      const double lo = std::stod(rows[i][2]);
      const double hi = std::stod(rows[i][3]);
      const double delta = std::stod(rows[i][4]);
      const double stderr_v = std::stod(rows[i][5]);
      const double bar = std::stod(rows[i][6]);
      CHECK(trP >= lo - 1e-9);
      CHECK(trP <= hi + 1e-9);
      CHECK(delta >= 0.0);
      CHECK(delta <= 1.0);
      CHECK(delta <= bar + 3.0 * stderr_v + 1e-9);
      CHECK(rows[i][7] == "closed_form");  // gaussian fixed-rho, n = 2
    }
  }
}

TEST_CASE("huge epsilon saturates the disclosure column") {
  TempDir dir("sat");
  ExperimentConfig config = parse_config_json(small_config_text());
  config.epsilon = 1e6;
  config.output_dir = (dir.path / "s").string();
  cmd_privacy_report(config);
  const auto rows = read_csv(dir.path / "s" / "privacy_beta.csv");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][4]) == doctest::Approx(1.0));
}

TEST_CASE("cmd_sweep orders the degraded mode by noise scale") {
  TempDir dir("sweep");
  ExperimentConfig config = parse_config_json(small_config_text());
  config.sweep = ExperimentConfig::Sweep{"scheme.rbeta_scale", {1.0, 2.0, 4.0}};
  config.runs = 40;
  config.output_dir = (dir.path / "w").string();
  cmd_sweep(config);
  const auto rows = read_csv(dir.path / "w" / "sweep.csv");
  REQUIRE(rows.size() == 4u);
  CHECK(rows[0][0] == "value");
  double previous_off = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double on = std::stod(rows[i][1]);
    const double off = std::stod(rows[i][3]);
    CHECK(std::abs(on) <= 1e-9);
    CHECK(off > previous_off);
    previous_off = off;
  }

  ExperimentConfig no_sweep = parse_config_json(small_config_text());
  CHECK_THROWS_AS(cmd_sweep(no_sweep), ConfigError);
}

TEST_CASE("single-value sweep agrees with the run summary") {
  TempDir dir("sweep1");
  ExperimentConfig config = parse_config_json(small_config_text());
  config.sweep = ExperimentConfig::Sweep{"scheme.rbeta_scale", {1.0}};
  config.output_dir = (dir.path / "one").string();
  cmd_sweep(config);
  cmd_run(config);
  const auto rows = read_csv(dir.path / "one" / "sweep.csv");
  REQUIRE(rows.size() == 2u);
  const auto summary = nlohmann::json::parse(slurp(dir.path / "one" / "summary.json"));
  CHECK(std::stod(rows[1][1]) == doctest::Approx(summary["DeltaJ"].get<double>()).epsilon(1e-12));
}

TEST_CASE("dp calibration command") {
  TempDir dir("dp");
  const std::string text = cmd_dp_calibrate(1.0, 0.05, 1.0, (dir.path / "d").string());
  const auto j = nlohmann::json::parse(text);
  CHECK(std::abs(j["r_min"].get<double>() - 1.9070) < 1e-3);
  CHECK(j["verified"].get<bool>());
  CHECK(fs::exists(dir.path / "d" / "dp_calibration.json"));
  CHECK_THROWS_AS(cmd_dp_calibrate(1.0, 0.6, 1.0, ""), ParameterOutOfRangeError);
  CHECK_THROWS_AS(cmd_dp_calibrate(1.0, 0.05, 0.0, ""), ParameterOutOfRangeError);
}

#ifdef PRIVLQ_CONFIG_DIR
TEST_CASE("bundled fig2 config runs with bounds satisfied rowwise") {
  TempDir dir("fig2");
  ExperimentConfig config = load_config(std::string(PRIVLQ_CONFIG_DIR) + "/paper_fig2.json");
  config.output_dir = (dir.path / "fig2").string();
  cmd_run(config);
  const auto rows = read_csv(dir.path / "fig2" / "trace.csv");
  REQUIRE(rows.size() == 61u);  // header + 60 data rows
  const auto& header = rows[0];
  for (const std::string tag : {"alpha", "beta"}) {
    int trP = -1, lo = -1, hi = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == tag + "_trP") trP = static_cast<int>(i);
      if (header[i] == tag + "_trP_lo") lo = static_cast<int>(i);
      if (header[i] == tag + "_trP_hi") hi = static_cast<int>(i);
    }
    REQUIRE(trP >= 0);
    REQUIRE(lo >= 0);
    REQUIRE(hi >= 0);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const double tr = std::stod(rows[r][trP]);
      CHECK(tr >= std::stod(rows[r][lo]) - 1e-9);
      CHECK(tr <= std::stod(rows[r][hi]) + 1e-9);
    }
  }
}

TEST_CASE("bundled fig2 privacy report keeps delta under its bound") {
  TempDir dir("fig2rep");
  ExperimentConfig config = load_config(std::string(PRIVLQ_CONFIG_DIR) + "/paper_fig2.json");
  config.output_dir = (dir.path / "rep").string();
  cmd_privacy_report(config);
  for (const std::string tag : {"alpha", "beta"}) {
    const auto rows = read_csv(dir.path / "rep" / ("privacy_" + tag + ".csv"));
    REQUIRE(rows.size() == 61u);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      CHECK(std::stod(rows[r][4]) <= std::stod(rows[r][6]) + 1e-9);  // closed form, stderr 0
      CHECK(rows[r][7] == "closed_form");
    }
  }
}

TEST_CASE("bundled collusion report keeps delta under the collusion bound") {
  TempDir dir("colrep");
  ExperimentConfig config = load_config(std::string(PRIVLQ_CONFIG_DIR) + "/paper_collusion.json");
  config.mc_samples = 20000;  // the full-sample run lives in the acceptance suite
  config.output_dir = (dir.path / "rep").string();
  cmd_privacy_report(config);
  const auto rows = read_csv(dir.path / "rep" / "privacy_colluding.csv");
  REQUIRE(rows.size() == 61u);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double delta = std::stod(rows[r][4]);
    const double se = std::stod(rows[r][5]);
    const double bar = std::stod(rows[r][6]);
    CHECK(delta <= bar + 3.0 * se + 1e-9);
    CHECK(rows[r][7] == "monte_carlo");
  }
}
#endif

#ifdef PRIVLQ_CLI_PATH
namespace {

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(PRIVLQ_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("cli exit codes and determinism") {
  TempDir dir("cli");
  const fs::path log = dir.path / "log.txt";

  CHECK(run_cli("run --config /no/such/file.json", log) == 2);
  CHECK(slurp(log).find("/no/such/file.json") != std::string::npos);

  CHECK(run_cli("dp-calibrate --epsilon 1 --gamma 0.6 --b 1", log) == 2);
  CHECK(run_cli("dp-calibrate --epsilon 1 --gamma 0.05 --b 0", log) == 2);
  CHECK(run_cli("dp-calibrate --epsilon 1 --gamma 0.05 --b 1", log) == 0);

  const fs::path cfg = dir.path / "cfg.json";
  std::ofstream(cfg) << small_config_text();
  CHECK(run_cli("run --config " + cfg.string() + " --out " + (dir.path / "o1").string(), log) == 0);
  CHECK(run_cli("run --config " + cfg.string() + " --out " + (dir.path / "o2").string(), log) == 0);
  CHECK(slurp(dir.path / "o1" / "trace.csv") == slurp(dir.path / "o2" / "trace.csv"));
  CHECK(slurp(dir.path / "o1" / "summary.json") == slurp(dir.path / "o2" / "summary.json"));

  // empty sweep values are rejected by the CLI layer
  CHECK(run_cli("sweep --config " + cfg.string() + " --param epsilon", log) == 2);
}
#endif
