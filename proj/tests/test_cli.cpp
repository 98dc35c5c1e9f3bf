#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "attackkf/attackkf.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = ATTACKKF_CLI_PATH;

int run_cli(const std::string& args, const fs::path& stderr_file = {}) {
  std::string cmd = "\"" + kCli + "\" " + args;
  if (!stderr_file.empty()) cmd += " 2>\"" + stderr_file.string() + "\"";
  cmd += " >/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

long data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::string line;
  long rows = -1;  // do not count the header
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  return rows;
}

struct Workspace {
  fs::path dir;
  explicit Workspace(const std::string& name) {
    dir = fs::path("cli_work") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  fs::path file(const std::string& name) const { return dir / name; }
  std::string str(const std::string& name) const { return (dir / name).string(); }
};

const char* kDefaultConfig = R"({"scenario": "default", "execution": {"base_seed": 7}})";

const char* kCleanChannelConfig = R"({
  "scenario": "default",
  "attack": {"alpha_a": 0, "alpha_b": 1.0, "alpha_c": 1.0, "alpha_m": 0,
             "mu_a": [0, 0], "Sigma_a": [[1,0],[0,1]],
             "mu_m": 1.0, "sigma_m_sq": 0},
  "execution": {"base_seed": 7}
})";

}  // namespace

TEST_CASE("simulate emits the full horizon and reproduces byte-identically") {
  Workspace ws("simulate");
  spit(ws.file("cfg.json"), kDefaultConfig);

  REQUIRE(run_cli("simulate --config " + ws.str("cfg.json") + " --out " +
                  ws.str("a")) == 0);
  REQUIRE(data_rows(ws.file("a/truth.csv")) == 400);
  REQUIRE(data_rows(ws.file("a/measurements.csv")) == 400);
  REQUIRE(data_rows(ws.file("a/attack_log.csv")) == 400);

  REQUIRE(run_cli("simulate --config " + ws.str("cfg.json") + " --out " +
                  ws.str("b")) == 0);
  REQUIRE(slurp(ws.file("a/truth.csv")) == slurp(ws.file("b/truth.csv")));
  REQUIRE(slurp(ws.file("a/measurements.csv")) ==
          slurp(ws.file("b/measurements.csv")));
  REQUIRE(slurp(ws.file("a/attack_log.csv")) ==
          slurp(ws.file("b/attack_log.csv")));

  SECTION("a different seed changes the data") {
    REQUIRE(run_cli("simulate --config " + ws.str("cfg.json") +
                    " --seed 8 --out " + ws.str("c")) == 0);
    REQUIRE(slurp(ws.file("a/measurements.csv")) !=
            slurp(ws.file("c/measurements.csv")));
  }
}

TEST_CASE("clean channel logs NoAttack everywhere") {
  Workspace ws("clean");
  spit(ws.file("cfg.json"), kCleanChannelConfig);
  REQUIRE(run_cli("simulate --config " + ws.str("cfg.json") + " --out " +
                  ws.str("out")) == 0);
  std::ifstream log(ws.file("out/attack_log.csv"));
  std::string line;
  std::getline(log, line);  // header
  while (std::getline(log, line)) {
    if (line.empty()) continue;
    REQUIRE_THAT(line, Catch::Matchers::EndsWith("NoAttack"));
  }
}

TEST_CASE("estimate preserves length and matches the standard pipeline on "
          "clean data") {
  Workspace ws("estimate");
  spit(ws.file("cfg.json"), kCleanChannelConfig);
  REQUIRE(run_cli("simulate --config " + ws.str("cfg.json") + " --out " +
                  ws.str("sim")) == 0);
  REQUIRE(run_cli("estimate " + ws.str("sim/measurements.csv") + " --config " +
                  ws.str("cfg.json") + " --out " + ws.str("est")) == 0);
  REQUIRE(data_rows(ws.file("est/filtered.csv")) == 400);
  REQUIRE(data_rows(ws.file("est/smoothed.csv")) == 400);

  // Library-level oracle: the standard KF/RTSS on the same measurements.
  const attackkf::MeasurementFile mf =
      attackkf::read_measurement_file(ws.str("sim/measurements.csv"));
  const attackkf::Scenario sc = attackkf::default_scenario();
  const auto [records, smooth] =
      attackkf::standard_kf_rtss(sc.init_estimator, mf.measurements, sc.model);

  std::ifstream filt(ws.file("est/filtered.csv"));
  std::string line;
  std::getline(filt, line);  // header
  for (std::size_t k = 0; k < records.size(); ++k) {
    REQUIRE(std::getline(filt, line).good());
    const auto cells = attackkf::split_csv_line(line);
    REQUIRE(cells.size() == 9);
    for (int i = 0; i < 4; ++i) {
      const double mean = attackkf::parse_double(cells[1 + i], 0);
      REQUIRE(std::abs(mean - records[k].posterior.mean[i]) < 1e-10);
      const double var = attackkf::parse_double(cells[5 + i], 0);
      REQUIRE(std::abs(var - records[k].posterior.cov(i, i)) < 1e-10);
    }
  }
}

TEST_CASE("estimate writes full covariances when asked") {
  Workspace ws("fullcov");
  spit(ws.file("cfg.json"), kCleanChannelConfig);
  REQUIRE(run_cli("simulate --config " + ws.str("cfg.json") + " --out " +
                  ws.str("sim")) == 0);
  REQUIRE(run_cli("estimate " + ws.str("sim/measurements.csv") + " --config " +
                  ws.str("cfg.json") + " --full-cov --out " + ws.str("est")) ==
          0);
  const auto j = nlohmann::json::parse(slurp(ws.file("est/covariances.json")));
  REQUIRE(j["filtered_cov"].size() == 400);
  REQUIRE(j["smoothed_cov"].size() == 400);
  REQUIRE(j["filtered_cov"][0].size() == 4);
}

TEST_CASE("estimate reports the offending line of a corrupt file") {
  Workspace ws("badcsv");
  spit(ws.file("cfg.json"), kDefaultConfig);
  std::string csv = "step,y1,y2\n";
  for (int k = 1; k <= 30; ++k) {
    if (k == 16) {  // line 17 of the file, counting the header
      csv += std::to_string(k) + ",oops,2.0\n";
    } else {
      csv += std::to_string(k) + ",1.0,2.0\n";
    }
  }
  spit(ws.file("m.csv"), csv);
  const int code = run_cli("estimate " + ws.str("m.csv") + " --config " +
                               ws.str("cfg.json") + " --out " + ws.str("est"),
                           ws.file("stderr.txt"));
  REQUIRE(code == 2);
  REQUIRE_THAT(slurp(ws.file("stderr.txt")),
               Catch::Matchers::ContainsSubstring("line 17"));
}

TEST_CASE("estimate rejects a width mismatch against the model") {
  Workspace ws("width");
  spit(ws.file("cfg.json"), kDefaultConfig);
  spit(ws.file("m.csv"), "step,y1,y2,y3\n1,1.0,2.0,3.0\n");
  const int code = run_cli("estimate " + ws.str("m.csv") + " --config " +
                               ws.str("cfg.json") + " --out " + ws.str("est"),
                           ws.file("stderr.txt"));
  REQUIRE(code == 2);
}

TEST_CASE("benchmark output is deterministic and ordered sensibly") {
  Workspace ws("bench");
  spit(ws.file("cfg.json"),
       R"({"scenario": "default", "execution": {"runs": 5, "base_seed": 11}})");
  REQUIRE(run_cli("benchmark --config " + ws.str("cfg.json") + " --out " +
                  ws.str("a")) == 0);
  REQUIRE(run_cli("benchmark --config " + ws.str("cfg.json") + " --out " +
                  ws.str("b")) == 0);
  REQUIRE(slurp(ws.file("a/rmse.csv")) == slurp(ws.file("b/rmse.csv")));
  REQUIRE(slurp(ws.file("a/summary.json")) == slurp(ws.file("b/summary.json")));
  REQUIRE(data_rows(ws.file("a/rmse.csv")) == 400);

  const auto j = nlohmann::json::parse(slurp(ws.file("a/summary.json")));
  REQUIRE(j["runs"] == 5);
  REQUIRE(j["base_seed"] == 11);
  REQUIRE(j["methods"]["proposed_kf"]["position_rmse_mean"].get<double>() <
          j["methods"]["standard_kf"]["position_rmse_mean"].get<double>());
}

TEST_CASE("noiseless clean benchmark reports zero RMSE everywhere") {
  Workspace ws("noiseless");
  spit(ws.file("cfg.json"), R"({
    "scenario": {
      "type": "coordinated-turn",
      "sample_time_s": 0.05,
      "turn_rate": {"value": 3.0, "unit": "deg/s"},
      "Q": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]],
      "R": [[0,0],[0,0]],
      "horizon": 20,
      "init_true_mean": [200, 200, 15, 15],
      "init_estimate_mean": [200, 200, 15, 15],
      "init_estimate_cov": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]
    },
    "attack": {"alpha_a": 0, "alpha_b": 1.0, "alpha_c": 1.0, "alpha_m": 0,
               "mu_a": [0, 0], "Sigma_a": [[1,0],[0,1]],
               "mu_m": 1.0, "sigma_m_sq": 0},
    "execution": {"runs": 1, "base_seed": 3,
                  "methods": ["proposed-kf", "standard-kf"]}
  })");
  REQUIRE(run_cli("benchmark --config " + ws.str("cfg.json") + " --out " +
                  ws.str("out")) == 0);
  std::ifstream rmse(ws.file("out/rmse.csv"));
  std::string line;
  std::getline(rmse, line);  // header
  while (std::getline(rmse, line)) {
    if (line.empty()) continue;
    const auto cells = attackkf::split_csv_line(line);
    for (std::size_t i = 2; i < cells.size(); ++i) {
      REQUIRE(attackkf::parse_double(cells[i], 0) < 1e-7);
    }
  }
}

TEST_CASE("validate accepts the default and rejects bad configs") {
  Workspace ws("validate");
  spit(ws.file("good.json"), kDefaultConfig);
  REQUIRE(run_cli("validate --config " + ws.str("good.json")) == 0);

  spit(ws.file("bad.json"), R"({
    "scenario": "default",
    "attack": {"alpha_a": 0.3, "alpha_b": 0.7, "alpha_c": 1.3, "alpha_m": 0.1,
               "mu_a": [0.7, 0.9], "Sigma_a": [[1,2],[2,1]],
               "mu_m": 0.95, "sigma_m_sq": 0.01}
  })");
  REQUIRE(run_cli("validate --config " + ws.str("bad.json")) == 1);

  REQUIRE(run_cli("validate --config " + ws.str("missing.json"),
                  ws.file("stderr.txt")) == 1);
}

TEST_CASE("usage errors exit with the config code") {
  Workspace ws("usage");
  REQUIRE(run_cli("frobnicate", ws.file("stderr.txt")) == 1);
  REQUIRE(run_cli("simulate", ws.file("stderr.txt")) == 1);
}

TEST_CASE("numerical failures exit with code 3 and name the step") {
  // A = 0 with Q = 0 collapses the predicted covariance; the smoother's
  // backward solve has nothing to factor and must fail loudly.
  Workspace ws("numerical");
  spit(ws.file("cfg.json"), R"({
    "scenario": {
      "type": "custom",
      "A": [[0,0],[0,0]], "H": [[1,0],[0,1]],
      "Q": [[0,0],[0,0]], "R": [[1,0],[0,1]],
      "horizon": 5,
      "init_true_mean": [1, 1],
      "init_estimate_mean": [0, 0],
      "init_estimate_cov": [[1,0],[0,1]]
    },
    "attack": {"alpha_a": 0, "alpha_b": 1.0, "alpha_c": 1.0, "alpha_m": 0,
               "mu_a": [0, 0], "Sigma_a": [[1,0],[0,1]],
               "mu_m": 1.0, "sigma_m_sq": 0}
  })");
  std::string csv = "step,y1,y2\n";
  for (int k = 1; k <= 5; ++k) csv += std::to_string(k) + ",1.0,1.0\n";
  spit(ws.file("m.csv"), csv);
  const int code = run_cli("estimate " + ws.str("m.csv") + " --config " +
                               ws.str("cfg.json") + " --out " + ws.str("est"),
                           ws.file("stderr.txt"));
  REQUIRE(code == 3);
  REQUIRE_THAT(slurp(ws.file("stderr.txt")),
               Catch::Matchers::ContainsSubstring("step"));
}
