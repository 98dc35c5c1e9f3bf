// attackkf command line: simulate an attacked sensor channel, run the
// attack-aware estimator over recorded measurements, benchmark estimators
// with Monte Carlo RMSE curves, and validate config files.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "attackkf/attackkf.hpp"

namespace fs = std::filesystem;
using attackkf::RunConfig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

void emit_error(const std::string& kind, const std::string& message) {
  nlohmann::ordered_json err;
  err["error"] = kind;
  err["message"] = message;
  std::cerr << err.dump() << "\n";
}

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<std::string> out_dir;
  std::vector<std::string> methods;
  bool full_cov = false;
};

RunConfig load_with_overrides(const CommonOptions& opt) {
  RunConfig cfg = attackkf::load_config(opt.config_path);
  if (opt.seed) cfg.execution.base_seed = *opt.seed;
  if (opt.runs) cfg.execution.runs = *opt.runs;
  if (opt.out_dir) cfg.execution.out_dir = *opt.out_dir;
  if (opt.full_cov) cfg.execution.full_cov = true;
  if (!opt.methods.empty()) {
    cfg.execution.methods.clear();
    for (const auto& name : opt.methods) {
      attackkf::Method m;
      if (!attackkf::cfg_detail::parse_method(name, m)) {
        throw attackkf::ConfigError("unknown method '" + name + "'");
      }
      cfg.execution.methods.push_back(m);
    }
  }
  return cfg;
}

fs::path ensure_out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.execution.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    throw attackkf::DataFormatError("cannot create output directory '" +
                                    dir.string() + "': " + ec.message());
  }
  return dir;
}

void write_json_file(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw attackkf::DataFormatError("cannot open '" + path.string() +
                                    "' for writing");
  }
  out << j.dump(2) << "\n";
  if (!out) {
    throw attackkf::DataFormatError("write to '" + path.string() + "' failed");
  }
}

std::string fmt(double v) { return attackkf::format_double(v); }

int cmd_simulate(const CommonOptions& opt) {
  RunConfig cfg = load_with_overrides(opt);
  const attackkf::Scenario& sc = cfg.scenario;
  const fs::path dir = ensure_out_dir(cfg);

  const std::uint64_t seed = cfg.execution.base_seed;
  auto process_rng =
      attackkf::derive_stream(seed, attackkf::detail::kProcessStream);
  auto meas_rng =
      attackkf::derive_stream(seed, attackkf::detail::kMeasurementStream);
  auto attack_rng =
      attackkf::derive_stream(seed, attackkf::detail::kAttackStream);

  attackkf::Trajectory traj;
  traj.states = attackkf::simulate_states(sc.model, sc.init_true, sc.horizon,
                                          process_rng);
  traj.clean_measurements =
      attackkf::clean_measurements(sc.model, traj.states, meas_rng);
  const auto attacked =
      attackkf::attack_sequence(traj, sc.attack, attack_rng);

  const Eigen::Index nx = sc.model.state_dim();
  const Eigen::Index nz = sc.model.meas_dim();

  attackkf::CsvWriter truth(( dir / "truth.csv" ).string());
  {
    std::vector<std::string> header{"step"};
    for (Eigen::Index i = 0; i < nx; ++i) header.push_back("x" + std::to_string(i + 1));
    truth.write_row(header);
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      std::vector<std::string> row{std::to_string(k + 1)};
      for (Eigen::Index i = 0; i < nx; ++i) row.push_back(fmt(traj.states[k][i]));
      truth.write_row(row);
    }
    truth.close();
  }

  attackkf::CsvWriter meas((dir / "measurements.csv").string());
  {
    std::vector<std::string> header{"step"};
    for (Eigen::Index i = 0; i < nz; ++i) header.push_back("y" + std::to_string(i + 1));
    meas.write_row(header);
    for (std::size_t k = 0; k < attacked.size(); ++k) {
      std::vector<std::string> row{std::to_string(k + 1)};
      for (Eigen::Index i = 0; i < nz; ++i) row.push_back(fmt(attacked[k].first[i]));
      meas.write_row(row);
    }
    meas.close();
  }

  attackkf::CsvWriter log((dir / "attack_log.csv").string());
  {
    log.write_row({"step", "xi_b", "xi_c", "xi_a", "xi_m", "attack_type"});
    for (std::size_t k = 0; k < attacked.size(); ++k) {
      const auto& r = attacked[k].second;
      log.write_row({std::to_string(k + 1), r.xi_b ? "1" : "0",
                     r.xi_c ? "1" : "0", r.xi_a ? "1" : "0",
                     r.xi_m ? "1" : "0",
                     attackkf::to_string(attackkf::classify_attack(r))});
    }
    log.close();
  }

  std::cout << "simulate: wrote " << traj.states.size() << " steps to "
            << dir.string() << "\n";
  return kExitOk;
}

void write_belief_csv(const fs::path& path,
                      const std::vector<attackkf::GaussianBelief>& beliefs) {
  attackkf::CsvWriter out(path.string());
  const Eigen::Index nx = beliefs.front().mean.size();
  std::vector<std::string> header{"step"};
  for (Eigen::Index i = 0; i < nx; ++i) header.push_back("mean_" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < nx; ++i) header.push_back("var_" + std::to_string(i + 1));
  out.write_row(header);
  for (std::size_t k = 0; k < beliefs.size(); ++k) {
    std::vector<std::string> row{std::to_string(k + 1)};
    for (Eigen::Index i = 0; i < nx; ++i) row.push_back(fmt(beliefs[k].mean[i]));
    for (Eigen::Index i = 0; i < nx; ++i) row.push_back(fmt(beliefs[k].cov(i, i)));
    out.write_row(row);
  }
  out.close();
}

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_estimate(const CommonOptions& opt, const std::string& measurements_path) {
  RunConfig cfg = load_with_overrides(opt);
  const attackkf::Scenario& sc = cfg.scenario;

  const attackkf::MeasurementFile file =
      attackkf::read_measurement_file(measurements_path);
  if (file.measurements.front().size() != sc.model.meas_dim()) {
    throw attackkf::DataFormatError(
        "measurement file has " +
        std::to_string(file.measurements.front().size()) +
        " value columns but the model expects " +
        std::to_string(sc.model.meas_dim()));
  }

  const attackkf::ThetaParams theta{sc.model, sc.attack};
  const auto records =
      attackkf::filter_pass(sc.init_estimator, file.measurements, theta);
  const auto smoother = attackkf::rts_backward(records, sc.model);

  std::vector<attackkf::GaussianBelief> filtered;
  filtered.reserve(records.size());
  for (const auto& rec : records) filtered.push_back(rec.posterior);

  const fs::path dir = ensure_out_dir(cfg);
  write_belief_csv(dir / "filtered.csv", filtered);
  write_belief_csv(dir / "smoothed.csv", smoother.smoothed);

  if (cfg.execution.full_cov) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json f = nlohmann::ordered_json::array();
    nlohmann::ordered_json s = nlohmann::ordered_json::array();
    for (const auto& b : filtered) f.push_back(matrix_to_json(b.cov));
    for (const auto& b : smoother.smoothed) s.push_back(matrix_to_json(b.cov));
    j["filtered_cov"] = std::move(f);
    j["smoothed_cov"] = std::move(s);
    write_json_file(dir / "covariances.json", j);
  }

  std::cout << "estimate: processed " << records.size() << " steps, wrote "
            << dir.string() << "\n";
  return kExitOk;
}

int cmd_benchmark(const CommonOptions& opt) {
  RunConfig cfg = load_with_overrides(opt);
  const attackkf::Scenario& sc = cfg.scenario;
  const fs::path dir = ensure_out_dir(cfg);

  const auto t0 = std::chrono::steady_clock::now();
  const attackkf::McResult result = attackkf::run_monte_carlo(
      sc, cfg.execution.runs, cfg.execution.methods, cfg.execution.base_seed);
  const double wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const std::size_t horizon = result.position_rmse.front().size();

  attackkf::CsvWriter rmse((dir / "rmse.csv").string());
  {
    std::vector<std::string> header{"step", "time_s"};
    for (attackkf::Method m : result.methods) {
      header.push_back(std::string("pos_rmse_") + attackkf::method_label(m));
      header.push_back(std::string("vel_rmse_") + attackkf::method_label(m));
    }
    rmse.write_row(header);
    for (std::size_t k = 0; k < horizon; ++k) {
      std::vector<std::string> row{std::to_string(k + 1),
                                   fmt(static_cast<double>(k + 1) * sc.sample_time)};
      for (std::size_t i = 0; i < result.methods.size(); ++i) {
        row.push_back(fmt(result.position_rmse[i][k]));
        row.push_back(fmt(result.velocity_rmse[i][k]));
      }
      rmse.write_row(row);
    }
    rmse.close();
  }

  // Transient trim: drop the steps within the first 2 s of the run.
  const double trim_s = 2.0;
  std::size_t trim_idx = 0;
  while (trim_idx < horizon &&
         static_cast<double>(trim_idx + 1) * sc.sample_time <= trim_s) {
    ++trim_idx;
  }
  if (trim_idx >= horizon) trim_idx = 0;  // horizon shorter than the trim

  nlohmann::ordered_json summary;
  summary["runs"] = result.runs;
  summary["base_seed"] = result.base_seed;
  summary["horizon_steps"] = horizon;
  summary["sample_time_s"] = sc.sample_time;
  summary["transient_trim_s"] = trim_s;
  nlohmann::ordered_json methods_json;
  for (std::size_t i = 0; i < result.methods.size(); ++i) {
    nlohmann::ordered_json m;
    m["position_rmse_mean"] = attackkf::mean_from(result.position_rmse[i]);
    m["position_rmse_mean_trimmed"] =
        attackkf::mean_from(result.position_rmse[i], trim_idx);
    m["velocity_rmse_mean"] = attackkf::mean_from(result.velocity_rmse[i]);
    m["velocity_rmse_mean_trimmed"] =
        attackkf::mean_from(result.velocity_rmse[i], trim_idx);
    methods_json[attackkf::method_label(result.methods[i])] = std::move(m);
  }
  summary["methods"] = std::move(methods_json);
  write_json_file(dir / "summary.json", summary);

  std::cout << "benchmark: " << result.runs << " runs x " << horizon
            << " steps in " << wall_s << " s, wrote " << dir.string() << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& config_path) {
  const attackkf::ValidationReport report =
      attackkf::validate_config_file(config_path);
  if (report.ok()) {
    std::cout << "config '" << config_path << "' is valid\n";
    return kExitOk;
  }
  std::cout << "config '" << config_path << "' is invalid:\n";
  for (const auto& v : report.violations) std::cout << "  - " << v << "\n";
  emit_error("config", "invalid config: " + std::to_string(report.violations.size()) +
                           " violation(s)");
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"State estimation for linear Gaussian models under DoS and "
               "false-data-injection measurement attacks"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string measurements_path;

  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--config", opt.config_path, "Config file (JSON)")
        ->required();
    sub->add_option("--out", opt.out_dir, "Output directory");
    if (with_seed) {
      sub->add_option("--seed", opt.seed, "Override execution.base_seed");
    }
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Simulate truth, clean measurements, and the attack channel");
  add_common(simulate, true);

  CLI::App* estimate = app.add_subcommand(
      "estimate", "Run the attack-aware filter and smoother on recorded data");
  estimate->add_option("measurements", measurements_path,
                       "Measurement CSV (step, y1..y_nz)")
      ->required();
  add_common(estimate, false);
  estimate->add_flag("--full-cov", opt.full_cov,
                     "Also write full covariances as JSON");

  CLI::App* benchmark = app.add_subcommand(
      "benchmark", "Monte Carlo RMSE benchmark across estimators");
  add_common(benchmark, true);
  benchmark->add_option("--runs", opt.runs, "Override execution.runs");
  benchmark->add_option("--methods", opt.methods,
                        "Comma-separated methods (proposed-kf, proposed-rtss, "
                        "standard-kf, standard-rtss)")
      ->delimiter(',');

  CLI::App* validate =
      app.add_subcommand("validate", "Validate a config file and report issues");
  validate->add_option("--config", opt.config_path, "Config file (JSON)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    emit_error("usage", e.what());
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opt);
    if (estimate->parsed()) return cmd_estimate(opt, measurements_path);
    if (benchmark->parsed()) return cmd_benchmark(opt);
    if (validate->parsed()) return cmd_validate(opt.config_path);
  } catch (const attackkf::ConfigError& e) {
    emit_error("config", e.what());
    return kExitConfig;
  } catch (const attackkf::DataFormatError& e) {
    emit_error("data", e.what());
    return kExitData;
  } catch (const attackkf::NumericalError& e) {
    emit_error("numerical", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}
