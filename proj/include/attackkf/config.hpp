#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "attackkf/errors.hpp"
#include "attackkf/monte_carlo.hpp"
#include "attackkf/scenario.hpp"

namespace attackkf {

struct ExecutionConfig {
  int runs = 100;
  std::uint64_t base_seed = 1;
  std::vector<Method> methods = {Method::ProposedKf, Method::ProposedRtss,
                                 Method::StandardKf, Method::StandardRtss};
  std::string out_dir = ".";
  std::string format = "csv";
  bool full_cov = false;
};

struct RunConfig {
  Scenario scenario;
  ExecutionConfig execution;
};

namespace cfg_detail {

using nlohmann::json;

inline Eigen::VectorXd parse_vector(const json& j, const std::string& name,
                                    ValidationReport& report) {
  if (!j.is_array()) {
    report.add(name + " must be an array of numbers");
    return Eigen::VectorXd();
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      report.add(name + "[" + std::to_string(i) + "] is not a number");
      return Eigen::VectorXd();
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

inline Eigen::MatrixXd parse_matrix(const json& j, const std::string& name,
                                    ValidationReport& report) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    report.add(name + " must be a row-major nested array");
    return Eigen::MatrixXd();
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      report.add(name + " rows must all have " + std::to_string(cols) +
                 " entries");
      return Eigen::MatrixXd();
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        report.add(name + "[" + std::to_string(r) + "][" + std::to_string(c) +
                   "] is not a number");
        return Eigen::MatrixXd();
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
    }
  }
  return m;
}

inline double require_number(const json& j, const std::string& key,
                             const std::string& ctx, ValidationReport& report,
                             double fallback = 0.0) {
  if (!j.contains(key) || !j[key].is_number()) {
    report.add(ctx + "." + key + " missing or not a number");
    return fallback;
  }
  return j[key].get<double>();
}

inline AttackParams parse_attack(const json& j, ValidationReport& report) {
  AttackParams p;
  p.alpha_a = require_number(j, "alpha_a", "attack", report);
  p.alpha_b = require_number(j, "alpha_b", "attack", report);
  p.alpha_c = require_number(j, "alpha_c", "attack", report);
  p.alpha_m = require_number(j, "alpha_m", "attack", report);
  p.mu_m = require_number(j, "mu_m", "attack", report, 1.0);
  p.sigma_m_sq = require_number(j, "sigma_m_sq", "attack", report);
  if (j.contains("mu_a")) {
    p.mu_a = parse_vector(j["mu_a"], "attack.mu_a", report);
  } else {
    report.add("attack.mu_a missing");
  }
  if (j.contains("Sigma_a")) {
    p.Sigma_a = parse_matrix(j["Sigma_a"], "attack.Sigma_a", report);
  } else {
    report.add("attack.Sigma_a missing");
  }
  if (report.ok()) report.merge(validate_attack(p));
  return p;
}

inline double parse_turn_rate(const json& j, ValidationReport& report) {
  // Explicit unit key; degrees are converted exactly once, here.
  if (!j.is_object() || !j.contains("value") || !j.contains("unit") ||
      !j["value"].is_number() || !j["unit"].is_string()) {
    report.add("scenario.turn_rate must be {\"value\": number, \"unit\": "
               "\"deg/s\"|\"rad/s\"}");
    return 0.0;
  }
  const double value = j["value"].get<double>();
  const std::string unit = j["unit"].get<std::string>();
  if (unit == "deg/s") return deg_to_rad(value);
  if (unit == "rad/s") return value;
  report.add("scenario.turn_rate.unit must be \"deg/s\" or \"rad/s\"");
  return 0.0;
}

inline GaussianBelief parse_belief(const json& j, const std::string& mean_key,
                                   const std::string& cov_key,
                                   const std::string& ctx,
                                   ValidationReport& report,
                                   bool cov_optional) {
  GaussianBelief b;
  if (j.contains(mean_key)) {
    b.mean = parse_vector(j[mean_key], ctx + "." + mean_key, report);
  } else {
    report.add(ctx + "." + mean_key + " missing");
  }
  if (j.contains(cov_key)) {
    b.cov = parse_matrix(j[cov_key], ctx + "." + cov_key, report);
  } else if (cov_optional) {
    b.cov = Eigen::MatrixXd::Zero(b.mean.size(), b.mean.size());
  } else {
    report.add(ctx + "." + cov_key + " missing");
  }
  if (b.cov.rows() != b.mean.size() || b.cov.cols() != b.mean.size()) {
    report.add(ctx + "." + cov_key + " dimension does not match " + mean_key);
  } else if (b.cov.size() > 0 && !is_symmetric(b.cov, 1e-9)) {
    report.add(ctx + "." + cov_key + " is not symmetric");
  } else if (b.cov.size() > 0 && !is_psd(b.cov)) {
    report.add(ctx + "." + cov_key + " is not positive semidefinite");
  }
  return b;
}

inline int parse_horizon(const json& j, ValidationReport& report) {
  if (!j.contains("horizon") || !j["horizon"].is_number_integer() ||
      j["horizon"].get<long>() < 1) {
    report.add("scenario.horizon missing or not a positive integer");
    return 1;
  }
  return static_cast<int>(j["horizon"].get<long>());
}

inline Scenario parse_scenario(const json& root, ValidationReport& report) {
  Scenario sc = default_scenario();
  if (!root.contains("scenario")) {
    report.add("scenario section missing");
    return sc;
  }
  const json& j = root["scenario"];
  if (j.is_string()) {
    if (j.get<std::string>() != "default") {
      report.add("unknown scenario name '" + j.get<std::string>() +
                 "' (expected \"default\" or an object)");
    }
    // Built-in scenario; the attack section, when present, overrides.
    if (root.contains("attack")) {
      sc.attack = parse_attack(root["attack"], report);
    }
    return sc;
  }
  if (!j.is_object()) {
    report.add("scenario must be \"default\" or an object");
    return sc;
  }

  const std::string type =
      j.contains("type") && j["type"].is_string() ? j["type"].get<std::string>()
                                                  : "";
  if (type == "coordinated-turn") {
    const double sample_time =
        require_number(j, "sample_time_s", "scenario", report, 1.0);
    double turn_rate = 0.0;
    if (j.contains("turn_rate")) {
      turn_rate = parse_turn_rate(j["turn_rate"], report);
    } else {
      report.add("scenario.turn_rate missing");
    }
    Eigen::MatrixXd q, r;
    if (j.contains("Q")) q = parse_matrix(j["Q"], "scenario.Q", report);
    else report.add("scenario.Q missing");
    if (j.contains("R")) r = parse_matrix(j["R"], "scenario.R", report);
    else report.add("scenario.R missing");
    if (report.ok()) {
      try {
        sc.model = build_ct_model(sample_time, turn_rate, q, r);
      } catch (const ConfigError& e) {
        report.add(e.what());
      }
      sc.sample_time = sample_time;
      sc.turn_rate = turn_rate;
    }
  } else if (type == "custom") {
    sc.sample_time = j.contains("sample_time_s")
                         ? require_number(j, "sample_time_s", "scenario", report, 1.0)
                         : 1.0;
    sc.turn_rate = 0.0;
    LinearGaussianModel m;
    if (j.contains("A")) m.A = parse_matrix(j["A"], "scenario.A", report);
    else report.add("scenario.A missing");
    if (j.contains("H")) m.H = parse_matrix(j["H"], "scenario.H", report);
    else report.add("scenario.H missing");
    if (j.contains("Q")) m.Q = parse_matrix(j["Q"], "scenario.Q", report);
    else report.add("scenario.Q missing");
    if (j.contains("R")) m.R = parse_matrix(j["R"], "scenario.R", report);
    else report.add("scenario.R missing");
    if (report.ok()) {
      report.merge(validate_model_for_simulation(m));
      sc.model = m;
    }
  } else {
    report.add("scenario.type must be \"coordinated-turn\" or \"custom\"");
    return sc;
  }

  sc.horizon = parse_horizon(j, report);
  sc.init_true = parse_belief(j, "init_true_mean", "init_true_cov", "scenario",
                              report, /*cov_optional=*/true);
  sc.init_estimator = parse_belief(j, "init_estimate_mean", "init_estimate_cov",
                                   "scenario", report, /*cov_optional=*/false);
  if (report.ok() &&
      (sc.init_true.mean.size() != sc.model.state_dim() ||
       sc.init_estimator.mean.size() != sc.model.state_dim())) {
    report.add("initial state dimensions do not match the model");
  }

  if (root.contains("attack")) {
    sc.attack = parse_attack(root["attack"], report);
  } else {
    report.add("attack section required for an explicit scenario");
  }
  if (report.ok() && sc.attack.mu_a.size() != sc.model.meas_dim()) {
    report.add("attack.mu_a dimension does not match the measurement model");
  }
  return sc;
}

inline bool parse_method(const std::string& name, Method& out) {
  std::string canon = name;
  for (auto& ch : canon) {
    if (ch == '-') ch = '_';
  }
  for (Method m : {Method::ProposedKf, Method::ProposedRtss, Method::StandardKf,
                   Method::StandardRtss}) {
    if (canon == method_label(m)) {
      out = m;
      return true;
    }
  }
  return false;
}

inline ExecutionConfig parse_execution(const json& root,
                                       ValidationReport& report) {
  ExecutionConfig exec;
  if (!root.contains("execution")) return exec;
  const json& j = root["execution"];
  if (!j.is_object()) {
    report.add("execution must be an object");
    return exec;
  }
  if (j.contains("runs")) {
    if (!j["runs"].is_number_integer() || j["runs"].get<long>() < 1) {
      report.add("execution.runs must be a positive integer");
    } else {
      exec.runs = static_cast<int>(j["runs"].get<long>());
    }
  }
  if (j.contains("base_seed")) {
    if (!j["base_seed"].is_number_unsigned() &&
        !j["base_seed"].is_number_integer()) {
      report.add("execution.base_seed must be a nonnegative integer");
    } else if (j["base_seed"].is_number_integer() &&
               j["base_seed"].get<long long>() < 0) {
      report.add("execution.base_seed must be a nonnegative integer");
    } else {
      exec.base_seed = j["base_seed"].get<std::uint64_t>();
    }
  }
  if (j.contains("methods")) {
    if (!j["methods"].is_array() || j["methods"].empty()) {
      report.add("execution.methods must be a nonempty array");
    } else {
      exec.methods.clear();
      for (const auto& item : j["methods"]) {
        Method m;
        if (!item.is_string() || !parse_method(item.get<std::string>(), m)) {
          report.add("unknown method '" + item.dump() + "'");
        } else {
          exec.methods.push_back(m);
        }
      }
    }
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) report.add("execution.out_dir must be a string");
    else exec.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("format")) {
    if (!j["format"].is_string() || j["format"].get<std::string>() != "csv") {
      report.add("execution.format must be \"csv\"");
    }
  }
  if (j.contains("full_cov")) {
    if (!j["full_cov"].is_boolean()) report.add("execution.full_cov must be a boolean");
    else exec.full_cov = j["full_cov"].get<bool>();
  }
  return exec;
}

}  // namespace cfg_detail

/// Parse and fully validate a config file, returning every violation found.
/// Throws ConfigError only when the file cannot be read at all.
inline ValidationReport validate_config_text(const std::string& text,
                                             RunConfig* out = nullptr) {
  ValidationReport report;
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    report.add(std::string("JSON parse error: ") + e.what());
    return report;
  }
  if (!root.is_object()) {
    report.add("config root must be an object");
    return report;
  }
  RunConfig cfg;
  cfg.scenario = cfg_detail::parse_scenario(root, report);
  cfg.execution = cfg_detail::parse_execution(root, report);
  if (out && report.ok()) *out = cfg;
  return report;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ValidationReport validate_config_file(const std::string& path,
                                             RunConfig* out = nullptr) {
  return validate_config_text(read_file(path), out);
}

/// Load a config or throw ConfigError listing every violation.
inline RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  ValidationReport report = validate_config_file(path, &cfg);
  if (!report.ok()) {
    throw ConfigError("invalid config '" + path + "':\n" + report.to_string());
  }
  return cfg;
}

}  // namespace attackkf
