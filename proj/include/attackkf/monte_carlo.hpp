#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "attackkf/attack.hpp"
#include "attackkf/errors.hpp"
#include "attackkf/filter.hpp"
#include "attackkf/random.hpp"
#include "attackkf/scenario.hpp"

namespace attackkf {

enum class Method { ProposedKf, ProposedRtss, StandardKf, StandardRtss };

inline const char* method_label(Method m) {
  switch (m) {
    case Method::ProposedKf: return "proposed_kf";
    case Method::ProposedRtss: return "proposed_rtss";
    case Method::StandardKf: return "standard_kf";
    case Method::StandardRtss: return "standard_rtss";
  }
  return "unknown";
}

/// Per-step RMSE curves for each requested method, in the method order given
/// to run_monte_carlo.
struct McResult {
  std::vector<Method> methods;
  std::vector<std::vector<double>> position_rmse;  // [method][step]
  std::vector<std::vector<double>> velocity_rmse;  // [method][step]
  int runs = 0;
  std::uint64_t base_seed = 0;
};

/// RMSE_k = sqrt(mean over runs of ||e_{r,k}||^2), from per-run per-step
/// error vectors. Accumulation is run-major in the given order.
inline std::vector<double> rmse_from_errors(
    const std::vector<std::vector<Eigen::VectorXd>>& errors) {
  if (errors.empty()) throw ConfigError("no error rows");
  const std::size_t horizon = errors.front().size();
  std::vector<double> acc(horizon, 0.0);
  for (const auto& run : errors) {
    if (run.size() != horizon) throw ConfigError("ragged error array");
    for (std::size_t k = 0; k < horizon; ++k) acc[k] += run[k].squaredNorm();
  }
  std::vector<double> rmse(horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    rmse[k] = std::sqrt(acc[k] / static_cast<double>(errors.size()));
  }
  return rmse;
}

namespace detail {

// Substream tags for one Monte Carlo run.
inline constexpr std::uint64_t kProcessStream = 1;
inline constexpr std::uint64_t kMeasurementStream = 2;
inline constexpr std::uint64_t kAttackStream = 3;

inline void accumulate_errors(const std::vector<Eigen::VectorXd>& means,
                              const std::vector<Eigen::VectorXd>& truth,
                              std::vector<double>& pos_acc,
                              std::vector<double>& vel_acc) {
  const Eigen::Index nx = truth.front().size();
  const Eigen::Index pos_n = std::min<Eigen::Index>(2, nx);
  const Eigen::Index vel_n = std::max<Eigen::Index>(0, std::min<Eigen::Index>(4, nx) - 2);
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const Eigen::VectorXd e = means[k] - truth[k];
    pos_acc[k] += e.head(pos_n).squaredNorm();
    if (vel_n > 0) vel_acc[k] += e.segment(2, vel_n).squaredNorm();
  }
}

}  // namespace detail

/// Seeded Monte Carlo benchmark. Run r uses seed base_seed + r, split into
/// independent process / measurement / attack substreams. Per-step squared
/// errors are accumulated in run order, so results are reproducible bit for
/// bit for a given base_seed.
inline McResult run_monte_carlo(const Scenario& scenario, int runs,
                                const std::vector<Method>& methods,
                                std::uint64_t base_seed) {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (methods.empty()) throw ConfigError("no methods selected");

  const std::size_t horizon = static_cast<std::size_t>(scenario.horizon);
  const std::size_t n_methods = methods.size();
  auto wants = [&](Method m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
  };
  const bool want_proposed =
      wants(Method::ProposedKf) || wants(Method::ProposedRtss);
  const bool want_standard =
      wants(Method::StandardKf) || wants(Method::StandardRtss);

  std::vector<std::vector<double>> pos_acc(n_methods,
                                           std::vector<double>(horizon, 0.0));
  std::vector<std::vector<double>> vel_acc(n_methods,
                                           std::vector<double>(horizon, 0.0));

  const ThetaParams theta{scenario.model, scenario.attack};

  for (int r = 0; r < runs; ++r) {
    const std::uint64_t run_seed = base_seed + static_cast<std::uint64_t>(r);
    RandomStream process_rng = derive_stream(run_seed, detail::kProcessStream);
    RandomStream meas_rng = derive_stream(run_seed, detail::kMeasurementStream);
    RandomStream attack_rng = derive_stream(run_seed, detail::kAttackStream);

    Trajectory traj;
    traj.states = simulate_states(scenario.model, scenario.init_true,
                                  scenario.horizon, process_rng);
    traj.clean_measurements =
        clean_measurements(scenario.model, traj.states, meas_rng);
    const auto attacked = attack_sequence(traj, scenario.attack, attack_rng);

    std::vector<Eigen::VectorXd> ys;
    ys.reserve(horizon);
    for (const auto& [y, realization] : attacked) ys.push_back(y);

    std::vector<Eigen::VectorXd> proposed_f, proposed_s, standard_f, standard_s;
    if (want_proposed) {
      const auto records = filter_pass(scenario.init_estimator, ys, theta);
      for (const auto& rec : records) proposed_f.push_back(rec.posterior.mean);
      if (wants(Method::ProposedRtss)) {
        const auto smoothed = rts_backward(records, scenario.model);
        for (const auto& b : smoothed.smoothed) proposed_s.push_back(b.mean);
      }
    }
    if (want_standard) {
      const auto records =
          standard_kf_forward(scenario.init_estimator, ys, scenario.model);
      for (const auto& rec : records) standard_f.push_back(rec.posterior.mean);
      if (wants(Method::StandardRtss)) {
        const auto smoothed = rts_backward(records, scenario.model);
        for (const auto& b : smoothed.smoothed) standard_s.push_back(b.mean);
      }
    }

    for (std::size_t i = 0; i < n_methods; ++i) {
      const std::vector<Eigen::VectorXd>* means = nullptr;
      switch (methods[i]) {
        case Method::ProposedKf: means = &proposed_f; break;
        case Method::ProposedRtss: means = &proposed_s; break;
        case Method::StandardKf: means = &standard_f; break;
        case Method::StandardRtss: means = &standard_s; break;
      }
      detail::accumulate_errors(*means, traj.states, pos_acc[i], vel_acc[i]);
    }
  }

  McResult result;
  result.methods = methods;
  result.runs = runs;
  result.base_seed = base_seed;
  result.position_rmse.resize(n_methods);
  result.velocity_rmse.resize(n_methods);
  for (std::size_t i = 0; i < n_methods; ++i) {
    result.position_rmse[i].resize(horizon);
    result.velocity_rmse[i].resize(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
      result.position_rmse[i][k] =
          std::sqrt(pos_acc[i][k] / static_cast<double>(runs));
      result.velocity_rmse[i][k] =
          std::sqrt(vel_acc[i][k] / static_cast<double>(runs));
    }
  }
  return result;
}

/// Mean of a per-step curve over [first_step, end).
inline double mean_from(const std::vector<double>& curve,
                        std::size_t first_step = 0) {
  if (first_step >= curve.size()) throw ConfigError("trim exceeds horizon");
  double sum = 0.0;
  for (std::size_t k = first_step; k < curve.size(); ++k) sum += curve[k];
  return sum / static_cast<double>(curve.size() - first_step);
}

}  // namespace attackkf
