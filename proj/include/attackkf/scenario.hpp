#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "attackkf/attack.hpp"
#include "attackkf/errors.hpp"
#include "attackkf/lgssm.hpp"

namespace attackkf {

/// A complete benchmark configuration: model, initial truth (zero covariance
/// means a deterministic initial state), the estimator's initial belief,
/// horizon, and the attack channel statistics. turn_rate is kept for
/// coordinated-turn scenarios; custom-matrix scenarios leave it at zero.
struct Scenario {
  double sample_time = 1.0;  // seconds
  double turn_rate = 0.0;    // rad/s
  LinearGaussianModel model;
  GaussianBelief init_true;
  GaussianBelief init_estimator;
  int horizon = 1;
  AttackParams attack;
};

/// Planar coordinated-turn dynamics with state (x, y, vx, vy):
/// position integrates a velocity that rotates by omega*t per step, the
/// sensor reads position only.
inline LinearGaussianModel build_ct_model(double sample_time, double turn_rate,
                                          const Eigen::MatrixXd& process_noise,
                                          const Eigen::MatrixXd& meas_noise) {
  if (turn_rate == 0.0) {
    throw ConfigError("turn rate must be nonzero for the coordinated-turn model");
  }
  if (sample_time <= 0.0) throw ConfigError("sample time must be positive");

  const double wt = turn_rate * sample_time;
  const double s = std::sin(wt);
  const double c = std::cos(wt);
  LinearGaussianModel m;
  m.A.setZero(4, 4);
  m.A << 1.0, 0.0, s / turn_rate, -(1.0 - c) / turn_rate,
      0.0, 1.0, (1.0 - c) / turn_rate, s / turn_rate,
      0.0, 0.0, c, -s,
      0.0, 0.0, s, c;
  m.H.setZero(2, 4);
  m.H(0, 0) = 1.0;
  m.H(1, 1) = 1.0;
  m.Q = process_noise;
  m.R = meas_noise;

  ValidationReport report = validate_model_for_simulation(m);
  if (!report.ok()) {
    throw ConfigError("invalid coordinated-turn model: " + report.to_string());
  }
  return m;
}

inline double deg_to_rad(double deg) {
  return deg * (3.141592653589793238462643383279502884 / 180.0);
}

/// The built-in aircraft tracking benchmark: a 20 s coordinated turn at
/// 3 deg/s sampled at 50 ms, position-only measurements, and a channel that
/// mixes DoS with additive and multiplicative injections.
inline Scenario default_scenario() {
  Scenario sc;
  sc.sample_time = 0.05;
  sc.turn_rate = deg_to_rad(3.0);
  sc.horizon = 400;  // 20 s / 0.05 s

  Eigen::VectorXd q_diag(4);
  q_diag << 0.3 * 0.3, 0.3 * 0.3, 0.05 * 0.05, 0.05 * 0.05;
  Eigen::VectorXd r_diag(2);
  r_diag << 12.0, 12.0;
  sc.model = build_ct_model(sc.sample_time, sc.turn_rate,
                            q_diag.asDiagonal().toDenseMatrix(),
                            r_diag.asDiagonal().toDenseMatrix());

  sc.init_true.mean.resize(4);
  sc.init_true.mean << 200.0, 200.0, 15.0, 15.0;
  sc.init_true.cov = Eigen::MatrixXd::Zero(4, 4);

  sc.init_estimator.mean.resize(4);
  sc.init_estimator.mean << 250.0, 150.0, 12.0, 17.0;
  Eigen::VectorXd p_diag(4);
  p_diag << 100.0, 100.0, 16.0, 16.0;
  sc.init_estimator.cov = p_diag.asDiagonal();

  sc.attack.alpha_a = 0.3;
  sc.attack.alpha_b = 0.7;
  sc.attack.alpha_c = 0.9;
  sc.attack.alpha_m = 0.1;
  sc.attack.mu_a.resize(2);
  sc.attack.mu_a << 0.7, 0.9;
  Eigen::VectorXd sig_diag(2);
  sig_diag << 1.0, 0.5;
  sc.attack.Sigma_a = sig_diag.asDiagonal();
  sc.attack.mu_m = 0.95;
  sc.attack.sigma_m_sq = 0.10 * 0.10;
  return sc;
}

}  // namespace attackkf
