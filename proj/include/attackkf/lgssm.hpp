#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "attackkf/errors.hpp"
#include "attackkf/linalg.hpp"
#include "attackkf/random.hpp"

namespace attackkf {

/// A Gaussian state density: mean and covariance. Zero covariance is allowed
/// and denotes a deterministic state.
struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  Eigen::Index dim() const { return mean.size(); }
};

/// x_k = A x_{k-1} + eta,  eta ~ N(0, Q)
/// z_k = H x_k     + nu,   nu  ~ N(0, R)
struct LinearGaussianModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd H;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index meas_dim() const { return H.rows(); }
};

/// Ground truth for steps k = 1..T. The initial state is not stored here;
/// it is whatever belief the simulation was started from.
struct Trajectory {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> clean_measurements;

  std::size_t length() const { return states.size(); }
};

/// Dimension and PSD checks only; strict positivity of R is not required,
/// which admits the noise-free corner scenarios a simulation may use.
inline ValidationReport validate_model_for_simulation(
    const LinearGaussianModel& model) {
  ValidationReport report;
  const Eigen::Index nx = model.A.rows();
  const Eigen::Index nz = model.H.rows();
  if (model.A.cols() != nx) {
    report.add("A must be square, got " + std::to_string(model.A.rows()) + "x" +
               std::to_string(model.A.cols()));
  }
  if (model.H.cols() != nx) {
    report.add("H has " + std::to_string(model.H.cols()) +
               " columns, expected state dimension " + std::to_string(nx));
  }
  if (model.Q.rows() != nx || model.Q.cols() != nx) {
    report.add("Q must be " + std::to_string(nx) + "x" + std::to_string(nx));
  } else if (!is_symmetric(model.Q, 1e-9)) {
    report.add("Q is not symmetric");
  } else if (!is_psd(model.Q)) {
    report.add("Q is not positive semidefinite");
  }
  if (model.R.rows() != nz || model.R.cols() != nz) {
    report.add("R must be " + std::to_string(nz) + "x" + std::to_string(nz));
  } else if (!is_symmetric(model.R, 1e-9)) {
    report.add("R is not symmetric");
  } else if (!is_psd(model.R)) {
    report.add("R is not positive semidefinite");
  }
  return report;
}

/// Full model invariants: dimensions, symmetric PSD Q and R, R strictly
/// positive definite.
inline ValidationReport validate_model(const LinearGaussianModel& model) {
  ValidationReport report = validate_model_for_simulation(model);
  if (report.ok()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(model.R),
                                                      Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      report.add("R must be strictly positive definite");
    }
  }
  return report;
}

/// States x_1..x_T with x_0 drawn from init. Draw order per step: the n_x
/// standard normals behind the process noise (the initial draw included),
/// always consumed even for zero covariance.
inline std::vector<Eigen::VectorXd> simulate_states(
    const LinearGaussianModel& model, const GaussianBelief& init, int horizon,
    RandomStream& rng) {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  ValidationReport report = validate_model_for_simulation(model);
  if (!report.ok()) throw ConfigError("invalid model: " + report.to_string());
  if (init.mean.size() != model.state_dim()) {
    throw ConfigError("initial mean dimension does not match the model");
  }

  const Eigen::MatrixXd init_factor = psd_sqrt(init.cov);
  const Eigen::MatrixXd q_factor = psd_sqrt(model.Q);
  const Eigen::Index nx = model.state_dim();

  std::vector<Eigen::VectorXd> states;
  states.reserve(static_cast<std::size_t>(horizon));
  Eigen::VectorXd x = init.mean + init_factor * rng.normal_vector(nx);
  for (int k = 0; k < horizon; ++k) {
    x = model.A * x + q_factor * rng.normal_vector(nx);
    states.push_back(x);
  }
  return states;
}

/// z_k = H x_k + nu_k for every provided state.
inline std::vector<Eigen::VectorXd> clean_measurements(
    const LinearGaussianModel& model, const std::vector<Eigen::VectorXd>& states,
    RandomStream& rng) {
  const Eigen::MatrixXd r_factor = psd_sqrt(model.R);
  const Eigen::Index nz = model.meas_dim();
  std::vector<Eigen::VectorXd> zs;
  zs.reserve(states.size());
  for (const auto& x : states) {
    zs.push_back(model.H * x + r_factor * rng.normal_vector(nz));
  }
  return zs;
}

/// Full ground-truth simulation from a single stream: the state sequence is
/// drawn first, then the measurement noise sequence.
inline Trajectory simulate_trajectory(const LinearGaussianModel& model,
                                      const GaussianBelief& init, int horizon,
                                      RandomStream& rng) {
  Trajectory traj;
  traj.states = simulate_states(model, init, horizon, rng);
  traj.clean_measurements = clean_measurements(model, traj.states, rng);
  return traj;
}

}  // namespace attackkf
