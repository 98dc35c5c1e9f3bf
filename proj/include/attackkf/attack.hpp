#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "attackkf/errors.hpp"
#include "attackkf/lgssm.hpp"
#include "attackkf/linalg.hpp"
#include "attackkf/random.hpp"

namespace attackkf {

/// Stochastic description of the measurement channel under attack. Four
/// Bernoulli switches gate the channel:
///   xi_b  measurement passes untouched
///   xi_c  measurement transmitted at all (0 with xi_b = 0 means DoS: y = 0)
///   xi_a  additive corruption a ~ N(mu_a, Sigma_a) injected
///   xi_m  multiplicative corruption by scalar m ~ N(mu_m, sigma_m_sq)
struct AttackParams {
  double alpha_a = 0.0;
  double alpha_b = 1.0;
  double alpha_c = 1.0;
  double alpha_m = 0.0;
  Eigen::VectorXd mu_a;
  Eigen::MatrixXd Sigma_a;
  double mu_m = 1.0;
  double sigma_m_sq = 0.0;
};

inline ValidationReport validate_attack(const AttackParams& p) {
  ValidationReport report;
  auto check_prob = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      report.add(std::string(name) + " must lie in [0, 1], got " +
                 std::to_string(v));
    }
  };
  check_prob(p.alpha_a, "alpha_a");
  check_prob(p.alpha_b, "alpha_b");
  check_prob(p.alpha_c, "alpha_c");
  check_prob(p.alpha_m, "alpha_m");
  if (p.sigma_m_sq < 0.0) report.add("sigma_m_sq must be >= 0");
  if (p.Sigma_a.rows() != p.mu_a.size() || p.Sigma_a.cols() != p.mu_a.size()) {
    report.add("Sigma_a must be square with the dimension of mu_a");
  } else if (!is_symmetric(p.Sigma_a, 1e-9)) {
    report.add("Sigma_a is not symmetric");
  } else if (!is_psd(p.Sigma_a)) {
    report.add("Sigma_a is not positive semidefinite");
  }
  return report;
}

/// One sampled outcome of the channel at a single step. a and m are present
/// exactly when their switch fired.
struct AttackRealization {
  bool xi_a = false;
  bool xi_b = false;
  bool xi_c = false;
  bool xi_m = false;
  std::optional<Eigen::VectorXd> a;
  std::optional<double> m;
};

enum class AttackType {
  NoAttack,
  AdditiveFdia,
  MultiplicativeFdia,
  SimultaneousFdia,
  Dos,
};

inline const char* to_string(AttackType t) {
  switch (t) {
    case AttackType::NoAttack: return "NoAttack";
    case AttackType::AdditiveFdia: return "AdditiveFDIA";
    case AttackType::MultiplicativeFdia: return "MultiplicativeFDIA";
    case AttackType::SimultaneousFdia: return "SimultaneousFDIA";
    case AttackType::Dos: return "DoS";
  }
  return "unknown";
}

/// y = xi_b z + (1 - xi_b) xi_c (1 + xi_m (m - 1)) (z + xi_a a)
inline Eigen::VectorXd apply_attack(const Eigen::VectorXd& z,
                                    const AttackRealization& r) {
  if (r.xi_b) return z;
  if (!r.xi_c) return Eigen::VectorXd::Zero(z.size());
  Eigen::VectorXd out = z;
  if (r.xi_a) out += *r.a;
  if (r.xi_m) out *= 1.0 + (*r.m - 1.0);
  return out;
}

inline AttackType classify_attack(const AttackRealization& r) {
  if (r.xi_b) return AttackType::NoAttack;
  if (!r.xi_c) return AttackType::Dos;
  if (r.xi_a && r.xi_m) return AttackType::SimultaneousFdia;
  if (r.xi_a) return AttackType::AdditiveFdia;
  if (r.xi_m) return AttackType::MultiplicativeFdia;
  return AttackType::NoAttack;  // transmitted unmodified
}

/// Reusable sampler: factors Sigma_a once. Draw order per step is fixed:
/// xi_b, xi_c, xi_m, xi_a, then m if xi_m, then a if xi_a.
class AttackChannel {
 public:
  explicit AttackChannel(const AttackParams& params)
      : params_(params), sigma_a_factor_(psd_sqrt(params.Sigma_a)) {
    ValidationReport report = validate_attack(params);
    if (!report.ok()) {
      throw ConfigError("invalid attack parameters: " + report.to_string());
    }
  }

  const AttackParams& params() const { return params_; }

  std::pair<Eigen::VectorXd, AttackRealization> sample(
      const Eigen::VectorXd& z, RandomStream& rng) const {
    if (z.size() != params_.mu_a.size()) {
      throw ConfigError("measurement dimension does not match mu_a");
    }
    AttackRealization r;
    r.xi_b = rng.bernoulli(params_.alpha_b);
    r.xi_c = rng.bernoulli(params_.alpha_c);
    r.xi_m = rng.bernoulli(params_.alpha_m);
    r.xi_a = rng.bernoulli(params_.alpha_a);
    if (r.xi_m) {
      r.m = params_.mu_m + std::sqrt(params_.sigma_m_sq) * rng.normal();
    }
    if (r.xi_a) {
      r.a = params_.mu_a + sigma_a_factor_ * rng.normal_vector(z.size());
    }
    return {apply_attack(z, r), r};
  }

 private:
  AttackParams params_;
  Eigen::MatrixXd sigma_a_factor_;
};

inline std::pair<Eigen::VectorXd, AttackRealization> sample_attack(
    const Eigen::VectorXd& z, const AttackParams& params, RandomStream& rng) {
  return AttackChannel(params).sample(z, rng);
}

/// Apply the channel independently at every step of a trajectory.
inline std::vector<std::pair<Eigen::VectorXd, AttackRealization>>
attack_sequence(const Trajectory& traj, const AttackParams& params,
                RandomStream& rng) {
  AttackChannel channel(params);
  std::vector<std::pair<Eigen::VectorXd, AttackRealization>> out;
  out.reserve(traj.clean_measurements.size());
  for (const auto& z : traj.clean_measurements) {
    out.push_back(channel.sample(z, rng));
  }
  return out;
}

}  // namespace attackkf
