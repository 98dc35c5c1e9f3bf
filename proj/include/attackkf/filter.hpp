#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "attackkf/errors.hpp"
#include "attackkf/gslr.hpp"
#include "attackkf/lgssm.hpp"
#include "attackkf/linalg.hpp"

namespace attackkf {

/// Per-step output of a forward pass. When the surrogate carries no
/// information (singular innovation covariance, e.g. a certain-DoS channel)
/// the update is skipped and posterior == prior.
struct FilterStepRecord {
  GaussianBelief prior;
  GaussianBelief posterior;
  GslrApproximation gslr;
  Eigen::VectorXd innovation;
  bool skipped_update = false;
};

struct SmootherResult {
  std::vector<GaussianBelief> smoothed;
  std::vector<Eigen::MatrixXd> gains;  // length T-1
};

struct UpdateResult {
  GaussianBelief posterior;
  Eigen::VectorXd innovation;
  bool skipped = false;
};

/// mean <- A mean, cov <- A cov A^T + Q
inline GaussianBelief predict(const GaussianBelief& post,
                              const LinearGaussianModel& model) {
  if (post.mean.size() != model.state_dim()) {
    throw ConfigError("belief dimension does not match the model");
  }
  GaussianBelief prior;
  prior.mean = model.A * post.mean;
  prior.cov = symmetrize(model.A * post.cov * model.A.transpose() + model.Q);
  return prior;
}

/// Measurement update against the affine surrogate:
///   S = H+ P H+^T + Omega, K = P H+^T S^-1,
///   mean += K (y - H+ xhat - b+), cov -= K S K^T.
/// S is treated as singular (update skipped) when its smallest eigenvalue
/// does not exceed 1e-10 of the largest, or the matrix is zero.
/// joseph_form switches the covariance update to
///   (I - K H+) P (I - K H+)^T + K Omega K^T for ill-conditioned runs.
inline UpdateResult update(const GaussianBelief& prior, const Eigen::VectorXd& y,
                           const GslrApproximation& gslr,
                           bool joseph_form = false) {
  if (gslr.H_plus.cols() != prior.mean.size() ||
      gslr.H_plus.rows() != y.size() || gslr.b_plus.size() != y.size()) {
    throw ConfigError("surrogate dimensions do not match prior/measurement");
  }

  UpdateResult r;
  r.innovation = y - gslr.H_plus * prior.mean - gslr.b_plus;

  const Eigen::MatrixXd s = symmetrize(
      gslr.H_plus * prior.cov * gslr.H_plus.transpose() + gslr.Omega_tilde);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  const double lam_max = es.eigenvalues().maxCoeff();
  const double lam_min = es.eigenvalues().minCoeff();
  if (lam_max <= 0.0 || !(lam_min > 1e-10 * lam_max)) {
    r.posterior = prior;
    r.skipped = true;
    return r;
  }

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
  const Eigen::MatrixXd gain =
      ldlt.solve(gslr.H_plus * prior.cov).transpose();  // P H+^T S^-1

  r.posterior.mean = prior.mean + gain * r.innovation;
  if (joseph_form) {
    const Eigen::MatrixXd ikh =
        Eigen::MatrixXd::Identity(prior.mean.size(), prior.mean.size()) -
        gain * gslr.H_plus;
    r.posterior.cov = symmetrize(ikh * prior.cov * ikh.transpose() +
                                 gain * gslr.Omega_tilde * gain.transpose());
  } else {
    r.posterior.cov =
        symmetrize(prior.cov - gain * s * gain.transpose());
  }
  return r;
}

/// Forward pass: predict, fit the surrogate at the predicted density, update.
/// A singular predicted covariance (noise-free corner scenarios) falls back
/// to the support-subspace surrogate instead of erroring; any information in
/// the surrogate then flows through the usual update, and a fully
/// uninformative one is skipped.
inline std::vector<FilterStepRecord> filter_pass(
    const GaussianBelief& init, const std::vector<Eigen::VectorXd>& measurements,
    const ThetaParams& theta, bool joseph_form = false) {
  if (measurements.empty()) throw ConfigError("no measurements");

  std::vector<FilterStepRecord> records;
  records.reserve(measurements.size());
  GaussianBelief belief = init;
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    FilterStepRecord rec;
    rec.prior = predict(belief, theta.model);
    try {
      rec.gslr =
          detail::gslr_params_impl(rec.prior, theta, /*allow_singular=*/true);
    } catch (const NumericalError& e) {
      throw NumericalError(e.what(), static_cast<long>(k + 1));
    }
    UpdateResult up = update(rec.prior, measurements[k], rec.gslr, joseph_form);
    rec.posterior = up.posterior;
    rec.innovation = up.innovation;
    rec.skipped_update = up.skipped;
    belief = rec.posterior;
    records.push_back(std::move(rec));
  }
  return records;
}

/// Backward recursion over filtered records:
///   K_s = P_{k|k} A^T P_{k+1|k}^-1
///   mean_s = mean_f + K_s (mean_s_{k+1} - mean_p_{k+1})
///   cov_s  = cov_f + K_s (cov_s_{k+1} - cov_p_{k+1}) K_s^T
/// Gains are obtained by linear solves; if the predicted covariance fails to
/// factor, one diagonal jitter of 1e-12 * trace/n is applied before erroring.
inline SmootherResult rts_backward(const std::vector<FilterStepRecord>& records,
                                   const LinearGaussianModel& model) {
  if (records.empty()) throw ConfigError("no filter records");
  const std::size_t horizon = records.size();

  SmootherResult result;
  result.smoothed.resize(horizon);
  result.smoothed[horizon - 1] = records[horizon - 1].posterior;
  if (horizon > 1) result.gains.resize(horizon - 1);

  for (std::size_t k = horizon - 1; k-- > 0;) {
    const GaussianBelief& filtered = records[k].posterior;
    const GaussianBelief& pred_next = records[k + 1].prior;

    Eigen::LLT<Eigen::MatrixXd> llt(pred_next.cov);
    if (llt.info() != Eigen::Success) {
      const double jitter =
          1e-12 * pred_next.cov.trace() / static_cast<double>(pred_next.cov.rows());
      llt.compute(pred_next.cov +
                  jitter * Eigen::MatrixXd::Identity(pred_next.cov.rows(),
                                                     pred_next.cov.cols()));
      if (llt.info() != Eigen::Success) {
        throw NumericalError("singular predicted covariance in smoother",
                             static_cast<long>(k + 2));
      }
    }
    // K_s^T = P_{k+1|k}^-1 A P_{k|k}
    const Eigen::MatrixXd gain =
        llt.solve(model.A * filtered.cov).transpose();

    const GaussianBelief& next_smoothed = result.smoothed[k + 1];
    GaussianBelief s;
    s.mean = filtered.mean + gain * (next_smoothed.mean - pred_next.mean);
    s.cov = symmetrize(filtered.cov +
                       gain * (next_smoothed.cov - pred_next.cov) *
                           gain.transpose());
    result.smoothed[k] = std::move(s);
    result.gains[k] = gain;
  }
  return result;
}

/// Textbook Kalman filter forward pass on (H, R), blind to the attack
/// channel. Baseline for benchmarks; coded independently of the surrogate
/// update on purpose.
inline std::vector<FilterStepRecord> standard_kf_forward(
    const GaussianBelief& init, const std::vector<Eigen::VectorXd>& measurements,
    const LinearGaussianModel& model) {
  if (measurements.empty()) throw ConfigError("no measurements");

  std::vector<FilterStepRecord> records;
  records.reserve(measurements.size());
  GaussianBelief belief = init;
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    FilterStepRecord rec;
    rec.prior = predict(belief, model);
    rec.gslr.H_plus = model.H;
    rec.gslr.b_plus = Eigen::VectorXd::Zero(model.meas_dim());
    rec.gslr.Omega_tilde = model.R;
    rec.innovation = measurements[k] - model.H * rec.prior.mean;

    const Eigen::MatrixXd s = symmetrize(
        model.H * rec.prior.cov * model.H.transpose() + model.R);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s,
                                                      Eigen::EigenvaluesOnly);
    const double lam_max = es.eigenvalues().maxCoeff();
    if (lam_max <= 0.0 || !(es.eigenvalues().minCoeff() > 1e-10 * lam_max)) {
      rec.posterior = rec.prior;
      rec.skipped_update = true;
    } else {
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
      const Eigen::MatrixXd gain =
          ldlt.solve(model.H * rec.prior.cov).transpose();
      rec.posterior.mean = rec.prior.mean + gain * rec.innovation;
      rec.posterior.cov =
          symmetrize(rec.prior.cov - gain * s * gain.transpose());
    }
    belief = rec.posterior;
    records.push_back(std::move(rec));
  }
  return records;
}

/// Standard KF plus the shared RTS backward pass.
inline std::pair<std::vector<FilterStepRecord>, SmootherResult> standard_kf_rtss(
    const GaussianBelief& init, const std::vector<Eigen::VectorXd>& measurements,
    const LinearGaussianModel& model) {
  std::vector<FilterStepRecord> records =
      standard_kf_forward(init, measurements, model);
  SmootherResult smoothed = rts_backward(records, model);
  return {std::move(records), std::move(smoothed)};
}

}  // namespace attackkf
