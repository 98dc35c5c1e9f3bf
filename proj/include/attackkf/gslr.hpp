#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "attackkf/attack.hpp"
#include "attackkf/errors.hpp"
#include "attackkf/lgssm.hpp"
#include "attackkf/linalg.hpp"
#include "attackkf/random.hpp"

namespace attackkf {

/// Everything the estimator knows about dynamics, sensing, and the attack
/// channel statistics. The estimator never sees attack realizations.
struct ThetaParams {
  LinearGaussianModel model;
  AttackParams attack;
};

/// Affine surrogate y ~= H_plus x + b_plus + noise, noise ~ N(0, Omega_tilde),
/// the best affine fit of the attacked channel under the reference density.
struct GslrApproximation {
  Eigen::MatrixXd H_plus;
  Eigen::VectorXd b_plus;
  Eigen::MatrixXd Omega_tilde;
};

/// First and second moments of the received measurement under the prior:
/// mean, covariance, and cross-covariance with the state.
struct PredictedMeasurementMoments {
  Eigen::VectorXd y_hat;
  Eigen::MatrixXd P_yy;
  Eigen::MatrixXd P_yx;
};

// The scalar channel coefficient W = (1 - xi_b) xi_c (1 + xi_m (m - 1))
// multiplies the attacked branch; its low-order moments drive every closed
// form below.

/// E[W] = (1 - alpha_b) alpha_c (1 + alpha_m (mu_m - 1))
inline double mixing_mean(const AttackParams& p) {
  return (1.0 - p.alpha_b) * p.alpha_c * (1.0 + p.alpha_m * (p.mu_m - 1.0));
}

/// E[W^2] = (1 - alpha_b) alpha_c [(1 - alpha_m) + alpha_m (sigma_m^2 + mu_m^2)]
inline double mixing_second_moment(const AttackParams& p) {
  return (1.0 - p.alpha_b) * p.alpha_c *
         ((1.0 - p.alpha_m) + p.alpha_m * (p.sigma_m_sq + p.mu_m * p.mu_m));
}

/// Var[W] = E[W^2] - E[W]^2, in the expanded product form.
inline double mixing_variance(const AttackParams& p) {
  const double c = 1.0 + p.alpha_m * (p.mu_m - 1.0);
  return (1.0 - p.alpha_b) * p.alpha_c *
         (((1.0 - p.alpha_m) + p.alpha_m * (p.mu_m * p.mu_m + p.sigma_m_sq)) -
          (1.0 - p.alpha_b) * p.alpha_c * c * c);
}

/// Covariance of the centered additive term
/// xi_a (a - mu_a) + (xi_a - alpha_a) mu_a:
///   alpha_a Sigma_a + alpha_a (1 - alpha_a) mu_a mu_a^T
inline Eigen::MatrixXd additive_term_cov(const AttackParams& p) {
  return p.alpha_a * p.Sigma_a +
         p.alpha_a * (1.0 - p.alpha_a) * (p.mu_a * p.mu_a.transpose());
}

namespace detail {

inline void check_theta_dims(const GaussianBelief& prior,
                             const ThetaParams& theta) {
  if (prior.mean.size() != theta.model.state_dim() ||
      prior.cov.rows() != theta.model.state_dim() ||
      prior.cov.cols() != theta.model.state_dim()) {
    throw ConfigError("prior dimension does not match the model");
  }
  if (theta.attack.mu_a.size() != theta.model.meas_dim()) {
    throw ConfigError("attack dimension does not match the measurement model");
  }
}

}  // namespace detail

/// E[y] = alpha_b H xhat + E[W] (H xhat + alpha_a mu_a)
inline Eigen::VectorXd predicted_mean(const GaussianBelief& prior,
                                      const ThetaParams& theta) {
  detail::check_theta_dims(prior, theta);
  const Eigen::VectorXd hx = theta.model.H * prior.mean;
  return theta.attack.alpha_b * hx +
         mixing_mean(theta.attack) *
             (hx + theta.attack.alpha_a * theta.attack.mu_a);
}

/// Cov[y] = E_prior[V[y|x]] + V_prior[E[y|x]].
///
/// V_prior[E[y|x]] = (alpha_b + E[W])^2 H P H^T.
///
/// E_prior[V[y|x]] carries the Bernoulli spread of the pass-through switch,
/// the measurement noise on every transmitted branch, the additive and
/// multiplicative corruption masses, and the covariance between the clean
/// switch xi_b and W. That last piece, Cov(xi_b, W) = -alpha_b E[W] (since
/// xi_b W = 0 identically), couples the pass-through and attacked branches
/// and is required for agreement with the sampled channel.
inline Eigen::MatrixXd predicted_cov(const GaussianBelief& prior,
                                     const ThetaParams& theta) {
  detail::check_theta_dims(prior, theta);
  const AttackParams& atk = theta.attack;
  const Eigen::MatrixXd& H = theta.model.H;
  const Eigen::MatrixXd& P = prior.cov;
  const Eigen::VectorXd& xhat = prior.mean;

  const double w_mean = mixing_mean(atk);
  const double w_sq = mixing_second_moment(atk);
  const double w_var = mixing_variance(atk);
  const double pass = atk.alpha_b + w_mean;

  const Eigen::MatrixXd second_moment =
      P + xhat * xhat.transpose();  // E_prior[x x^T]
  const Eigen::MatrixXd h_m2_h = H * second_moment * H.transpose();
  const Eigen::MatrixXd hx_mu =
      (H * xhat) * atk.mu_a.transpose();  // H xhat mu_a^T

  Eigen::MatrixXd cov =
      pass * pass * (H * P * H.transpose())                       // V_pr[E[y|x]]
      + atk.alpha_b * (1.0 - atk.alpha_b) * h_m2_h                // xi_b spread
      + atk.alpha_b * theta.model.R                               // clean noise
      + w_sq * (additive_term_cov(atk) + theta.model.R)           // attacked branch
      + w_var * (h_m2_h + atk.alpha_a * (hx_mu + hx_mu.transpose()) +
                 atk.alpha_a * atk.alpha_a *
                     (atk.mu_a * atk.mu_a.transpose()))           // W spread
      - atk.alpha_b * w_mean *
            (2.0 * h_m2_h + atk.alpha_a * (hx_mu + hx_mu.transpose()));
  return symmetrize(cov);
}

/// Cov[y, x] = (alpha_b + E[W]) H P
inline Eigen::MatrixXd predicted_cross_cov(const GaussianBelief& prior,
                                           const ThetaParams& theta) {
  detail::check_theta_dims(prior, theta);
  return (theta.attack.alpha_b + mixing_mean(theta.attack)) * theta.model.H *
         prior.cov;
}

namespace detail {

/// Shared surrogate construction. With allow_singular the prior inverse is
/// replaced by the eigenvalue-truncated pseudo-inverse, which fits the
/// surrogate on the support of the prior; off-support directions carry no
/// probability mass, so the matched moments are unchanged.
inline GslrApproximation gslr_params_impl(const GaussianBelief& prior,
                                          const ThetaParams& theta,
                                          bool allow_singular) {
  check_theta_dims(prior, theta);
  const Eigen::MatrixXd& P = prior.cov;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(P));
  if (es.info() != Eigen::Success) {
    throw NumericalError("prior covariance eigendecomposition failed");
  }
  const double lam_max = es.eigenvalues().maxCoeff();
  const double lam_min = es.eigenvalues().minCoeff();
  const bool invertible = lam_max > 0.0 && lam_min > 1e-12 * lam_max;
  if (!invertible && !allow_singular) {
    throw NumericalError("prior covariance is singular in gslr_params");
  }

  const Eigen::VectorXd y_hat = predicted_mean(prior, theta);
  const Eigen::MatrixXd p_yy = predicted_cov(prior, theta);
  const Eigen::MatrixXd p_yx = predicted_cross_cov(prior, theta);

  GslrApproximation out;
  if (invertible) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(symmetrize(P));
    if (ldlt.info() != Eigen::Success) {
      throw NumericalError("prior covariance factorization failed");
    }
    out.H_plus = ldlt.solve(p_yx.transpose()).transpose();
  } else {
    Eigen::VectorXd inv_lam = Eigen::VectorXd::Zero(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < inv_lam.size(); ++i) {
      const double lam = es.eigenvalues()[i];
      if (lam > 1e-12 * lam_max && lam > 0.0) inv_lam[i] = 1.0 / lam;
    }
    out.H_plus = p_yx * es.eigenvectors() * inv_lam.asDiagonal() *
                 es.eigenvectors().transpose();
  }
  out.b_plus = y_hat - out.H_plus * prior.mean;
  // The subtraction can leave the exact Schur complement slightly indefinite;
  // clamp against the scale of P_yy, which bounds every term in it. On the
  // degenerate-prior fallback the eigenvalues of P are themselves roundoff,
  // so there is no meaningful scale to test against: floor silently.
  const Eigen::MatrixXd schur =
      p_yy - out.H_plus * P * out.H_plus.transpose();
  out.Omega_tilde = invertible ? clamp_psd(schur, 1e-9, p_yy.norm())
                               : psd_floor(schur);
  return out;
}

}  // namespace detail

/// Moment-matched affine surrogate:
///   H_plus = P_yx P^-1, b_plus = y_hat - H_plus xhat,
///   Omega_tilde = P_yy - H_plus P H_plus^T (a Schur complement, PSD).
/// The prior inversion goes through a symmetric factorization solve.
/// Throws NumericalError when the prior covariance is singular; callers that
/// must survive degenerate priors decide their own fallback.
inline GslrApproximation gslr_params(const GaussianBelief& prior,
                                     const ThetaParams& theta) {
  return detail::gslr_params_impl(prior, theta, /*allow_singular=*/false);
}

/// Sampling oracle for the closed-form moments: draw x from the prior,
/// push it through the sensor and the attack channel, accumulate empirical
/// mean / covariance / cross-covariance (population normalization).
inline PredictedMeasurementMoments mc_moment_oracle(const GaussianBelief& prior,
                                                    const ThetaParams& theta,
                                                    std::int64_t samples,
                                                    RandomStream& rng) {
  detail::check_theta_dims(prior, theta);
  if (samples < 1) throw ConfigError("samples must be >= 1");

  const Eigen::Index nx = theta.model.state_dim();
  const Eigen::Index nz = theta.model.meas_dim();
  const Eigen::MatrixXd prior_factor = psd_sqrt(prior.cov);
  const Eigen::MatrixXd r_factor = psd_sqrt(theta.model.R);
  const AttackChannel channel(theta.attack);

  Eigen::VectorXd sum_y = Eigen::VectorXd::Zero(nz);
  Eigen::VectorXd sum_x = Eigen::VectorXd::Zero(nx);
  Eigen::MatrixXd sum_yy = Eigen::MatrixXd::Zero(nz, nz);
  Eigen::MatrixXd sum_yx = Eigen::MatrixXd::Zero(nz, nx);

  for (std::int64_t i = 0; i < samples; ++i) {
    const Eigen::VectorXd x = prior.mean + prior_factor * rng.normal_vector(nx);
    const Eigen::VectorXd z = theta.model.H * x + r_factor * rng.normal_vector(nz);
    const Eigen::VectorXd y = channel.sample(z, rng).first;
    sum_y += y;
    sum_x += x;
    sum_yy += y * y.transpose();
    sum_yx += y * x.transpose();
  }

  const double n = static_cast<double>(samples);
  PredictedMeasurementMoments m;
  m.y_hat = sum_y / n;
  const Eigen::VectorXd x_bar = sum_x / n;
  m.P_yy = symmetrize(sum_yy / n - m.y_hat * m.y_hat.transpose());
  m.P_yx = sum_yx / n - m.y_hat * x_bar.transpose();
  return m;
}

}  // namespace attackkf
