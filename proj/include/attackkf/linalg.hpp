#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "attackkf/errors.hpp"

namespace attackkf {

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

inline bool is_symmetric(const Eigen::MatrixXd& m, double rtol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  return (m - m.transpose().eval()).cwiseAbs().maxCoeff() <= rtol * scale;
}

/// Eigenvalue-based PSD test: all eigenvalues >= -rtol * max eigenvalue.
/// The zero matrix counts as PSD.
inline bool is_psd(const Eigen::MatrixXd& m, double rtol = 1e-10) {
  if (m.rows() != m.cols() || !is_symmetric(m, 1e-9)) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m),
                                                    Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (hi <= 0.0) return lo >= -rtol * std::abs(hi) - 1e-300;
  return lo >= -rtol * hi;
}

/// Square-root factor L with L L^T = cov, for sampling. Tries Cholesky first;
/// PSD-but-singular inputs (zero noise scenarios) fall back to an
/// eigendecomposition with negative eigenvalues clamped to zero.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(cov));
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition failed in psd_sqrt");
  }
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
}

/// Floor negative eigenvalues at zero, no questions asked. For quantities
/// that are PSD in exact arithmetic but live at roundoff scale.
inline Eigen::MatrixXd psd_floor(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m));
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
         es.eigenvectors().transpose();
}

/// Clamp tiny negative eigenvalues (>= -rtol relative) to zero. Larger
/// negatives mean the caller fed something that is not a covariance.
/// scale_hint sets the reference magnitude for matrices that are differences
/// of larger quantities and may be legitimately ~0.
inline Eigen::MatrixXd clamp_psd(const Eigen::MatrixXd& m, double rtol = 1e-9,
                                 double scale_hint = 0.0) {
  Eigen::MatrixXd sym = symmetrize(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double scale = std::max(lam.maxCoeff(), scale_hint);
  if (lam.minCoeff() >= 0.0) return sym;
  const double floor = (scale > 0.0) ? -rtol * scale : -1e-300;
  if (lam.minCoeff() < floor) {
    throw NumericalError("matrix is not PSD within tolerance in clamp_psd");
  }
  return es.eigenvectors() * lam.cwiseMax(0.0).asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace attackkf
