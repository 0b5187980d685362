#pragma once

#include "socnav/uncertainty/models.hpp"

namespace socnav::uncertainty {

inline constexpr double kPsdTol = 1e-8;

/// Mean and variance of the control barrier condition coefficients
/// p(x) = F'(x) grad h(x) + [a h(x); 0_m]:
///   E[p]   = F~' grad h~ + a [h~; 0]
///   Var[p] = F~' H K_h F~
///          + (I ox grad h~)' K_F (I ox grad h~)
///          + [[a^2 K_h + 2a grad K_h' f~,  a grad K_h' g~], [sym, 0]]
Moments cbc_moments(const GpDynamicsModel& dyn, const GpBarrierModel& bar,
                    const Eigen::VectorXd& x, double psd_tol = kPsdTol);

/// Mean and variance of the control Lyapunov condition coefficients
/// q(x) = F'(x) grad V + [alpha_V(V); 0_m]; the CLC is exactly Gaussian.
Moments clc_moments(const GpDynamicsModel& dyn, const ClfSpec& clf,
                    const Eigen::VectorXd& x, double psd_tol = kPsdTol);

/// Expand the matrix-variate structure into the vec(F) covariance used by
/// the moment propagation: block (i, j) = A(i, j) * B(x, x).
Eigen::MatrixXd mvgp_expand(const MvgpCovariance& cov, const Eigen::VectorXd& x);

/// Factor D with D'D = var_mat (eigen-decomposition based, handles rank
/// deficiency).  Throws std::domain_error if var_mat is indefinite beyond
/// psd_tol.
Eigen::MatrixXd var_factor(const Moments& moments, double psd_tol = kPsdTol);

}  // namespace socnav::uncertainty
