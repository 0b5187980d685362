#pragma once

#include <Eigen/Core>
#include <functional>

namespace socnav::uncertainty {

/// Gaussian-process description of the control-affine dynamics
/// xdot = F(x) [1; u], F in R^{n x (m+1)}.  `cov` is the covariance of the
/// column-stacked vec(F(x)) at x' = x, so block (i, j) of size n x n is
/// Cov(F[:,i], F[:,j]).
struct GpDynamicsModel {
  int n = 0;
  int m = 0;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> mean;  // n x (m+1)
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> cov;   // (m+1)n square
};

/// Matrix-variate Gaussian covariance structure: A couples the input
/// directions (columns of F), B(x,x) couples the state directions.
struct MvgpCovariance {
  Eigen::MatrixXd A;  // (m+1) x (m+1), PSD
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> B;  // n x n, PSD
};

/// GP barrier: scalar mean, gradient of the mean, kernel diagonal K_h(x,x),
/// kernel gradient at coincidence and kernel Hessian H_{x,x'} K_h(x,x).
/// The class-K function is linear: alpha_h(z) = alpha_slope * z.
struct GpBarrierModel {
  std::function<double(const Eigen::VectorXd&)> mean;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_mean;
  std::function<double(const Eigen::VectorXd&)> var;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_cov;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess_cov;
  double alpha_slope = 1.0;
};

/// Worst-case description: estimates with pointwise error bounds
/// ||F - F_tilde|| <= e_F (spectral), |h - h_tilde| <= e_h,
/// ||grad h - grad_h_tilde|| <= e_grad_h.
struct WorstCaseModel {
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> F_tilde;
  std::function<double(const Eigen::VectorXd&)> h_tilde;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_h_tilde;
  std::function<double(const Eigen::VectorXd&)> e_F;
  std::function<double(const Eigen::VectorXd&)> e_h;
  std::function<double(const Eigen::VectorXd&)> e_grad_h;
  double alpha_slope = 1.0;
};

/// Control Lyapunov function with a linear class-K rate:
/// alpha_V(V) = alpha_slope * V.
struct ClfSpec {
  std::function<double(const Eigen::VectorXd&)> V;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_V;
  double alpha_slope = 2.0;
};

/// First two moments of the affine-in-[1;u] condition coefficient vector:
/// E[CBC] = mean_vec' [1;u], Var[CBC] = [1;u]' var_mat [1;u] (same for CLC).
struct Moments {
  Eigen::VectorXd mean_vec;  // m+1
  Eigen::MatrixXd var_mat;   // (m+1) x (m+1), PSD after repair
  double min_eig_before_repair = 0.0;
  bool psd_projected = false;  // repair moved an eigenvalue beyond psd_tol
};

}  // namespace socnav::uncertainty
