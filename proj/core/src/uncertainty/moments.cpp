#include "socnav/uncertainty/moments.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace socnav::uncertainty {
namespace {

// Symmetrize, clip negative eigenvalues at zero, record the worst clip.
void psd_repair(Eigen::MatrixXd& M, double psd_tol, double& min_eig,
                bool& projected) {
  Eigen::MatrixXd S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  min_eig = es.eigenvalues().minCoeff();
  projected = min_eig < -psd_tol;
  if (min_eig >= 0.0) {
    M = S;
    return;
  }
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  M = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Moments cbc_moments(const GpDynamicsModel& dyn, const GpBarrierModel& bar,
                    const Eigen::VectorXd& x, double psd_tol) {
  const int n = dyn.n, mp1 = dyn.m + 1;
  const Eigen::MatrixXd F = dyn.mean(x);
  if (F.rows() != n || F.cols() != mp1)
    throw std::invalid_argument("cbc_moments: bad F dimensions");
  const Eigen::VectorXd gh = bar.grad_mean(x);
  if (gh.size() != n) throw std::invalid_argument("cbc_moments: bad grad h");
  const double h = bar.mean(x);
  const double a = bar.alpha_slope;
  if (a < 0.0) throw std::invalid_argument("cbc_moments: alpha_slope >= 0");

  Moments mo;
  mo.mean_vec = F.transpose() * gh;
  mo.mean_vec(0) += a * h;

  const Eigen::MatrixXd Hk = bar.hess_cov(x);  // n x n
  const Eigen::MatrixXd Kf = dyn.cov(x);       // (m+1)n square
  if (Kf.rows() != mp1 * n || Kf.cols() != mp1 * n)
    throw std::invalid_argument("cbc_moments: bad K_F dimensions");

  Eigen::MatrixXd V = F.transpose() * Hk * F;
  for (int i = 0; i < mp1; ++i)
    for (int j = 0; j < mp1; ++j)
      V(i, j) += gh.dot(Kf.block(i * n, j * n, n, n) * gh);

  const double Kh = bar.var(x);
  const Eigen::VectorXd gK = bar.grad_cov(x);  // grad_x K_h(x,x')|_{x'=x}
  const Eigen::VectorXd cross = F.transpose() * gK;  // [gK'f~, gK'g~]
  V(0, 0) += a * a * Kh + 2.0 * a * cross(0);
  for (int j = 1; j < mp1; ++j) {
    V(0, j) += a * cross(j);
    V(j, 0) += a * cross(j);
  }

  psd_repair(V, psd_tol, mo.min_eig_before_repair, mo.psd_projected);
  mo.var_mat = std::move(V);
  return mo;
}

Moments clc_moments(const GpDynamicsModel& dyn, const ClfSpec& clf,
                    const Eigen::VectorXd& x, double psd_tol) {
  const int n = dyn.n, mp1 = dyn.m + 1;
  const Eigen::MatrixXd F = dyn.mean(x);
  const Eigen::VectorXd gV = clf.grad_V(x);
  if (gV.size() != n) throw std::invalid_argument("clc_moments: bad grad V");

  Moments mo;
  mo.mean_vec = F.transpose() * gV;
  mo.mean_vec(0) += clf.alpha_slope * clf.V(x);

  const Eigen::MatrixXd Kf = dyn.cov(x);
  if (Kf.rows() != mp1 * n || Kf.cols() != mp1 * n)
    throw std::invalid_argument("clc_moments: bad K_F dimensions");
  Eigen::MatrixXd V(mp1, mp1);
  for (int i = 0; i < mp1; ++i)
    for (int j = 0; j < mp1; ++j)
      V(i, j) = gV.dot(Kf.block(i * n, j * n, n, n) * gV);

  psd_repair(V, psd_tol, mo.min_eig_before_repair, mo.psd_projected);
  mo.var_mat = std::move(V);
  return mo;
}

Eigen::MatrixXd mvgp_expand(const MvgpCovariance& cov, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd B = cov.B(x);
  const Eigen::Index mp1 = cov.A.rows(), n = B.rows();
  if (cov.A.cols() != mp1 || B.cols() != n)
    throw std::invalid_argument("mvgp_expand: A and B must be square");
  // Column-stacked vec(F): Cov(F[:,i], F[:,j]) = A(i,j) B.
  Eigen::MatrixXd K(mp1 * n, mp1 * n);
  for (Eigen::Index i = 0; i < mp1; ++i)
    for (Eigen::Index j = 0; j < mp1; ++j)
      K.block(i * n, j * n, n, n) = cov.A(i, j) * B;
  return K;
}

Eigen::MatrixXd var_factor(const Moments& moments, double psd_tol) {
  const Eigen::MatrixXd S =
      0.5 * (moments.var_mat + moments.var_mat.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.eigenvalues().minCoeff() < -psd_tol)
    throw std::domain_error("var_factor: variance matrix is indefinite");
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace socnav::uncertainty
