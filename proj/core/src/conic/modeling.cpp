#include "socnav/conic/modeling.hpp"

#include <stdexcept>

namespace socnav::conic {

SecondOrderCone rotated_cone_to_soc(int x_dim) {
  if (x_dim < 1) throw std::invalid_argument("rotated_cone_to_soc: x_dim >= 1");
  const int d = x_dim + 2;  // (x_r, y_r, z_r)
  SecondOrderCone cone;
  cone.A = Eigen::MatrixXd::Zero(x_dim + 1, d);
  cone.A.topLeftCorner(x_dim, x_dim) = 2.0 * Eigen::MatrixXd::Identity(x_dim, x_dim);
  cone.A(x_dim, x_dim) = 1.0;       // y_r
  cone.A(x_dim, x_dim + 1) = -1.0;  // -z_r
  cone.b = Eigen::VectorXd::Zero(x_dim + 1);
  cone.c = Eigen::VectorXd::Zero(d);
  cone.c(x_dim) = 1.0;
  cone.c(x_dim + 1) = 1.0;
  cone.d0 = 0.0;
  return cone;
}

EpigraphCone epigraph_quadratic(const Eigen::MatrixXd& A_lin,
                                const Eigen::VectorXd& b_lin,
                                double sqrt_lambda, int delta_index,
                                int n_vars) {
  if (sqrt_lambda < 0.0)
    throw std::invalid_argument("epigraph_quadratic: sqrt_lambda >= 0");
  if (A_lin.rows() != b_lin.size() || A_lin.cols() != n_vars)
    throw std::invalid_argument("epigraph_quadratic: dimension mismatch");
  if (delta_index < 0 || delta_index >= n_vars)
    throw std::invalid_argument("epigraph_quadratic: bad delta_index");

  const int l = n_vars;  // new epigraph variable appended at the end
  const Eigen::Index r = A_lin.rows();

  SecondOrderCone cone;
  cone.A = Eigen::MatrixXd::Zero(r + 2, n_vars + 1);
  cone.A.topLeftCorner(r, n_vars) = 2.0 * A_lin;
  cone.A(r, delta_index) = 2.0 * sqrt_lambda;
  cone.A(r + 1, l) = 1.0;
  cone.b = Eigen::VectorXd::Zero(r + 2);
  cone.b.head(r) = 2.0 * b_lin;
  cone.b(r + 1) = -1.0;
  cone.c = Eigen::VectorXd::Zero(n_vars + 1);
  cone.c(l) = 1.0;
  cone.d0 = 1.0;
  return {l, cone};
}

SumOfNormsSplit split_sum_of_norms(const Eigen::MatrixXd& A,
                                   const Eigen::VectorXd& a,
                                   const Eigen::MatrixXd& B,
                                   const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& c) {
  const Eigen::Index n = c.size();
  if (A.cols() != n || B.cols() != n || A.rows() != a.size() ||
      B.rows() != b.size())
    throw std::invalid_argument("split_sum_of_norms: dimension mismatch");

  const int p = static_cast<int>(n);
  const int q = static_cast<int>(n) + 1;
  const int d = static_cast<int>(n) + 2;

  SumOfNormsSplit out;
  out.p_index = p;
  out.q_index = q;

  SecondOrderCone ca;
  ca.A = Eigen::MatrixXd::Zero(A.rows(), d);
  ca.A.leftCols(n) = A;
  ca.b = -a;
  ca.c = Eigen::VectorXd::Zero(d);
  ca.c(p) = 1.0;
  out.cones.push_back(std::move(ca));

  SecondOrderCone cb;
  cb.A = Eigen::MatrixXd::Zero(B.rows(), d);
  cb.A.leftCols(n) = B;
  cb.b = -b;
  cb.c = Eigen::VectorXd::Zero(d);
  cb.c(q) = 1.0;
  out.cones.push_back(std::move(cb));

  SecondOrderCone lin;  // c'z - p - q >= 0
  lin.A = Eigen::MatrixXd::Zero(0, d);
  lin.b = Eigen::VectorXd::Zero(0);
  lin.c = Eigen::VectorXd::Zero(d);
  lin.c.head(n) = c;
  lin.c(p) = -1.0;
  lin.c(q) = -1.0;
  lin.d0 = 0.0;
  out.cones.push_back(std::move(lin));

  return out;
}

}  // namespace socnav::conic
