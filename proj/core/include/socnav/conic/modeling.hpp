#pragma once

#include "socnav/conic/problem.hpp"

namespace socnav::conic {

/// SOC encoding of the rotated cone ||x_r||^2 <= y_r * z_r, y_r, z_r >= 0
/// over the stacked variables (x_r, y_r, z_r):
///   || [2 x_r; y_r - z_r] || <= y_r + z_r.
SecondOrderCone rotated_cone_to_soc(int x_dim);

/// Epigraph cone for  ||A_lin z + b_lin||^2 + lambda * z[delta_index]^2 <= l
/// where l is a new variable appended at index n_vars.  Returns the index
/// of l and the cone (over n_vars + 1 variables):
///   || [2(A_lin z + b_lin); 2 sqrt(lambda) delta; l - 1] || <= l + 1.
struct EpigraphCone {
  int l_index;
  SecondOrderCone cone;
};
EpigraphCone epigraph_quadratic(const Eigen::MatrixXd& A_lin,
                                const Eigen::VectorXd& b_lin,
                                double sqrt_lambda, int delta_index,
                                int n_vars);

/// Sum-of-norms split:  ||A z - a|| + ||B z - b|| <= c'z  becomes, with two
/// auxiliary scalars p, q appended after the existing n variables,
///   ||A z - a|| <= p,  ||B z - b|| <= q,  p + q <= c'z.
struct SumOfNormsSplit {
  int p_index;
  int q_index;
  std::vector<SecondOrderCone> cones;  // three cones over n + 2 variables
};
SumOfNormsSplit split_sum_of_norms(const Eigen::MatrixXd& A,
                                   const Eigen::VectorXd& a,
                                   const Eigen::MatrixXd& B,
                                   const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& c);

}  // namespace socnav::conic
