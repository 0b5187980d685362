#pragma once

#include <functional>
#include <optional>
#include <random>

#include "socnav/conic/problem.hpp"
#include "socnav/uncertainty/models.hpp"

namespace socnav::check {

/// Sampler for N(mean, cov); the factor is an eigendecomposition square
/// root so rank-deficient covariances are fine.
struct MultivariateNormal {
  Eigen::VectorXd mean;
  Eigen::MatrixXd factor;  // cov = factor * factor'

  static MultivariateNormal from_cov(const Eigen::VectorXd& mean,
                                     const Eigen::MatrixXd& cov);
  Eigen::VectorXd sample(std::mt19937_64& gen) const;
};

/// Minimize f over [lo, hi] by nested grid scan; f may return +inf for
/// infeasible points.  Returns the best value found.
double grid_min_1d(const std::function<double(double)>& f, double lo,
                   double hi, int samples = 400, int rounds = 40);

/// Grid-refinement minimizer for  min v'z  s.t. ||A z - a|| + ||B z - b||
/// <= c'z  over a box centered at `center` (dimension 2 or 3).  Returns
/// +inf if no feasible point was found.
double grid_min_joint_norm(const Eigen::VectorXd& v, const Eigen::MatrixXd& A,
                           const Eigen::VectorXd& a, const Eigen::MatrixXd& B,
                           const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                           const Eigen::VectorXd& center, double halfwidth,
                           int per_axis = 13, int rounds = 30);

/// SOCP instance with a planted primal-dual certificate: z_star satisfies
/// the KKT conditions exactly, so planted_objective is the optimal value
/// and a strictly feasible point exists by construction.
struct PlantedSocp {
  conic::SocpProblem problem;
  Eigen::VectorXd z_star;
  double planted_objective = 0.0;
};
PlantedSocp make_planted_socp(std::mt19937_64& gen, int dim, int n_cones,
                              int max_rows = 4);

/// Fully-specified Gaussian CBC instance: vec(F) ~ N(vec(F_mean), KF)
/// (column-stacked) independent of [h; grad h] ~ N(hgrad_mean, K2).
struct GaussianCbcInstance {
  int n = 0, m = 0;
  Eigen::MatrixXd F_mean;      // n x (m+1)
  Eigen::MatrixXd KF;          // (m+1)n square
  Eigen::VectorXd hgrad_mean;  // n+1
  Eigen::MatrixXd K2;          // (n+1) square, joint [h; grad h] covariance
  double alpha = 1.0;

  uncertainty::GpDynamicsModel dynamics_model() const;
  uncertainty::GpBarrierModel barrier_model() const;
};
GaussianCbcInstance random_cbc_instance(std::mt19937_64& gen, int n, int m,
                                        double sigma_dyn, double sigma_bar);

struct McMoments {
  double mean = 0.0;
  double variance = 0.0;
  double mean_se = 0.0;
  std::size_t samples = 0;
};

/// Monte-Carlo moments of CBC(x, [1;u]) = grad h' F [1;u] + alpha h over
/// joint Gaussian draws of (vec F, h, grad h).
McMoments mc_cbc_moments(const GaussianCbcInstance& inst,
                         const Eigen::VectorXd& ulift, std::size_t n_samples,
                         std::uint64_t seed);

/// Monte-Carlo moments of CLC(x, [1;u]) = grad V' F [1;u] + aV (deterministic
/// gradient and offset, Gaussian F).
McMoments mc_clc_moments(const Eigen::MatrixXd& F_mean,
                         const Eigen::MatrixXd& KF, const Eigen::VectorXd& gV,
                         double alpha_term, const Eigen::VectorXd& ulift,
                         std::size_t n_samples, std::uint64_t seed);

/// Empirical P(CBC < 0) at a fixed input.
double mc_cbc_violation_rate(const GaussianCbcInstance& inst,
                             const Eigen::VectorXd& ulift,
                             std::size_t n_samples, std::uint64_t seed);

/// Worst-case instance for boundary-perturbation sampling.
struct RobustCbcInstance {
  Eigen::MatrixXd F_tilde;
  double h_tilde = 0.0;
  Eigen::VectorXd grad_h_tilde;
  double e_F = 0.0, e_h = 0.0, e_grad_h = 0.0;
  double alpha = 1.0;
};

/// Min of the true CBC over n_samples perturbations drawn ON the error
/// bound surfaces (||D_F|| = e_F, |d_h| = e_h, ||d_gh|| = e_grad_h).
double min_true_cbc_on_bounds(const RobustCbcInstance& inst,
                              const Eigen::VectorXd& ulift,
                              std::size_t n_samples, std::uint64_t seed);

/// min 1/2 w'Hw + g'w  s.t.  C w <= d, solved by active-set enumeration
/// (exact for small nondegenerate problems).
struct DenseQp {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
};
std::optional<Eigen::VectorXd> solve_dense_qp_enumeration(const DenseQp& qp);

/// Central finite-difference gradient.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h = 1e-5);

/// Discrete Frechet distance by leash-length search: the smallest pairwise
/// distance for which a monotone coupling exists (BFS reachability).
double frechet_bruteforce(const std::vector<Eigen::Vector2d>& a,
                          const std::vector<Eigen::Vector2d>& b);

}  // namespace socnav::check
