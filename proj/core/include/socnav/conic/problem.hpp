#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace socnav::conic {

/// One second-order cone constraint  ||A z + b|| <= c'z + d0  over the
/// decision vector z.  With k = 0 rows the constraint degenerates to the
/// linear inequality c'z + d0 >= 0; the solver keeps a single code path
/// for both.
struct SecondOrderCone {
  Eigen::MatrixXd A;  // k x d, k >= 0
  Eigen::VectorXd b;  // k
  Eigen::VectorXd c;  // d
  double d0{0.0};

  Eigen::Index rows() const { return A.rows(); }
  Eigen::Index dim() const { return c.size(); }

  /// Slack c'z + d0 - ||A z + b||; nonnegative iff z satisfies the cone.
  double residual(const Eigen::VectorXd& z) const {
    double lin = c.dot(z) + d0;
    if (rows() == 0) return lin;
    return lin - (A * z + b).norm();
  }
};

/// Linear objective g'z over a list of second-order cones.
struct SocpProblem {
  Eigen::VectorXd objective;
  std::vector<SecondOrderCone> cones;
  std::vector<std::string> variable_names;  // optional, diagnostics only

  Eigen::Index dim() const { return objective.size(); }

  /// Throws std::invalid_argument on inconsistent dimensions or
  /// non-finite data.
  void validate() const;
};

enum class SolveStatus {
  Optimal,
  Infeasible,
  Unbounded,
  MaxIters,
  NumericalFailure,
};

const char* to_string(SolveStatus s);

struct SolverSettings {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iters = 100;
  double static_reg = 1e-10;  // diagonal regularization of the KKT solve
  int reg_escalations = 3;    // x100 per escalation on factorization failure
  bool verbose = false;
};

struct SocpSolution {
  Eigen::VectorXd z;
  double obj_value = std::numeric_limits<double>::quiet_NaN();
  SolveStatus status = SolveStatus::NumericalFailure;
  int iterations = 0;
  double primal_residual = std::numeric_limits<double>::quiet_NaN();
  double dual_residual = std::numeric_limits<double>::quiet_NaN();
  double duality_gap = std::numeric_limits<double>::quiet_NaN();
};

/// Serialize a problem (objective + cones as dense row-major arrays) for
/// cross-checking against external solvers.
std::string to_json(const SocpProblem& p, int indent = 2);

}  // namespace socnav::conic
