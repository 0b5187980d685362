#pragma once

#include <optional>
#include <vector>

#include "socnav/conic/problem.hpp"
#include "socnav/uncertainty/models.hpp"

namespace socnav::synthesis {

enum class ControllerKind { Qp, Probabilistic, Robust };
const char* to_string(ControllerKind k);

struct ControllerParams {
  Eigen::MatrixXd L;  // (m+1) x (m+1) effort weighting
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)>
      k_baseline;          // x -> [1; u_base]
  double lambda = 1000.0;  // slack penalty
  double risk_p = 0.0;     // probabilistic risk tolerance, in [0, 1)
  std::optional<Eigen::VectorXd> u_min;  // box on u (size m)
  std::optional<Eigen::VectorXd> u_max;

  void validate(int m) const;
};

struct ControlDecision {
  Eigen::VectorXd u;  // applied input (empty unless Optimal)
  double delta = 0.0;
  std::vector<double> margins;  // per-barrier CBC margin at the solution
  conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
  double solve_time = 0.0;  // seconds
  double objective = 0.0;
};

/// Cantelli risk coefficient c(p) = sqrt(p / (1 - p)), p in [0, 1).
double cantelli_coefficient(double p);

/// Baseline CLF-CBF QP in epigraph SOCP form: decision vector (u, delta, l),
/// linear CLC/CBC rows, objective min l over the quadratic epigraph cone.
conic::SocpProblem build_qp_socp(const Eigen::VectorXd& x,
                                 const uncertainty::GpDynamicsModel& dyn,
                                 const std::vector<uncertainty::GpBarrierModel>& barriers,
                                 const uncertainty::ClfSpec& clf,
                                 const ControllerParams& params);

/// Chance-constrained SOCP: per-constraint mean-minus-c(p)-stddev margins,
/// one cone per barrier, stddev encoded through the variance factor.
conic::SocpProblem build_prob_socp(const Eigen::VectorXd& x,
                                   const uncertainty::GpDynamicsModel& dyn,
                                   const std::vector<uncertainty::GpBarrierModel>& barriers,
                                   const uncertainty::ClfSpec& clf,
                                   const ControllerParams& params);

/// Worst-case SOCP: decision vector (u, delta, p_i, q_i ..., l) with the
/// conservative sum-of-norms decomposition of the CBC error and the
/// norm-tightened CLC.  Entry 0 supplies the shared dynamics fields.
conic::SocpProblem build_robust_socp(const Eigen::VectorXd& x,
                                     const std::vector<uncertainty::WorstCaseModel>& wc,
                                     const uncertainty::ClfSpec& clf,
                                     const ControllerParams& params);

/// Isotropic dynamics kernel K_F = e_F^2 / c(p)^2 * I for which the
/// probabilistic CLC margin coincides with the robust CLC margin.
Eigen::MatrixXd kernel_reduction_check(double e_F, double p, int n, int m);

struct ModelSet {
  const uncertainty::GpDynamicsModel* dyn = nullptr;
  const std::vector<uncertainty::GpBarrierModel>* gp_barriers = nullptr;
  const std::vector<uncertainty::WorstCaseModel>* worst_case = nullptr;
};

/// Build + solve + extract for the chosen controller.  Returns the applied
/// input u (the lifted leading 1 dropped), the slack, per-barrier margins
/// and the solver status; non-Optimal statuses carry no input.
ControlDecision decide(ControllerKind kind, const Eigen::VectorXd& x,
                       const ModelSet& models, const uncertainty::ClfSpec& clf,
                       const ControllerParams& params,
                       const conic::SolverSettings& settings = {});

}  // namespace socnav::synthesis
