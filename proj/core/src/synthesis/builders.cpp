#include "socnav/synthesis/builders.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "socnav/conic/modeling.hpp"
#include "socnav/conic/solver.hpp"
#include "socnav/uncertainty/moments.hpp"

namespace socnav::synthesis {
namespace {

// Lift map: [1; u] = e1 + S z for a decision vector whose first m entries
// are u.  S is (m+1) x d.
Eigen::MatrixXd lift_matrix(int m, int d) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m + 1, d);
  for (int i = 0; i < m; ++i) S(i + 1, i) = 1.0;
  return S;
}

Eigen::VectorXd lift_e1(int m) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m + 1);
  e(0) = 1.0;
  return e;
}

void append_box_cones(conic::SocpProblem& prob, const ControllerParams& params,
                      int m, int d) {
  auto bound_row = [&](int var, double value, double sign) {
    // sign * z[var] + value >= 0
    conic::SecondOrderCone k;
    k.A.resize(0, d);
    k.b.resize(0);
    k.c = Eigen::VectorXd::Zero(d);
    k.c(var) = sign;
    k.d0 = value;
    prob.cones.push_back(std::move(k));
  };
  if (params.u_max)
    for (int i = 0; i < m; ++i) bound_row(i, (*params.u_max)(i), -1.0);
  if (params.u_min)
    for (int i = 0; i < m; ++i) bound_row(i, -(*params.u_min)(i), 1.0);
}

conic::SecondOrderCone chance_cone(const Eigen::VectorXd& mean,
                                   const Eigen::MatrixXd& D, double cp,
                                   double delta_coeff, int m, int d,
                                   int delta_index) {
  // delta_coeff * delta + sign * mean' [1;u] >= cp ||D [1;u]||
  // Written for the CBC (mean' u_ >= cp ||D u_||) when delta_coeff = 0 and
  // for the CLC (delta - mean' u_ >= cp ||D u_||) when delta_coeff = 1,
  // with `mean` pre-negated by the caller for the CLC.
  conic::SecondOrderCone k;
  const Eigen::MatrixXd S = lift_matrix(m, d);
  const Eigen::VectorXd e1 = lift_e1(m);
  if (cp * D.norm() > 0.0) {
    k.A = cp * D * S;
    k.b = cp * D * e1;
  } else {
    k.A.resize(0, d);
    k.b.resize(0);
  }
  k.c = S.transpose() * mean;
  if (delta_coeff != 0.0) k.c(delta_index) += delta_coeff;
  k.d0 = mean(0);
  return k;
}

conic::SecondOrderCone effort_epigraph(const Eigen::VectorXd& x,
                                       const ControllerParams& params, int m,
                                       int delta_index, int n_before_l) {
  // ||L'([1;u] - k_baseline)||^2 + lambda delta^2 <= l
  const Eigen::VectorXd kb = params.k_baseline(x);
  const Eigen::MatrixXd S = lift_matrix(m, n_before_l);
  const Eigen::MatrixXd A_lin = params.L.transpose() * S;
  const Eigen::VectorXd b_lin = params.L.transpose() * (lift_e1(m) - kb);
  auto epi = conic::epigraph_quadratic(A_lin, b_lin, std::sqrt(params.lambda),
                                       delta_index, n_before_l);
  return epi.cone;
}

// Pad a cone built over fewer variables out to dimension d.
conic::SecondOrderCone pad_cone(conic::SecondOrderCone k, int d) {
  const int old = static_cast<int>(k.dim());
  if (old == d) return k;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k.rows(), d);
  A.leftCols(old) = k.A;
  k.A = std::move(A);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
  c.head(old) = k.c;
  k.c = std::move(c);
  return k;
}

std::vector<std::string> layout_names(int m, int n_aux_pairs) {
  std::vector<std::string> names;
  for (int i = 0; i < m; ++i) names.push_back("u" + std::to_string(i));
  names.push_back("delta");
  for (int i = 0; i < n_aux_pairs; ++i) {
    names.push_back("p" + std::to_string(i));
    names.push_back("q" + std::to_string(i));
  }
  names.push_back("l");
  return names;
}

}  // namespace

const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::Qp: return "qp";
    case ControllerKind::Probabilistic: return "prob";
    case ControllerKind::Robust: return "robust";
  }
  return "unknown";
}

void ControllerParams::validate(int m) const {
  if (L.rows() != m + 1 || L.cols() != m + 1)
    throw std::invalid_argument("ControllerParams: L must be (m+1)x(m+1)");
  if (lambda <= 0.0) throw std::invalid_argument("ControllerParams: lambda > 0");
  if (risk_p < 0.0 || risk_p >= 1.0)
    throw std::invalid_argument("ControllerParams: risk_p in [0,1)");
  if (!k_baseline) throw std::invalid_argument("ControllerParams: no baseline");
}

double cantelli_coefficient(double p) {
  if (p < 0.0 || p >= 1.0)
    throw std::domain_error("cantelli_coefficient: p must be in [0, 1)");
  return std::sqrt(p / (1.0 - p));
}

conic::SocpProblem build_qp_socp(
    const Eigen::VectorXd& x, const uncertainty::GpDynamicsModel& dyn,
    const std::vector<uncertainty::GpBarrierModel>& barriers,
    const uncertainty::ClfSpec& clf, const ControllerParams& params) {
  const int m = dyn.m;
  params.validate(m);
  const int d = m + 2;  // (u, delta, l)
  const int delta_index = m;
  const Eigen::MatrixXd F = dyn.mean(x);
  const Eigen::MatrixXd S = lift_matrix(m, d);

  conic::SocpProblem prob;
  prob.objective = Eigen::VectorXd::Zero(d);
  prob.objective(d - 1) = 1.0;
  prob.variable_names = layout_names(m, 0);

  // CLC row: delta - q~'[1;u] >= 0
  {
    Eigen::VectorXd q = F.transpose() * clf.grad_V(x);
    q(0) += clf.alpha_slope * clf.V(x);
    conic::SecondOrderCone k;
    k.A.resize(0, d);
    k.b.resize(0);
    k.c = -(S.transpose() * q);
    k.c(delta_index) += 1.0;
    k.d0 = -q(0);
    prob.cones.push_back(std::move(k));
  }
  // CBC rows: p~'[1;u] >= 0 per barrier
  for (const auto& bar : barriers) {
    Eigen::VectorXd p = F.transpose() * bar.grad_mean(x);
    p(0) += bar.alpha_slope * bar.mean(x);
    conic::SecondOrderCone k;
    k.A.resize(0, d);
    k.b.resize(0);
    k.c = S.transpose() * p;
    k.d0 = p(0);
    prob.cones.push_back(std::move(k));
  }
  prob.cones.push_back(effort_epigraph(x, params, m, delta_index, d - 1));
  append_box_cones(prob, params, m, d);
  return prob;
}

conic::SocpProblem build_prob_socp(
    const Eigen::VectorXd& x, const uncertainty::GpDynamicsModel& dyn,
    const std::vector<uncertainty::GpBarrierModel>& barriers,
    const uncertainty::ClfSpec& clf, const ControllerParams& params) {
  const int m = dyn.m;
  params.validate(m);
  const int d = m + 2;
  const int delta_index = m;
  const double cp = cantelli_coefficient(params.risk_p);

  conic::SocpProblem prob;
  prob.objective = Eigen::VectorXd::Zero(d);
  prob.objective(d - 1) = 1.0;
  prob.variable_names = layout_names(m, 0);

  {
    const uncertainty::Moments q = uncertainty::clc_moments(dyn, clf, x);
    const Eigen::MatrixXd D = uncertainty::var_factor(q);
    prob.cones.push_back(chance_cone(-q.mean_vec, D, cp, 1.0, m, d, delta_index));
  }
  for (const auto& bar : barriers) {
    const uncertainty::Moments p = uncertainty::cbc_moments(dyn, bar, x);
    const Eigen::MatrixXd D = uncertainty::var_factor(p);
    prob.cones.push_back(chance_cone(p.mean_vec, D, cp, 0.0, m, d, delta_index));
  }
  prob.cones.push_back(effort_epigraph(x, params, m, delta_index, d - 1));
  append_box_cones(prob, params, m, d);
  return prob;
}

conic::SocpProblem build_robust_socp(
    const Eigen::VectorXd& x, const std::vector<uncertainty::WorstCaseModel>& wc,
    const uncertainty::ClfSpec& clf, const ControllerParams& params) {
  if (wc.empty()) throw std::invalid_argument("build_robust_socp: no barriers");
  const Eigen::MatrixXd F = wc.front().F_tilde(x);
  const int m = static_cast<int>(F.cols()) - 1;
  params.validate(m);
  const int nb = static_cast<int>(wc.size());
  const int d = m + 2 + 2 * nb;  // (u, delta, p_i q_i ..., l)
  const int delta_index = m;
  const int l_index = d - 1;
  const double e_F = wc.front().e_F(x);
  const Eigen::MatrixXd S = lift_matrix(m, d);
  const Eigen::VectorXd e1 = lift_e1(m);

  conic::SocpProblem prob;
  prob.objective = Eigen::VectorXd::Zero(d);
  prob.objective(l_index) = 1.0;
  prob.variable_names = layout_names(m, nb);

  // CLC: delta - q~'[1;u] >= e_F ||grad V|| ||[1;u]||
  {
    const Eigen::VectorXd gV = clf.grad_V(x);
    Eigen::VectorXd q = F.transpose() * gV;
    q(0) += clf.alpha_slope * clf.V(x);
    conic::SecondOrderCone k;
    const double w = e_F * gV.norm();
    if (w > 0.0) {
      k.A = w * S;
      k.b = w * e1;
    } else {
      k.A.resize(0, d);
      k.b.resize(0);
    }
    k.c = -(S.transpose() * q);
    k.c(delta_index) += 1.0;
    k.d0 = -q(0);
    prob.cones.push_back(std::move(k));
  }

  for (int i = 0; i < nb; ++i) {
    const auto& b = wc[i];
    const Eigen::VectorXd gh = b.grad_h_tilde(x);
    const double e_gh = b.e_grad_h(x);
    const int pi = m + 1 + 2 * i;
    const int qi = pi + 1;

    // p_i >= e_grad_h ||F~ [1;u]||
    {
      conic::SecondOrderCone k;
      if (e_gh > 0.0) {
        k.A = e_gh * F * S;
        k.b = e_gh * F * e1;
      } else {
        k.A.resize(0, d);
        k.b.resize(0);
      }
      k.c = Eigen::VectorXd::Zero(d);
      k.c(pi) = 1.0;
      k.d0 = 0.0;
      prob.cones.push_back(std::move(k));
    }
    // q_i >= (e_F ||grad h~|| + e_grad_h e_F) ||[1;u]||
    {
      const double w = e_F * gh.norm() + e_gh * e_F;
      conic::SecondOrderCone k;
      if (w > 0.0) {
        k.A = w * S;
        k.b = w * e1;
      } else {
        k.A.resize(0, d);
        k.b.resize(0);
      }
      k.c = Eigen::VectorXd::Zero(d);
      k.c(qi) = 1.0;
      k.d0 = 0.0;
      prob.cones.push_back(std::move(k));
    }
    // grad h~' F~ [1;u] + alpha_h(h~ - e_h) >= p_i + q_i
    {
      const Eigen::VectorXd p = F.transpose() * gh;
      conic::SecondOrderCone k;
      k.A.resize(0, d);
      k.b.resize(0);
      k.c = S.transpose() * p;
      k.c(pi) -= 1.0;
      k.c(qi) -= 1.0;
      k.d0 = p(0) + b.alpha_slope * (b.h_tilde(x) - b.e_h(x));
      prob.cones.push_back(std::move(k));
    }
  }

  prob.cones.push_back(
      pad_cone(effort_epigraph(x, params, m, delta_index, d - 1), d));
  append_box_cones(prob, params, m, d);
  return prob;
}

Eigen::MatrixXd kernel_reduction_check(double e_F, double p, int n, int m) {
  if (p <= 0.0 || p >= 1.0)
    throw std::domain_error("kernel_reduction_check: p in (0, 1)");
  const double c = cantelli_coefficient(p);
  const int dim = (m + 1) * n;
  return (e_F * e_F) / (c * c) * Eigen::MatrixXd::Identity(dim, dim);
}

ControlDecision decide(ControllerKind kind, const Eigen::VectorXd& x,
                       const ModelSet& models, const uncertainty::ClfSpec& clf,
                       const ControllerParams& params,
                       const conic::SolverSettings& settings) {
  conic::SocpProblem prob;
  int m = 0;
  switch (kind) {
    case ControllerKind::Qp:
      m = models.dyn->m;
      prob = build_qp_socp(x, *models.dyn, *models.gp_barriers, clf, params);
      break;
    case ControllerKind::Probabilistic:
      m = models.dyn->m;
      prob = build_prob_socp(x, *models.dyn, *models.gp_barriers, clf, params);
      break;
    case ControllerKind::Robust: {
      const auto& wc = *models.worst_case;
      m = static_cast<int>(wc.front().F_tilde(x).cols()) - 1;
      prob = build_robust_socp(x, wc, clf, params);
      break;
    }
  }

  ControlDecision dec;
  const auto t0 = std::chrono::steady_clock::now();
  const conic::SocpSolution sol = conic::solve(prob, settings);
  const auto t1 = std::chrono::steady_clock::now();
  dec.solve_time = std::chrono::duration<double>(t1 - t0).count();
  dec.status = sol.status;
  if (sol.status != conic::SolveStatus::Optimal) return dec;

  dec.u = sol.z.head(m);
  dec.delta = sol.z(m);
  dec.objective = sol.obj_value;

  Eigen::VectorXd ulift(m + 1);
  ulift(0) = 1.0;
  ulift.tail(m) = dec.u;
  switch (kind) {
    case ControllerKind::Qp:
    case ControllerKind::Probabilistic: {
      // cones: [CLC, CBC_1..CBC_B, epigraph, boxes]
      const std::size_t nb = models.gp_barriers->size();
      for (std::size_t i = 0; i < nb; ++i)
        dec.margins.push_back(prob.cones[1 + i].residual(sol.z));
      break;
    }
    case ControllerKind::Robust: {
      const auto& wc = *models.worst_case;
      const Eigen::MatrixXd F = wc.front().F_tilde(x);
      const double e_F = wc.front().e_F(x);
      for (const auto& b : wc) {
        const Eigen::VectorXd gh = b.grad_h_tilde(x);
        const double e_gh = b.e_grad_h(x);
        double margin = gh.dot(F * ulift) +
                        b.alpha_slope * (b.h_tilde(x) - b.e_h(x)) -
                        e_gh * (F * ulift).norm() -
                        (e_F * gh.norm() + e_gh * e_F) * ulift.norm();
        dec.margins.push_back(margin);
      }
      break;
    }
  }
  return dec;
}

}  // namespace socnav::synthesis
