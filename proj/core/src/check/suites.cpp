#include "socnav/check/suites.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <nlohmann/json.hpp>
#include <random>

#include "socnav/check/oracles.hpp"
#include "socnav/common/rng.hpp"
#include "socnav/conic/modeling.hpp"
#include "socnav/conic/solver.hpp"
#include "socnav/sim/frechet.hpp"
#include "socnav/sim/sweep.hpp"
#include "socnav/synthesis/builders.hpp"
#include "socnav/uncertainty/moments.hpp"
#include "socnav/uncertainty/synthetic.hpp"
#include "socnav/world/clf.hpp"
#include "socnav/world/generator.hpp"

namespace socnav::check {
namespace {

using nlohmann::json;

double risk_coefficient(double p, bool bugged) {
  return bugged ? p / (1.0 - p) : synthesis::cantelli_coefficient(p);
}

synthesis::ControllerParams paper_params() {
  synthesis::ControllerParams params;
  params.L = Eigen::Vector3d(0.0, 10.0, 3.0).asDiagonal();
  params.k_baseline = [](const Eigen::VectorXd&) {
    return Eigen::Vector3d(1.0, 0.65, 0.0);
  };
  params.lambda = 1000.0;
  params.u_max = Eigen::Vector2d(0.65, 2.0);
  params.u_min = Eigen::Vector2d(-0.65, -2.0);
  return params;
}

Eigen::VectorXd randn_vec(std::mt19937_64& gen, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(gen);
  return v;
}

json check_planted(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {1}));
  std::uniform_int_distribution<int> dims(2, opt.planted_max_dim);
  std::uniform_int_distribution<int> ncones(1, opt.planted_max_cones);
  double worst_obj = 0.0, worst_res = 0.0;
  int failures = 0;
  for (int i = 0; i < opt.planted_count; ++i) {
    PlantedSocp inst = make_planted_socp(gen, dims(gen), ncones(gen));
    conic::SocpSolution sol = conic::solve(inst.problem);
    if (sol.status != conic::SolveStatus::Optimal) {
      ++failures;
      continue;
    }
    worst_obj = std::max(worst_obj,
                         std::abs(sol.obj_value - inst.planted_objective) /
                             std::max(1.0, std::abs(inst.planted_objective)));
    worst_res = std::max({worst_res, sol.primal_residual, sol.dual_residual,
                          sol.duality_gap});
  }
  json j;
  j["instances"] = opt.planted_count;
  j["non_optimal"] = failures;
  j["max_objective_error"] = worst_obj;
  j["max_kkt_residual"] = worst_res;
  j["passed"] = failures == 0 && worst_obj <= 1e-6 && worst_res <= 1e-8;
  return j;
}

json check_split_equivalence(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {2}));
  std::uniform_int_distribution<int> dims(2, 3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  int skipped = 0;
  for (int i = 0; i < opt.split_count; ++i) {
    const int n = dims(gen);
    // Construction keeps the feasible set nonempty and bounded: A, B well
    // conditioned, ||c|| below their combined smallest singular value.
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
    A += 0.2 * Eigen::MatrixXd::NullaryExpr(
                   n, n, [&]() { return u01(gen) - 0.5; });
    B += 0.2 * Eigen::MatrixXd::NullaryExpr(
                   n, n, [&]() { return u01(gen) - 0.5; });
    const Eigen::VectorXd z0 = 2.0 * randn_vec(gen, n).normalized();
    const Eigen::VectorXd a = A * z0 + 0.3 * randn_vec(gen, n).normalized();
    const Eigen::VectorXd b = B * z0 + 0.3 * randn_vec(gen, n).normalized();
    const Eigen::VectorXd c = 0.4 * (z0.normalized());
    const Eigen::VectorXd v = randn_vec(gen, n).normalized();

    Eigen::MatrixXd stacked(2 * n, n);
    stacked << A, B;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
    const double smin = svd.singularValues().minCoeff();
    if (smin <= c.norm() + 0.1) {
      ++skipped;
      continue;
    }
    const double zbound =
        (a.norm() + b.norm()) / (smin - c.norm()) + z0.norm() + 1.0;

    auto split = conic::split_sum_of_norms(A, a, B, b, c);
    conic::SocpProblem prob;
    prob.objective = Eigen::VectorXd::Zero(n + 2);
    prob.objective.head(n) = v;
    prob.cones = split.cones;
    conic::SocpSolution sol = conic::solve(prob);
    if (sol.status != conic::SolveStatus::Optimal) {
      ++skipped;
      continue;
    }
    const double direct =
        grid_min_joint_norm(v, A, a, B, b, c, z0, zbound, 13, 34);
    worst = std::max(worst, std::abs(sol.obj_value - direct));
  }
  json j;
  j["instances"] = opt.split_count;
  j["skipped"] = skipped;
  j["max_abs_gap"] = worst;
  j["passed"] = worst <= 1e-6 && skipped <= opt.split_count / 5;
  return j;
}

json check_epigraph_tightness(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {3}));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  int skipped = 0;
  for (int i = 0; i < opt.epigraph_count; ++i) {
    const int m = 1 + static_cast<int>(u01(gen) * 2.9);
    const int d = m + 1;  // (u, delta); l appended by the helper
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m + 1, m + 1);
    for (int k = 0; k <= m; ++k) L(k, k) = 0.5 + 2.0 * u01(gen);
    Eigen::VectorXd kb = Eigen::VectorXd::Zero(m + 1);
    kb(0) = 1.0;
    kb.tail(m) = randn_vec(gen, m);
    const double lambda = 1.0 + 100.0 * u01(gen);

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m + 1, d);
    for (int k = 0; k < m; ++k) S(k + 1, k) = 1.0;
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(m + 1);
    e1(0) = 1.0;
    auto epi = conic::epigraph_quadratic(L.transpose() * S,
                                         L.transpose() * (e1 - kb),
                                         std::sqrt(lambda), m, d);
    conic::SocpProblem prob;
    prob.objective = Eigen::VectorXd::Zero(d + 1);
    prob.objective(epi.l_index) = 1.0;
    prob.cones.push_back(epi.cone);
    // activating rows so the optimum is away from the trivial zero
    {
      conic::SecondOrderCone row;  // u_0 >= kb_1 + 0.5
      row.A.resize(0, d + 1);
      row.b.resize(0);
      row.c = Eigen::VectorXd::Zero(d + 1);
      row.c(0) = 1.0;
      row.d0 = -(kb(1) + 0.5);
      prob.cones.push_back(row);
    }
    {
      conic::SecondOrderCone row;  // delta >= 0.2
      row.A.resize(0, d + 1);
      row.b.resize(0);
      row.c = Eigen::VectorXd::Zero(d + 1);
      row.c(m) = 1.0;
      row.d0 = -0.2;
      prob.cones.push_back(row);
    }
    conic::SocpSolution sol = conic::solve(prob);
    if (sol.status != conic::SolveStatus::Optimal) {
      ++skipped;
      continue;
    }
    Eigen::VectorXd ulift = e1 + S.leftCols(d) * sol.z.head(d);
    const double quad = (L.transpose() * (ulift - kb)).squaredNorm() +
                        lambda * sol.z(m) * sol.z(m);
    worst = std::max(worst, std::abs(sol.z(epi.l_index) - quad));
  }
  json j;
  j["instances"] = opt.epigraph_count;
  j["skipped"] = skipped;
  j["max_abs_gap"] = worst;
  j["passed"] = worst <= 1e-6 && skipped == 0;
  return j;
}

json check_scaling_invariance(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {4}));
  std::uniform_int_distribution<int> dims(2, 10);
  std::uniform_int_distribution<int> ncones(1, 5);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  double worst = 0.0;
  int skipped = 0;
  for (int i = 0; i < opt.scaling_count; ++i) {
    PlantedSocp inst = make_planted_socp(gen, dims(gen), ncones(gen));
    conic::SocpSolution base = conic::solve(inst.problem);
    conic::SocpProblem scaled = inst.problem;
    for (auto& cone : scaled.cones) {
      const double s = scale(gen);
      cone.A *= s;
      cone.b *= s;
      cone.c *= s;
      cone.d0 *= s;
    }
    conic::SocpSolution after = conic::solve(scaled);
    if (base.status != conic::SolveStatus::Optimal ||
        after.status != conic::SolveStatus::Optimal) {
      ++skipped;
      continue;
    }
    worst = std::max(worst, (base.z - after.z).norm() /
                                std::max(1.0, base.z.norm()));
  }
  json j;
  j["instances"] = opt.scaling_count;
  j["skipped"] = skipped;
  j["max_solution_diff"] = worst;
  j["passed"] = worst <= 1e-6 && skipped == 0;
  return j;
}

json check_moments_mc(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {5}));
  std::uniform_int_distribution<int> npick(2, 3), mpick(1, 2);
  std::uniform_real_distribution<double> sig(0.04, 0.08);
  std::uniform_real_distribution<double> uin(-1.5, 1.5);
  double worst_mean_z = 0.0, worst_var_rel = 0.0;
  for (int i = 0; i < opt.moment_instances; ++i) {
    const int n = npick(gen), m = mpick(gen);
    GaussianCbcInstance inst =
        random_cbc_instance(gen, n, m, sig(gen), sig(gen));
    Eigen::VectorXd ulift(m + 1);
    ulift(0) = 1.0;
    for (int k = 1; k <= m; ++k) ulift(k) = uin(gen);

    const auto dyn = inst.dynamics_model();
    const auto bar = inst.barrier_model();
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(n);

    // CBC moments against the sampling oracle
    uncertainty::Moments mo = uncertainty::cbc_moments(dyn, bar, x);
    McMoments mc = mc_cbc_moments(inst, ulift, opt.moment_samples,
                                  derive_seed(opt.seed, {50, (std::uint64_t)i}));
    const double mean_f = mo.mean_vec.dot(ulift);
    const double var_f = ulift.dot(mo.var_mat * ulift);
    worst_mean_z = std::max(worst_mean_z,
                            std::abs(mean_f - mc.mean) / std::max(mc.mean_se, 1e-12));
    worst_var_rel = std::max(worst_var_rel, std::abs(var_f - mc.variance) /
                                                std::max(mc.variance, 1e-12));

    // CLC moments: deterministic gradient, Gaussian F
    uncertainty::ClfSpec clf;
    const Eigen::VectorXd gV = randn_vec(gen, n);
    const double vval = std::abs(randn_vec(gen, 1)(0)) + 0.2;
    clf.V = [vval](const Eigen::VectorXd&) { return vval; };
    clf.grad_V = [gV](const Eigen::VectorXd&) { return gV; };
    clf.alpha_slope = 2.0;
    uncertainty::Moments qo = uncertainty::clc_moments(dyn, clf, x);
    McMoments qmc =
        mc_clc_moments(inst.F_mean, inst.KF, gV, 2.0 * vval, ulift,
                       opt.moment_samples,
                       derive_seed(opt.seed, {51, (std::uint64_t)i}));
    const double qmean = qo.mean_vec.dot(ulift);
    const double qvar = ulift.dot(qo.var_mat * ulift);
    worst_mean_z = std::max(worst_mean_z, std::abs(qmean - qmc.mean) /
                                              std::max(qmc.mean_se, 1e-12));
    worst_var_rel = std::max(worst_var_rel, std::abs(qvar - qmc.variance) /
                                                std::max(qmc.variance, 1e-12));
  }
  json j;
  j["instances"] = opt.moment_instances;
  j["samples"] = opt.moment_samples;
  j["worst_mean_zscore"] = worst_mean_z;
  j["worst_var_rel_err"] = worst_var_rel;
  j["passed"] = worst_mean_z <= 3.0 && worst_var_rel <= 0.05;
  return j;
}

json check_mvgp(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {6}));
  std::uniform_int_distribution<int> npick(2, 4), mpick(1, 3);
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    const int n = npick(gen), m = mpick(gen);
    Eigen::MatrixXd RA(m + 1, m + 1), RB(n, n);
    for (int r = 0; r < m + 1; ++r) RA.row(r) = randn_vec(gen, m + 1).transpose();
    for (int r = 0; r < n; ++r) RB.row(r) = randn_vec(gen, n).transpose();
    const Eigen::MatrixXd A =
        RA * RA.transpose() + 0.1 * Eigen::MatrixXd::Identity(m + 1, m + 1);
    const Eigen::MatrixXd B =
        RB * RB.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
    uncertainty::MvgpCovariance cov;
    cov.A = A;
    cov.B = [B](const Eigen::VectorXd&) { return B; };
    const Eigen::MatrixXd KF = uncertainty::mvgp_expand(cov, Eigen::VectorXd::Zero(n));

    Eigen::VectorXd ulift(m + 1);
    ulift(0) = 1.0;
    ulift.tail(m) = randn_vec(gen, m);
    // Var(F ulift) from the expansion vs the closed matrix-variate form
    Eigen::MatrixXd varFu = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < m + 1; ++a)
      for (int b = 0; b < m + 1; ++b)
        varFu += ulift(a) * ulift(b) * KF.block(a * n, b * n, n, n);
    const Eigen::MatrixXd closed = ulift.dot(A * ulift) * B;
    worst = std::max(worst, (varFu - closed).norm() / closed.norm());

    // expansion followed by CLC moments vs the direct formula
    const Eigen::VectorXd gV = randn_vec(gen, n);
    uncertainty::GpDynamicsModel dyn;
    dyn.n = n;
    dyn.m = m;
    Eigen::MatrixXd F0 = Eigen::MatrixXd::Zero(n, m + 1);
    dyn.mean = [F0](const Eigen::VectorXd&) { return F0; };
    dyn.cov = [KF](const Eigen::VectorXd&) { return KF; };
    uncertainty::ClfSpec clf;
    clf.V = [](const Eigen::VectorXd&) { return 0.0; };
    clf.grad_V = [gV](const Eigen::VectorXd&) { return gV; };
    uncertainty::Moments q =
        uncertainty::clc_moments(dyn, clf, Eigen::VectorXd::Zero(n));
    const double via_moments = ulift.dot(q.var_mat * ulift);
    const double direct = gV.dot(B * gV) * ulift.dot(A * ulift);
    worst = std::max(worst,
                     std::abs(via_moments - direct) / std::max(direct, 1e-12));
  }
  json j;
  j["worst_rel_err"] = worst;
  j["passed"] = worst <= 1e-10;
  return j;
}

json check_synthetic_estimator(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {7}));
  std::uniform_real_distribution<double> ux(0.0, 10.0), uy(0.0, 6.0);
  world::Scene scene = world::generate_scene(opt.seed, 0);
  const double rho = 0.177;
  const world::BarrierSet truth = world::assemble_barriers(scene, rho);

  bool bound_ok = true, zero_ok = true, monotone_ok = true;
  double worst_excess = -1e9;
  std::vector<double> e_levels;
  for (double sigma : {0.01, 0.02, 0.05}) {
    uncertainty::CorruptionSpec spec;
    spec.sigma = sigma;
    spec.sigma_dyn = 0.004;
    spec.seed = derive_seed(opt.seed, {70, (std::uint64_t)(sigma * 1000)});
    auto models = uncertainty::synthetic_estimator(scene, spec, rho);
    e_levels.push_back(models.worst_case.front().e_h(Eigen::Vector3d::Zero()));
    for (int s = 0; s < 10000 / 3; ++s) {
      Eigen::Vector3d x(ux(gen), uy(gen), 0.0);
      for (std::size_t i = 0; i < models.barriers.size(); ++i) {
        const double err = std::abs(models.barriers[i].mean(x) - truth.value(i, x));
        const double eh = models.worst_case[i].e_h(x);
        worst_excess = std::max(worst_excess, err - eh);
        if (err > eh) bound_ok = false;
      }
    }
  }
  for (std::size_t i = 1; i < e_levels.size(); ++i)
    if (e_levels[i] <= e_levels[i - 1]) monotone_ok = false;

  {
    uncertainty::CorruptionSpec spec;
    spec.sigma = 0.0;
    spec.sigma_dyn = 0.0;
    spec.seed = 7;
    auto models = uncertainty::synthetic_estimator(scene, spec, rho);
    Eigen::Vector3d x(5.0, 3.0, 0.3);
    for (std::size_t i = 0; i < models.barriers.size(); ++i) {
      if (std::abs(models.barriers[i].mean(x) - truth.value(i, x)) > 1e-12)
        zero_ok = false;
      if (models.worst_case[i].e_h(x) != 0.0) zero_ok = false;
      if (models.worst_case[i].e_grad_h(x) != 0.0) zero_ok = false;
    }
  }
  json j;
  j["worst_bound_excess"] = worst_excess;
  j["e_h_levels"] = e_levels;
  j["zero_noise_exact"] = zero_ok;
  j["passed"] = bound_ok && zero_ok && monotone_ok;
  return j;
}

json check_cantelli_identity(const SuiteOptions& opt) {
  double worst = 0.0;
  bool monotone = true;
  double prev = -1.0;
  for (double p : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
    const double c = risk_coefficient(p, opt.inject_cantelli_bug);
    worst = std::max(worst, std::abs(c * c - p / (1.0 - p)));
    if (c < prev) monotone = false;
    prev = c;
  }
  const double c0 = risk_coefficient(0.0, opt.inject_cantelli_bug);
  const double chalf = risk_coefficient(0.5, opt.inject_cantelli_bug);
  const double c08 = risk_coefficient(0.8, opt.inject_cantelli_bug);
  json j;
  j["max_identity_error"] = worst;
  j["c_0"] = c0;
  j["c_05"] = chalf;
  j["c_08"] = c08;
  j["passed"] = worst <= 1e-12 && monotone && c0 == 0.0 &&
                std::abs(chalf - 1.0) <= 1e-12 && std::abs(c08 - 2.0) <= 1e-12;
  return j;
}

// A feasible random chance-constrained instance plus its models.
struct ProbInstance {
  GaussianCbcInstance cbc;
  uncertainty::GpDynamicsModel dyn;
  std::vector<uncertainty::GpBarrierModel> bars;
  uncertainty::ClfSpec clf;
};

ProbInstance random_prob_instance(std::mt19937_64& gen) {
  ProbInstance pi;
  pi.cbc = random_cbc_instance(gen, 3, 2, 0.05, 0.06);
  // keep the barrier near the boundary so the chance constraint matters
  pi.cbc.hgrad_mean(0) = 0.05 + 0.3 * std::abs(randn_vec(gen, 1)(0));
  pi.cbc.alpha = 1.0;
  pi.dyn = pi.cbc.dynamics_model();
  pi.bars = {pi.cbc.barrier_model()};
  const Eigen::VectorXd gV = randn_vec(gen, 3);
  const double vval = 0.5 + std::abs(randn_vec(gen, 1)(0));
  pi.clf.V = [vval](const Eigen::VectorXd&) { return vval; };
  pi.clf.grad_V = [gV](const Eigen::VectorXd&) { return gV; };
  pi.clf.alpha_slope = 2.0;
  return pi;
}

json check_cantelli_mc(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {8}));
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  double worst_margin = -1e9;
  int solved = 0, attempts = 0;
  bool passed = true;
  json per_p = json::object();
  for (double p : {0.2, 0.4, 0.8}) {
    double worst_rate = 0.0;
    int done = 0;
    while (done < opt.cantelli_instances && attempts < 50 * opt.cantelli_instances) {
      ++attempts;
      ProbInstance pi = random_prob_instance(gen);
      synthesis::ControllerParams params = paper_params();
      params.risk_p = p;
      // the mutation hook: rebuild the CBC cone with the bugged coefficient
      conic::SocpProblem prob;
      if (!opt.inject_cantelli_bug) {
        prob = synthesis::build_prob_socp(x, pi.dyn, pi.bars, pi.clf, params);
      } else {
        params.risk_p = 0.0;  // neutralize, then splice the bugged margin in
        prob = synthesis::build_prob_socp(x, pi.dyn, pi.bars, pi.clf, params);
        const double cbug = risk_coefficient(p, true);
        uncertainty::Moments mo =
            uncertainty::cbc_moments(pi.dyn, pi.bars[0], x);
        const Eigen::MatrixXd D = uncertainty::var_factor(mo);
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(3, 4);
        S(1, 0) = 1.0;
        S(2, 1) = 1.0;
        Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
        e1(0) = 1.0;
        prob.cones[1].A = cbug * D * S;
        prob.cones[1].b = cbug * D * e1;
      }
      conic::SocpSolution sol = conic::solve(prob);
      if (sol.status != conic::SolveStatus::Optimal) continue;
      ++solved;
      ++done;
      Eigen::VectorXd ulift(3);
      ulift << 1.0, sol.z(0), sol.z(1);
      const double rate = mc_cbc_violation_rate(
          pi.cbc, ulift, opt.cantelli_samples,
          derive_seed(opt.seed, {80, (std::uint64_t)(p * 100), (std::uint64_t)done}));
      const double se = std::sqrt(p * (1.0 - p) /
                                  static_cast<double>(opt.cantelli_samples));
      const double bound = (1.0 - p) + 3.0 * se;
      worst_rate = std::max(worst_rate, rate);
      worst_margin = std::max(worst_margin, rate - bound);
      if (rate > bound) passed = false;
    }
    per_p[std::to_string(p)] = worst_rate;
  }
  json j;
  j["worst_violation_rate"] = per_p;
  j["worst_excess_over_bound"] = worst_margin;
  j["solved"] = solved;
  j["passed"] = passed && solved >= 3 * opt.cantelli_instances;
  return j;
}

json check_qp_oracle(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {9}));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  int skipped = 0;
  const int count = 40;
  for (int i = 0; i < count; ++i) {
    ProbInstance pi = random_prob_instance(gen);
    synthesis::ControllerParams params = paper_params();
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(3);

    synthesis::ModelSet models;
    models.dyn = &pi.dyn;
    models.gp_barriers = &pi.bars;
    synthesis::ControlDecision dec = synthesis::decide(
        synthesis::ControllerKind::Qp, x, models, pi.clf, params);
    if (dec.status != conic::SolveStatus::Optimal) {
      ++skipped;
      continue;
    }

    // dense active-set oracle on (u, delta)
    const Eigen::MatrixXd F = pi.dyn.mean(x);
    Eigen::VectorXd q = F.transpose() * pi.clf.grad_V(x);
    q(0) += pi.clf.alpha_slope * pi.clf.V(x);
    Eigen::VectorXd pb = F.transpose() * pi.bars[0].grad_mean(x);
    pb(0) += pi.bars[0].alpha_slope * pi.bars[0].mean(x);

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(3, 2);
    S(1, 0) = 1.0;
    S(2, 1) = 1.0;
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
    e1(0) = 1.0;
    const Eigen::MatrixXd LL = params.L * params.L.transpose();
    DenseQp qp;
    qp.H = Eigen::MatrixXd::Zero(3, 3);
    qp.H.topLeftCorner(2, 2) = 2.0 * S.transpose() * LL * S;
    qp.H(2, 2) = 2.0 * params.lambda;
    qp.g = Eigen::VectorXd::Zero(3);
    const Eigen::VectorXd kb = params.k_baseline(x);
    qp.g.head(2) = 2.0 * S.transpose() * LL * (e1 - kb);
    qp.C = Eigen::MatrixXd::Zero(1 + 1 + 4, 3);
    qp.d = Eigen::VectorXd::Zero(6);
    qp.C.block(0, 0, 1, 2) = q.tail(2).transpose();
    qp.C(0, 2) = -1.0;
    qp.d(0) = -q(0);
    qp.C.block(1, 0, 1, 2) = -pb.tail(2).transpose();
    qp.d(1) = pb(0);
    qp.C(2, 0) = 1.0;
    qp.d(2) = (*params.u_max)(0);
    qp.C(3, 1) = 1.0;
    qp.d(3) = (*params.u_max)(1);
    qp.C(4, 0) = -1.0;
    qp.d(4) = -(*params.u_min)(0);
    qp.C(5, 1) = -1.0;
    qp.d(5) = -(*params.u_min)(1);
    auto w = solve_dense_qp_enumeration(qp);
    if (!w) {
      ++skipped;
      continue;
    }
    worst = std::max(worst, (w->head(2) - dec.u).norm());
  }
  json j;
  j["instances"] = count;
  j["skipped"] = skipped;
  j["max_u_diff"] = worst;
  j["passed"] = worst <= 1e-5 && skipped <= count / 5;
  return j;
}

json check_reductions(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {10}));
  std::uniform_real_distribution<double> ux(0.5, 9.5), uy(0.5, 5.5),
      umu(-M_PI, M_PI);
  auto scenes = world::generate_environments(opt.seed, 4);
  double worst_prob = 0.0, worst_rob = 0.0;
  int tested = 0, attempts = 0;
  while (tested < opt.reduction_states && attempts < 40 * opt.reduction_states) {
    ++attempts;
    const world::Scene& scene = scenes[attempts % scenes.size()];
    const world::BarrierSet truth = world::assemble_barriers(scene, 0.177);
    Eigen::Vector3d x(ux(gen), uy(gen), umu(gen));
    if (truth.min_value(x) < 0.15) continue;

    uncertainty::CorruptionSpec corr;
    corr.sigma = 0.02;
    corr.sigma_dyn = 0.005;
    corr.seed = derive_seed(opt.seed, {100, (std::uint64_t)attempts});
    auto models = uncertainty::synthetic_estimator(scene, corr, 0.177);
    auto clf = world::make_path_clf(scene.path);

    synthesis::ControllerParams params = paper_params();
    synthesis::ModelSet ms;
    ms.dyn = &models.dynamics;
    ms.gp_barriers = &models.barriers;
    ms.worst_case = &models.worst_case;

    auto qp = synthesis::decide(synthesis::ControllerKind::Qp, x, ms, clf, params);
    params.risk_p = 0.0;
    auto prob = synthesis::decide(synthesis::ControllerKind::Probabilistic, x,
                                  ms, clf, params);

    std::vector<uncertainty::WorstCaseModel> wc0 = models.worst_case;
    for (auto& w : wc0) {
      w.e_F = [](const Eigen::VectorXd&) { return 0.0; };
      w.e_h = [](const Eigen::VectorXd&) { return 0.0; };
      w.e_grad_h = [](const Eigen::VectorXd&) { return 0.0; };
    }
    synthesis::ModelSet ms0 = ms;
    ms0.worst_case = &wc0;
    auto rob = synthesis::decide(synthesis::ControllerKind::Robust, x, ms0, clf,
                                 params);

    if (qp.status != conic::SolveStatus::Optimal ||
        prob.status != conic::SolveStatus::Optimal ||
        rob.status != conic::SolveStatus::Optimal)
      continue;
    ++tested;
    worst_prob = std::max(worst_prob, (qp.u - prob.u).norm());
    worst_rob = std::max(worst_rob, (qp.u - rob.u).norm());
  }
  json j;
  j["states"] = tested;
  j["max_prob_diff"] = worst_prob;
  j["max_robust_diff"] = worst_rob;
  j["passed"] = tested >= opt.reduction_states && worst_prob <= 1e-6 &&
                worst_rob <= 1e-6;
  return j;
}

json check_monotonicity(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {11}));
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  bool ok = true;
  double worst_drop = 0.0;
  int done = 0, attempts = 0;
  while (done < opt.monotone_instances && attempts < 40 * opt.monotone_instances) {
    ++attempts;
    ProbInstance pi = random_prob_instance(gen);
    synthesis::ControllerParams params = paper_params();

    // objective non-decreasing in the risk tolerance
    double prev = -std::numeric_limits<double>::infinity();
    bool usable = true;
    for (double p : {0.0, 0.2, 0.4, 0.6, 0.8}) {
      params.risk_p = p;
      auto prob = synthesis::build_prob_socp(x, pi.dyn, pi.bars, pi.clf, params);
      auto sol = conic::solve(prob);
      double val = sol.status == conic::SolveStatus::Optimal
                       ? sol.obj_value
                       : std::numeric_limits<double>::infinity();
      if (done == 0 && p == 0.0 && !std::isfinite(val)) usable = false;
      if (std::isfinite(prev) && std::isfinite(val) && val < prev - 1e-7) {
        ok = false;
        worst_drop = std::max(worst_drop, prev - val);
      }
      if (!std::isfinite(prev) && std::isfinite(val) && p > 0.0) ok = false;
      prev = val;
    }
    if (!usable) continue;

    // objective non-decreasing in each worst-case bound
    std::vector<uncertainty::WorstCaseModel> wc(1);
    auto& w = wc[0];
    w.alpha_slope = pi.cbc.alpha;
    const Eigen::MatrixXd F = pi.cbc.F_mean;
    w.F_tilde = [F](const Eigen::VectorXd&) { return F; };
    const double h = pi.cbc.hgrad_mean(0);
    w.h_tilde = [h](const Eigen::VectorXd&) { return h; };
    const Eigen::VectorXd gh = pi.cbc.hgrad_mean.tail(3);
    w.grad_h_tilde = [gh](const Eigen::VectorXd&) { return gh; };
    params.risk_p = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      prev = -std::numeric_limits<double>::infinity();
      for (double s : {0.0, 0.4, 0.8, 1.2}) {
        const double eF = axis == 0 ? 0.05 * s : 0.02;
        const double eh = axis == 1 ? 0.08 * s : 0.02;
        const double egh = axis == 2 ? 0.15 * s : 0.05;
        w.e_F = [eF](const Eigen::VectorXd&) { return eF; };
        w.e_h = [eh](const Eigen::VectorXd&) { return eh; };
        w.e_grad_h = [egh](const Eigen::VectorXd&) { return egh; };
        auto prob = synthesis::build_robust_socp(x, wc, pi.clf, params);
        auto sol = conic::solve(prob);
        double val = sol.status == conic::SolveStatus::Optimal
                         ? sol.obj_value
                         : std::numeric_limits<double>::infinity();
        if (std::isfinite(prev) && std::isfinite(val) && val < prev - 1e-7) {
          ok = false;
          worst_drop = std::max(worst_drop, prev - val);
        }
        prev = val;
      }
    }
    ++done;
  }
  json j;
  j["instances"] = done;
  j["worst_drop"] = worst_drop;
  j["passed"] = ok && done >= opt.monotone_instances;
  return j;
}

json check_robust_soundness(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {12}));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  double worst = std::numeric_limits<double>::infinity();
  int done = 0, attempts = 0;
  while (done < opt.robust_instances && attempts < 50 * opt.robust_instances) {
    ++attempts;
    ProbInstance pi = random_prob_instance(gen);
    RobustCbcInstance ri;
    ri.F_tilde = pi.cbc.F_mean;
    ri.h_tilde = pi.cbc.hgrad_mean(0) + 0.2;
    ri.grad_h_tilde = pi.cbc.hgrad_mean.tail(3);
    ri.e_F = 0.02 + 0.08 * u01(gen);
    ri.e_h = 0.02 + 0.1 * u01(gen);
    ri.e_grad_h = 0.05 + 0.15 * u01(gen);
    ri.alpha = 1.0;

    std::vector<uncertainty::WorstCaseModel> wc(1);
    auto& w = wc[0];
    w.alpha_slope = ri.alpha;
    const Eigen::MatrixXd F = ri.F_tilde;
    w.F_tilde = [F](const Eigen::VectorXd&) { return F; };
    const double h = ri.h_tilde;
    w.h_tilde = [h](const Eigen::VectorXd&) { return h; };
    const Eigen::VectorXd gh = ri.grad_h_tilde;
    w.grad_h_tilde = [gh](const Eigen::VectorXd&) { return gh; };
    const double eF = ri.e_F, eh = ri.e_h, egh = ri.e_grad_h;
    w.e_F = [eF](const Eigen::VectorXd&) { return eF; };
    w.e_h = [eh](const Eigen::VectorXd&) { return eh; };
    w.e_grad_h = [egh](const Eigen::VectorXd&) { return egh; };

    synthesis::ControllerParams params = paper_params();
    uncertainty::ClfSpec clf = pi.clf;
    auto prob = synthesis::build_robust_socp(x, wc, clf, params);
    auto sol = conic::solve(prob);
    if (sol.status != conic::SolveStatus::Optimal) continue;
    ++done;
    Eigen::VectorXd ulift(3);
    ulift << 1.0, sol.z(0), sol.z(1);
    const double mincbc = min_true_cbc_on_bounds(
        ri, ulift, opt.robust_samples,
        derive_seed(opt.seed, {120, (std::uint64_t)done}));
    worst = std::min(worst, mincbc);
  }
  json j;
  j["instances"] = done;
  j["worst_true_cbc"] = worst;
  j["passed"] = done >= opt.robust_instances && worst >= -1e-6;
  return j;
}

json check_kernel_reduction(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {13}));
  std::uniform_int_distribution<int> npick(2, 4), mpick(1, 3);
  std::uniform_real_distribution<double> ep(0.01, 2.0), pp(0.05, 0.95);
  double worst = 0.0;
  for (int i = 0; i < opt.kernel_tuples; ++i) {
    const int n = npick(gen), m = mpick(gen);
    const double eF = ep(gen), p = pp(gen);
    const double cp = synthesis::cantelli_coefficient(p);
    const Eigen::MatrixXd KF = synthesis::kernel_reduction_check(eF, p, n, m);
    const Eigen::VectorXd gV = randn_vec(gen, n);
    Eigen::VectorXd ulift(m + 1);
    ulift(0) = 1.0;
    ulift.tail(m) = randn_vec(gen, m);
    Eigen::MatrixXd varq(m + 1, m + 1);
    for (int a = 0; a < m + 1; ++a)
      for (int b = 0; b < m + 1; ++b)
        varq(a, b) = gV.dot(KF.block(a * n, b * n, n, n) * gV);
    const double prob_margin = cp * std::sqrt(ulift.dot(varq * ulift));
    const double robust_margin = eF * gV.norm() * ulift.norm();
    worst = std::max(worst, std::abs(prob_margin - robust_margin) /
                                std::max(robust_margin, 1e-300));
  }
  // limit check: p -> 1 shrinks the matched kernel to zero
  const double tiny =
      synthesis::kernel_reduction_check(1.0, 1.0 - 1e-9, 2, 1).norm();
  json j;
  j["tuples"] = opt.kernel_tuples;
  j["worst_rel_err"] = worst;
  j["kf_norm_at_p_near_1"] = tiny;
  j["passed"] = worst <= 1e-10 && tiny <= 1e-6;
  return j;
}

json check_world_gradients(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {14}));
  std::uniform_real_distribution<double> ux(-4.0, 4.0), u01(0.0, 1.0),
      umu(-M_PI, M_PI);
  double worst_fd = 0.0, worst_unit = 0.0, worst_lip = 0.0;
  int skipped = 0;

  auto fd_consistent = [&](const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x,
                           const Eigen::VectorXd& analytic) {
    const Eigen::VectorXd g1 = fd_gradient(f, x, 1e-4);
    const Eigen::VectorXd g2 = fd_gradient(f, x, 1e-5);
    if ((g1 - g2).lpNorm<Eigen::Infinity>() > 1e-6) return false;  // kink
    worst_fd = std::max(worst_fd,
                        (g2 - analytic).lpNorm<Eigen::Infinity>());
    return true;
  };

  // SDF shapes: unit gradient, Lipschitz pairs, FD consistency
  for (int i = 0; i < opt.fd_states; ++i) {
    world::Obstacle obs;
    if (u01(gen) < 0.5)
      obs = world::Circle{{ux(gen), ux(gen)}, 0.3 + u01(gen)};
    else
      obs = world::RoundedBox{
          {ux(gen), ux(gen)}, {0.3 + 0.5 * u01(gen), 0.2 + 0.4 * u01(gen)},
          0.1 * u01(gen)};
    const Eigen::Vector2d p1(ux(gen), ux(gen)), p2(ux(gen), ux(gen));
    const auto v1 = world::sdf(obs, p1), v2 = world::sdf(obs, p2);
    worst_lip = std::max(worst_lip, std::abs(v1.value - v2.value) -
                                        (p1 - p2).norm());
    if (!v1.degenerate)
      worst_unit = std::max(worst_unit, std::abs(v1.gradient.norm() - 1.0));
    auto f = [&obs](const Eigen::VectorXd& q) {
      return world::sdf(obs, Eigen::Vector2d(q(0), q(1))).value;
    };
    Eigen::VectorXd x2 = p1;
    Eigen::VectorXd an(2);
    an = v1.gradient;
    if (!fd_consistent(f, x2, an)) ++skipped;
  }

  // goal and path CLF gradients
  const auto scene = world::generate_scene(opt.seed, 1);
  const auto goal_clf = world::make_goal_clf(scene.goal);
  const auto path_clf = world::make_path_clf(scene.path);
  for (int i = 0; i < opt.fd_states; ++i) {
    Eigen::VectorXd x(3);
    x << 0.5 + 9.0 * u01(gen), 0.5 + 5.0 * u01(gen), umu(gen);
    if (!fd_consistent(goal_clf.V, x, goal_clf.grad_V(x))) ++skipped;
    if (!fd_consistent(path_clf.V, x, path_clf.grad_V(x))) ++skipped;
    if (goal_clf.V(x) < 0.0 || path_clf.V(x) < 0.0) worst_fd = 1.0;
  }

  // synthetic barrier means vs their analytic gradients
  uncertainty::CorruptionSpec corr;
  corr.sigma = 0.03;
  corr.seed = derive_seed(opt.seed, {140});
  auto models = uncertainty::synthetic_estimator(scene, corr, 0.177);
  for (int i = 0; i < opt.fd_states / 2; ++i) {
    Eigen::VectorXd x(3);
    x << 0.5 + 9.0 * u01(gen), 0.5 + 5.0 * u01(gen), umu(gen);
    for (const auto& b : models.barriers)
      if (!fd_consistent(b.mean, x, b.grad_mean(x))) ++skipped;
  }

  json j;
  j["max_fd_error"] = worst_fd;
  j["max_unit_gradient_error"] = worst_unit;
  j["max_lipschitz_excess"] = worst_lip;
  j["kink_skips"] = skipped;
  j["passed"] = worst_fd <= 1e-6 && worst_unit <= 1e-9 &&
                worst_lip <= 1e-12 && skipped < opt.fd_states;
  return j;
}

json check_frechet(const SuiteOptions& opt) {
  auto gen = make_engine(derive_seed(opt.seed, {15}));
  std::uniform_int_distribution<int> len(2, 10);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < opt.frechet_pairs; ++i) {
    std::vector<Eigen::Vector2d> a(len(gen)), b(len(gen));
    for (auto& p : a) p = Eigen::Vector2d(coord(gen), coord(gen));
    for (auto& p : b) p = Eigen::Vector2d(coord(gen), coord(gen));
    const double dp = sim::frechet_distance(a, b);
    const double bf = frechet_bruteforce(a, b);
    worst = std::max(worst, std::abs(dp - bf));
  }
  json j;
  j["pairs"] = opt.frechet_pairs;
  j["max_abs_diff"] = worst;
  j["passed"] = worst <= 1e-12;
  return j;
}

json check_determinism(const SuiteOptions& opt) {
  sim::SweepSpec spec;
  spec.scenes = world::generate_environments(opt.seed, 1);
  spec.controllers = {{synthesis::ControllerKind::Qp, 0.0},
                      {synthesis::ControllerKind::Robust, 0.0}};
  spec.noise_levels = {0.02};
  spec.seeds_per_cell = 2;
  spec.master_seed = opt.seed;
  spec.sim.horizon = 150;
  spec.params = paper_params();
  spec.parallel = 2;
  auto r1 = sim::batch_sweep(spec);
  auto r2 = sim::batch_sweep(spec);
  const bool same_tables = r1.success_table_csv() == r2.success_table_csv() &&
                           r1.frechet_table_csv(0) == r2.frechet_table_csv(0);
  bool same_outcomes = r1.cells.size() == r2.cells.size();
  if (same_outcomes)
    for (std::size_t i = 0; i < r1.cells.size(); ++i)
      if (r1.cells[i].outcome.frechet != r2.cells[i].outcome.frechet ||
          r1.cells[i].outcome.steps != r2.cells[i].outcome.steps)
        same_outcomes = false;
  json j;
  j["identical_tables"] = same_tables;
  j["identical_outcomes"] = same_outcomes;
  j["passed"] = same_tables && same_outcomes;
  return j;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {
      "conic.planted_recovery",    "conic.split_equivalence",
      "conic.epigraph_tightness",  "conic.scaling_invariance",
      "uncertainty.moments_mc",    "uncertainty.mvgp_consistency",
      "uncertainty.synthetic_estimator",
      "synthesis.cantelli_identity", "synthesis.cantelli_mc",
      "synthesis.qp_oracle",       "synthesis.reductions",
      "synthesis.monotonicity",    "synthesis.robust_soundness",
      "synthesis.kernel_reduction", "world.gradients_fd",
      "sim.frechet_bruteforce",    "sim.determinism",
  };
}

std::vector<CheckResult> run_suites(const std::string& selector,
                                    const SuiteOptions& options) {
  using Fn = std::function<json(const SuiteOptions&)>;
  const std::vector<std::pair<std::string, Fn>> table = {
      {"conic.planted_recovery", check_planted},
      {"conic.split_equivalence", check_split_equivalence},
      {"conic.epigraph_tightness", check_epigraph_tightness},
      {"conic.scaling_invariance", check_scaling_invariance},
      {"uncertainty.moments_mc", check_moments_mc},
      {"uncertainty.mvgp_consistency", check_mvgp},
      {"uncertainty.synthetic_estimator", check_synthetic_estimator},
      {"synthesis.cantelli_identity", check_cantelli_identity},
      {"synthesis.cantelli_mc", check_cantelli_mc},
      {"synthesis.qp_oracle", check_qp_oracle},
      {"synthesis.reductions", check_reductions},
      {"synthesis.monotonicity", check_monotonicity},
      {"synthesis.robust_soundness", check_robust_soundness},
      {"synthesis.kernel_reduction", check_kernel_reduction},
      {"world.gradients_fd", check_world_gradients},
      {"sim.frechet_bruteforce", check_frechet},
      {"sim.determinism", check_determinism},
  };
  std::vector<CheckResult> results;
  for (const auto& [name, fn] : table) {
    if (!selector.empty() && selector != "all" &&
        name.rfind(selector, 0) != 0)
      continue;
    json stats = fn(options);
    CheckResult r;
    r.name = name;
    r.passed = stats.value("passed", false);
    r.stats = stats.dump();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace socnav::check
