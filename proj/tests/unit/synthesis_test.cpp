#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "socnav/check/oracles.hpp"
#include "socnav/common/rng.hpp"
#include "socnav/conic/solver.hpp"
#include "socnav/synthesis/builders.hpp"
#include "socnav/uncertainty/synthetic.hpp"
#include "socnav/world/clf.hpp"
#include "socnav/world/generator.hpp"

using namespace socnav;
using synthesis::ControllerKind;

namespace {

synthesis::ControllerParams paper_params() {
  synthesis::ControllerParams p;
  p.L = Eigen::Vector3d(0.0, 10.0, 3.0).asDiagonal();
  p.k_baseline = [](const Eigen::VectorXd&) {
    return Eigen::Vector3d(1.0, 0.65, 0.0);
  };
  p.lambda = 1000.0;
  p.u_max = Eigen::Vector2d(0.65, 2.0);
  p.u_min = Eigen::Vector2d(-0.65, -2.0);
  return p;
}

struct SceneFixture {
  world::Scene scene = world::generate_scene(101, 2);
  uncertainty::SyntheticModels models;
  uncertainty::ClfSpec clf;
  synthesis::ModelSet ms;

  explicit SceneFixture(double sigma = 0.02) {
    uncertainty::CorruptionSpec corr;
    corr.sigma = sigma;
    corr.sigma_dyn = sigma > 0 ? 0.005 : 0.0;
    corr.seed = 4242;
    models = uncertainty::synthetic_estimator(scene, corr, 0.177);
    clf = world::make_path_clf(scene.path);
    ms.dyn = &models.dynamics;
    ms.gp_barriers = &models.barriers;
    ms.worst_case = &models.worst_case;
  }
};

}  // namespace

TEST_CASE("cantelli coefficient values and domain") {
  CHECK(synthesis::cantelli_coefficient(0.0) == 0.0);
  CHECK(synthesis::cantelli_coefficient(0.5) == doctest::Approx(1.0));
  CHECK(synthesis::cantelli_coefficient(0.8) == doctest::Approx(2.0));
  CHECK_THROWS_AS(synthesis::cantelli_coefficient(1.0), std::domain_error);
  CHECK_THROWS_AS(synthesis::cantelli_coefficient(-0.1), std::domain_error);
}

TEST_CASE("constraint-count law for the three builders") {
  SceneFixture fx;
  const Eigen::Vector3d x(1.0, 3.0, 0.2);
  const std::size_t nb = fx.models.barriers.size();
  auto params = paper_params();
  const std::size_t box_rows = 4;  // two inputs, both bounds

  auto qp = synthesis::build_qp_socp(x, fx.models.dynamics, fx.models.barriers,
                                     fx.clf, params);
  CHECK(qp.cones.size() == 1 + nb + 1 + box_rows);

  params.risk_p = 0.4;
  auto prob = synthesis::build_prob_socp(x, fx.models.dynamics,
                                         fx.models.barriers, fx.clf, params);
  CHECK(prob.cones.size() == 1 + nb + 1 + box_rows);

  auto rob =
      synthesis::build_robust_socp(x, fx.models.worst_case, fx.clf, params);
  CHECK(rob.cones.size() == 1 + 3 * nb + 1 + box_rows);
  CHECK(rob.objective.size() == 2 + 2 + 2 * static_cast<int>(nb));
}

TEST_CASE("risk p = 0 reduces the probabilistic SOCP to the QP") {
  SceneFixture fx;
  auto gen = make_engine(55);
  std::uniform_real_distribution<double> ux(0.5, 9.5), uy(0.5, 5.5),
      umu(-M_PI, M_PI);
  const auto truth = world::assemble_barriers(fx.scene, 0.177);
  int tested = 0;
  for (int i = 0; tested < 20 && i < 200; ++i) {
    Eigen::Vector3d x(ux(gen), uy(gen), umu(gen));
    if (truth.min_value(x) < 0.15) continue;
    auto params = paper_params();
    auto qp = synthesis::decide(ControllerKind::Qp, x, fx.ms, fx.clf, params);
    params.risk_p = 0.0;
    auto prob =
        synthesis::decide(ControllerKind::Probabilistic, x, fx.ms, fx.clf, params);
    if (qp.status != conic::SolveStatus::Optimal ||
        prob.status != conic::SolveStatus::Optimal)
      continue;
    ++tested;
    CHECK((qp.u - prob.u).norm() <= 1e-6);
  }
  CHECK(tested >= 15);
}

TEST_CASE("zero error bounds reduce the robust SOCP to the QP") {
  SceneFixture fx;
  std::vector<uncertainty::WorstCaseModel> wc0 = fx.models.worst_case;
  for (auto& w : wc0) {
    w.e_F = [](const Eigen::VectorXd&) { return 0.0; };
    w.e_h = [](const Eigen::VectorXd&) { return 0.0; };
    w.e_grad_h = [](const Eigen::VectorXd&) { return 0.0; };
  }
  synthesis::ModelSet ms0 = fx.ms;
  ms0.worst_case = &wc0;

  auto gen = make_engine(56);
  std::uniform_real_distribution<double> ux(0.5, 9.5), uy(0.5, 5.5),
      umu(-M_PI, M_PI);
  const auto truth = world::assemble_barriers(fx.scene, 0.177);
  int tested = 0;
  for (int i = 0; tested < 20 && i < 200; ++i) {
    Eigen::Vector3d x(ux(gen), uy(gen), umu(gen));
    if (truth.min_value(x) < 0.15) continue;
    auto params = paper_params();
    auto qp = synthesis::decide(ControllerKind::Qp, x, fx.ms, fx.clf, params);
    auto rob = synthesis::decide(ControllerKind::Robust, x, ms0, fx.clf, params);
    if (qp.status != conic::SolveStatus::Optimal ||
        rob.status != conic::SolveStatus::Optimal)
      continue;
    ++tested;
    CHECK((qp.u - rob.u).norm() <= 1e-6);
  }
  CHECK(tested >= 15);
}

TEST_CASE("growing variance shrinks the feasible region monotonically") {
  // fixed mean, inflate the dynamics covariance: optimum can only worsen
  auto gen = make_engine(57);
  auto inst = check::random_cbc_instance(gen, 3, 2, 0.05, 0.05);
  inst.hgrad_mean(0) = 0.15;
  auto params = paper_params();
  params.risk_p = 0.6;
  uncertainty::ClfSpec clf;
  const Eigen::VectorXd gV = Eigen::Vector3d(1.2, -0.3, 0.5);
  clf.V = [](const Eigen::VectorXd&) { return 1.0; };
  clf.grad_V = [gV](const Eigen::VectorXd&) { return gV; };

  double prev = -1e300;
  for (double scale : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    auto dyn = inst.dynamics_model();
    const Eigen::MatrixXd K = inst.KF * scale;
    dyn.cov = [K](const Eigen::VectorXd&) { return K; };
    std::vector<uncertainty::GpBarrierModel> bars = {inst.barrier_model()};
    auto prob = synthesis::build_prob_socp(Eigen::VectorXd::Zero(3), dyn, bars,
                                           clf, params);
    auto sol = conic::solve(prob);
    REQUIRE(sol.status == conic::SolveStatus::Optimal);
    CHECK(sol.obj_value >= prev - 1e-7);
    prev = sol.obj_value;
  }
}

TEST_CASE("kernel choice matches probabilistic and robust stability margins") {
  auto gen = make_engine(58);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::MatrixXd K = synthesis::kernel_reduction_check(2.0, 0.8, 2, 1);
  CHECK((K - Eigen::MatrixXd::Identity(4, 4)).norm() ==
        doctest::Approx(0.0).epsilon(1e-14));

  for (int i = 0; i < 100; ++i) {
    const int n = 2 + (i % 3), m = 1 + (i % 2);
    const double eF = 0.01 + 2.0 * std::abs(normal(gen));
    const double p = 0.05 + 0.9 * (i / 100.0);
    const double cp = synthesis::cantelli_coefficient(p);
    const Eigen::MatrixXd KF = synthesis::kernel_reduction_check(eF, p, n, m);
    Eigen::VectorXd gV(n), ulift(m + 1);
    for (int k = 0; k < n; ++k) gV(k) = normal(gen);
    ulift(0) = 1.0;
    for (int k = 1; k <= m; ++k) ulift(k) = normal(gen);
    Eigen::MatrixXd varq(m + 1, m + 1);
    for (int a = 0; a < m + 1; ++a)
      for (int b = 0; b < m + 1; ++b)
        varq(a, b) = gV.dot(KF.block(a * n, b * n, n, n) * gV);
    const double lhs = cp * std::sqrt(ulift.dot(varq * ulift));
    const double rhs = eF * gV.norm() * ulift.norm();
    CHECK(std::abs(lhs - rhs) <= 1e-10 * rhs);
  }
}

TEST_CASE("decide: free space tracks the baseline at v_max") {
  world::Scene empty;
  empty.name = "empty";
  empty.goal = {8.0, 0.0};
  empty.start = {0.0, 0.0, 0.0};
  uncertainty::CorruptionSpec corr;
  corr.sigma = 0.0;
  corr.sigma_dyn = 0.0;
  // no obstacles: the QP has only CLC + epigraph + boxes
  auto models = uncertainty::synthetic_estimator(empty, corr, 0.177);
  auto clf = world::make_goal_clf(empty.goal);
  synthesis::ModelSet ms;
  ms.dyn = &models.dynamics;
  ms.gp_barriers = &models.barriers;
  auto params = paper_params();
  auto dec = synthesis::decide(ControllerKind::Qp,
                               Eigen::Vector3d(0.0, 0.0, 0.0), ms, clf, params);
  REQUIRE(dec.status == conic::SolveStatus::Optimal);
  // heading straight at the goal, CLC is already satisfied at the baseline
  CHECK(dec.u(0) == doctest::Approx(0.65).epsilon(1e-4));
  CHECK(dec.u(1) == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("decide: near an obstacle the robust margin stays nonnegative") {
  SceneFixture fx(0.02);
  const auto truth = world::assemble_barriers(fx.scene, 0.177);
  // find a state close to the first obstacle, heading at it
  const auto& circle = std::get<world::Circle>(fx.scene.obstacles.front());
  Eigen::Vector2d dir(-1.0, 0.0);
  Eigen::Vector2d pos = circle.center + (circle.radius + 0.177 + 0.35) *
                                            Eigen::Vector2d(1.0, 0.0);
  Eigen::Vector3d x(pos(0), pos(1), std::atan2(-dir(1), -dir(0)) + M_PI);
  REQUIRE(truth.min_value(x) > 0.0);
  auto params = paper_params();
  auto dec = synthesis::decide(ControllerKind::Robust, x, fx.ms, fx.clf, params);
  if (dec.status == conic::SolveStatus::Optimal) {
    for (double m : dec.margins) CHECK(m >= -1e-7);
    CHECK(dec.u(0) <= 0.65 + 1e-9);
  }
}

TEST_CASE("decide: absurd error bounds surface infeasibility, no input") {
  SceneFixture fx(0.02);
  std::vector<uncertainty::WorstCaseModel> wc = fx.models.worst_case;
  for (auto& w : wc) {
    w.e_F = [](const Eigen::VectorXd&) { return 50.0; };
    w.e_h = [](const Eigen::VectorXd&) { return 10.0; };
    w.e_grad_h = [](const Eigen::VectorXd&) { return 10.0; };
  }
  synthesis::ModelSet ms = fx.ms;
  ms.worst_case = &wc;
  auto params = paper_params();
  auto dec = synthesis::decide(ControllerKind::Robust,
                               Eigen::Vector3d(1.0, 3.0, 0.0), ms, fx.clf,
                               params);
  CHECK(dec.status == conic::SolveStatus::Infeasible);
  CHECK(dec.u.size() == 0);
}

TEST_CASE("QP decision agrees with the dense active-set oracle") {
  auto gen = make_engine(59);
  int tested = 0;
  for (int i = 0; tested < 10 && i < 60; ++i) {
    auto inst = check::random_cbc_instance(gen, 3, 2, 0.0, 0.0);
    inst.hgrad_mean(0) = 0.1 + 0.4 * std::abs(inst.hgrad_mean(0));
    auto dyn = inst.dynamics_model();
    std::vector<uncertainty::GpBarrierModel> bars = {inst.barrier_model()};
    uncertainty::ClfSpec clf;
    const Eigen::VectorXd gV = inst.hgrad_mean.tail(3).reverse();
    clf.V = [](const Eigen::VectorXd&) { return 0.8; };
    clf.grad_V = [gV](const Eigen::VectorXd&) { return gV; };

    auto params = paper_params();
    synthesis::ModelSet ms;
    ms.dyn = &dyn;
    ms.gp_barriers = &bars;
    auto dec = synthesis::decide(ControllerKind::Qp, Eigen::VectorXd::Zero(3),
                                 ms, clf, params);
    if (dec.status != conic::SolveStatus::Optimal) continue;

    const Eigen::MatrixXd F = inst.F_mean;
    Eigen::VectorXd q = F.transpose() * gV;
    q(0) += 2.0 * 0.8;
    Eigen::VectorXd pb = F.transpose() * inst.hgrad_mean.tail(3);
    pb(0) += inst.alpha * inst.hgrad_mean(0);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(3, 2);
    S(1, 0) = 1.0;
    S(2, 1) = 1.0;
    Eigen::VectorXd e1 = Eigen::Vector3d(1.0, 0.0, 0.0);
    const Eigen::MatrixXd LL = params.L * params.L.transpose();
    check::DenseQp qp;
    qp.H = Eigen::MatrixXd::Zero(3, 3);
    qp.H.topLeftCorner(2, 2) = 2.0 * S.transpose() * LL * S;
    qp.H(2, 2) = 2.0 * params.lambda;
    qp.g = Eigen::VectorXd::Zero(3);
    qp.g.head(2) =
        2.0 * S.transpose() * LL * (e1 - params.k_baseline(Eigen::VectorXd()));
    qp.C = Eigen::MatrixXd::Zero(6, 3);
    qp.d = Eigen::VectorXd::Zero(6);
    qp.C.block(0, 0, 1, 2) = q.tail(2).transpose();
    qp.C(0, 2) = -1.0;
    qp.d(0) = -q(0);
    qp.C.block(1, 0, 1, 2) = -pb.tail(2).transpose();
    qp.d(1) = pb(0);
    qp.C(2, 0) = 1.0;
    qp.d(2) = 0.65;
    qp.C(3, 1) = 1.0;
    qp.d(3) = 2.0;
    qp.C(4, 0) = -1.0;
    qp.d(4) = 0.65;
    qp.C(5, 1) = -1.0;
    qp.d(5) = 2.0;
    auto w = check::solve_dense_qp_enumeration(qp);
    if (!w) continue;
    ++tested;
    CHECK((w->head(2) - dec.u).norm() <= 1e-5);
  }
  CHECK(tested >= 8);
}

TEST_CASE("robust soundness: sampled boundary errors never break the CBC") {
  auto gen = make_engine(61);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int done = 0;
  for (int i = 0; done < 5 && i < 50; ++i) {
    auto inst = check::random_cbc_instance(gen, 3, 2, 0.05, 0.05);
    check::RobustCbcInstance ri;
    ri.F_tilde = inst.F_mean;
    ri.h_tilde = std::abs(inst.hgrad_mean(0)) + 0.2;
    ri.grad_h_tilde = inst.hgrad_mean.tail(3);
    ri.e_F = 0.05 + 0.05 * u01(gen);
    ri.e_h = 0.05 + 0.05 * u01(gen);
    ri.e_grad_h = 0.1 + 0.1 * u01(gen);
    ri.alpha = 1.0;
    std::vector<uncertainty::WorstCaseModel> wc(1);
    auto& w = wc[0];
    w.alpha_slope = 1.0;
    const auto F = ri.F_tilde;
    const auto gh = ri.grad_h_tilde;
    const double h = ri.h_tilde, eF = ri.e_F, eh = ri.e_h, egh = ri.e_grad_h;
    w.F_tilde = [F](const Eigen::VectorXd&) { return F; };
    w.h_tilde = [h](const Eigen::VectorXd&) { return h; };
    w.grad_h_tilde = [gh](const Eigen::VectorXd&) { return gh; };
    w.e_F = [eF](const Eigen::VectorXd&) { return eF; };
    w.e_h = [eh](const Eigen::VectorXd&) { return eh; };
    w.e_grad_h = [egh](const Eigen::VectorXd&) { return egh; };
    uncertainty::ClfSpec clf;
    const Eigen::VectorXd gV = Eigen::Vector3d(0.7, 0.2, -0.4);
    clf.V = [](const Eigen::VectorXd&) { return 0.6; };
    clf.grad_V = [gV](const Eigen::VectorXd&) { return gV; };
    auto prob = synthesis::build_robust_socp(Eigen::VectorXd::Zero(3), wc, clf,
                                             paper_params());
    auto sol = conic::solve(prob);
    if (sol.status != conic::SolveStatus::Optimal) continue;
    ++done;
    Eigen::VectorXd ulift(3);
    ulift << 1.0, sol.z(0), sol.z(1);
    CHECK(check::min_true_cbc_on_bounds(ri, ulift, 10000, 1000 + i) >= -1e-6);
  }
  CHECK(done >= 5);
}
