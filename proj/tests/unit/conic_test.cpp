#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "socnav/check/oracles.hpp"
#include "socnav/common/rng.hpp"
#include "socnav/conic/modeling.hpp"
#include "socnav/conic/solver.hpp"

using namespace socnav;
using conic::SecondOrderCone;
using conic::SocpProblem;
using conic::SolveStatus;

namespace {

SocpProblem one_cone_problem(const Eigen::VectorXd& objective,
                             SecondOrderCone cone) {
  SocpProblem p;
  p.objective = objective;
  p.cones.push_back(std::move(cone));
  return p;
}

}  // namespace

TEST_CASE("1-D cone |z-2| <= z has minimum at the scan oracle value") {
  // independent oracle: grid scan of min z s.t. |z-2| <= z
  const double oracle = check::grid_min_1d(
      [](double z) {
        return std::abs(z - 2.0) <= z ? z
                                      : std::numeric_limits<double>::infinity();
      },
      -5.0, 5.0);
  CHECK(oracle == doctest::Approx(1.0).epsilon(1e-9));

  SecondOrderCone cone;
  cone.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  cone.b = Eigen::VectorXd::Constant(1, -2.0);
  cone.c = Eigen::VectorXd::Constant(1, 1.0);
  cone.d0 = 0.0;
  auto sol = conic::solve(
      one_cone_problem(Eigen::VectorXd::Constant(1, 1.0), cone));
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.z(0) == doctest::Approx(oracle).epsilon(1e-7));
  CHECK(sol.obj_value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.primal_residual <= 1e-8);
  CHECK(sol.dual_residual <= 1e-8);
  CHECK(sol.duality_gap <= 1e-8);
}

TEST_CASE("empty norm cone ||z|| <= -1 is certified infeasible") {
  SecondOrderCone cone;
  cone.A = Eigen::MatrixXd::Identity(1, 1);
  cone.b = Eigen::VectorXd::Zero(1);
  cone.c = Eigen::VectorXd::Zero(1);
  cone.d0 = -1.0;
  auto sol = conic::solve(one_cone_problem(Eigen::VectorXd::Zero(1), cone));
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded direction is detected") {
  SecondOrderCone cone;  // z >= 0
  cone.A.resize(0, 1);
  cone.b.resize(0);
  cone.c = Eigen::VectorXd::Constant(1, 1.0);
  cone.d0 = 0.0;
  auto sol = conic::solve(
      one_cone_problem(Eigen::VectorXd::Constant(1, -1.0), cone));
  CHECK(sol.status == SolveStatus::Unbounded);
}

TEST_CASE("no cones: zero objective is optimal, nonzero is unbounded") {
  SocpProblem p;
  p.objective = Eigen::VectorXd::Zero(3);
  CHECK(conic::solve(p).status == SolveStatus::Optimal);
  p.objective(1) = 1.0;
  CHECK(conic::solve(p).status == SolveStatus::Unbounded);
}

TEST_CASE("planted primal-dual certificates are recovered") {
  auto gen = make_engine(7);
  std::uniform_int_distribution<int> dims(2, 25), cones(1, 8);
  for (int i = 0; i < 25; ++i) {
    auto inst = check::make_planted_socp(gen, dims(gen), cones(gen));
    auto sol = conic::solve(inst.problem);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(std::abs(sol.obj_value - inst.planted_objective) /
              std::max(1.0, std::abs(inst.planted_objective)) <=
          1e-7);
    for (const auto& cone : inst.problem.cones)
      CHECK(cone.residual(sol.z) >= -1e-7);
  }
}

TEST_CASE("rotated cone template encodes ||x||^2 <= y z") {
  auto cone = conic::rotated_cone_to_soc(2);
  Eigen::VectorXd v(4);
  v << 1.0, 1.0, 2.0, 1.0;  // boundary: ||x||^2 = 2 = y z
  CHECK(cone.residual(v) == doctest::Approx(0.0).epsilon(1e-12));
  v << 0.0, 0.0, 0.0, 0.0;
  CHECK(cone.residual(v) == doctest::Approx(0.0));

  auto cone1 = conic::rotated_cone_to_soc(1);
  Eigen::VectorXd w(3);
  w << 3.0, 1.0, 1.0;  // 9 > 1: infeasible
  CHECK(cone1.residual(w) < 0.0);
  CHECK((cone1.A * w + cone1.b).norm() == doctest::Approx(6.0));
}

TEST_CASE("epigraph cone minimal l matches the scalar scan oracle") {
  // min l s.t. ||[2r; 2 sqrt(lambda) delta; l-1]|| <= l+1 at fixed (r, delta)
  auto min_l = [](double r_norm_sq, double lambda, double delta) {
    return check::grid_min_1d(
        [&](double l) {
          const double lhs =
              std::sqrt(4.0 * r_norm_sq + 4.0 * lambda * delta * delta +
                        (l - 1.0) * (l - 1.0));
          return lhs <= l + 1.0 ? l : std::numeric_limits<double>::infinity();
        },
        -1.0, 2000.0, 2000, 40);
  };
  CHECK(min_l(0.0, 1.0, 0.0) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(min_l(1.0, 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(min_l(0.0, 1000.0, 0.01) == doctest::Approx(0.1).epsilon(1e-6));

  // same via the solver with u pinned by linear rows
  const int n_vars = 2;  // (u, delta)
  Eigen::MatrixXd A_lin(1, n_vars);
  A_lin << 1.0, 0.0;
  Eigen::VectorXd b_lin(1);
  b_lin << 0.0;
  auto epi =
      conic::epigraph_quadratic(A_lin, b_lin, std::sqrt(1.0), 1, n_vars);
  SocpProblem prob;
  prob.objective = Eigen::VectorXd::Zero(3);
  prob.objective(epi.l_index) = 1.0;
  prob.cones.push_back(epi.cone);
  // single-sided activating rows keep a strict interior: u >= 1, delta >= 1
  for (int var : {0, 1}) {
    SecondOrderCone row;
    row.A.resize(0, 3);
    row.b.resize(0);
    row.c = Eigen::VectorXd::Zero(3);
    row.c(var) = 1.0;
    row.d0 = -1.0;
    prob.cones.push_back(row);
  }
  auto sol = conic::solve(prob);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.obj_value == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("sum-of-norms split matches the 1-D piecewise scan") {
  // |z-1| + |z+1| <= 3z: scan says feasible iff z >= 2/3
  const double oracle = check::grid_min_1d(
      [](double z) {
        return std::abs(z - 1.0) + std::abs(z + 1.0) <= 3.0 * z
                   ? z
                   : std::numeric_limits<double>::infinity();
      },
      -4.0, 4.0);
  CHECK(oracle == doctest::Approx(2.0 / 3.0).epsilon(1e-6));

  Eigen::MatrixXd A(1, 1), B(1, 1);
  A << 1.0;
  B << 1.0;
  Eigen::VectorXd a(1), b(1), c(1);
  a << 1.0;
  b << -1.0;
  c << 3.0;
  auto split = conic::split_sum_of_norms(A, a, B, b, c);
  CHECK(split.p_index == 1);
  CHECK(split.q_index == 2);
  REQUIRE(split.cones.size() == 3);
  SocpProblem prob;
  prob.objective = Eigen::VectorXd::Zero(3);
  prob.objective(0) = 1.0;
  prob.cones = split.cones;
  auto sol = conic::solve(prob);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.z(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("zero-norm split reduces to the linear row with p = q = 0") {
  Eigen::MatrixXd Z(1, 2);
  Z.setZero();
  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd c(2);
  c << 1.0, 0.5;
  auto split = conic::split_sum_of_norms(Z, z0, Z, z0, c);
  SocpProblem prob;
  prob.objective = Eigen::VectorXd::Zero(4);
  prob.objective.head(2) = c;
  prob.cones = split.cones;
  // bound the variables so the problem stays bounded
  for (int i = 0; i < 2; ++i) {
    SecondOrderCone row;
    row.A.resize(0, 4);
    row.b.resize(0);
    row.c = Eigen::VectorXd::Zero(4);
    row.c(i) = 1.0;
    row.d0 = 1.0;  // z_i >= -1
    prob.cones.push_back(row);
  }
  auto sol = conic::solve(prob);
  REQUIRE(sol.status == SolveStatus::Optimal);
  // optimum sits where c'z = 0 is active: p + q <= c'z forces p = q = 0
  CHECK(sol.obj_value == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(sol.z(2) == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(sol.z(3) == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("cone scaling leaves the solution unchanged") {
  auto gen = make_engine(11);
  auto inst = check::make_planted_socp(gen, 6, 3);
  auto base = conic::solve(inst.problem);
  REQUIRE(base.status == SolveStatus::Optimal);
  auto scaled = inst.problem;
  double s = 0.25;
  for (auto& cone : scaled.cones) {
    cone.A *= s;
    cone.b *= s;
    cone.c *= s;
    cone.d0 *= s;
    s *= 3.7;
  }
  auto after = conic::solve(scaled);
  REQUIRE(after.status == SolveStatus::Optimal);
  CHECK((base.z - after.z).norm() <= 1e-6 * std::max(1.0, base.z.norm()));
}

TEST_CASE("problem JSON dump carries objective and dense rows") {
  SecondOrderCone cone;
  cone.A = Eigen::MatrixXd::Identity(2, 2);
  cone.b = Eigen::VectorXd::Zero(2);
  cone.c = Eigen::VectorXd::Ones(2);
  cone.d0 = 0.5;
  SocpProblem p = one_cone_problem(Eigen::VectorXd::Ones(2), cone);
  p.variable_names = {"z0", "z1"};
  const std::string text = conic::to_json(p);
  CHECK(text.find("\"objective\"") != std::string::npos);
  CHECK(text.find("\"cones\"") != std::string::npos);
  CHECK(text.find("z1") != std::string::npos);
}

TEST_CASE("validate rejects inconsistent dimensions") {
  SecondOrderCone cone;
  cone.A = Eigen::MatrixXd::Identity(2, 3);
  cone.b = Eigen::VectorXd::Zero(2);
  cone.c = Eigen::VectorXd::Ones(2);  // wrong: dim 2 vs A cols 3
  SocpProblem p;
  p.objective = Eigen::VectorXd::Ones(3);
  p.cones.push_back(cone);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
