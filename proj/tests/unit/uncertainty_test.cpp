#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "socnav/check/oracles.hpp"
#include "socnav/common/rng.hpp"
#include "socnav/uncertainty/moments.hpp"
#include "socnav/uncertainty/synthetic.hpp"
#include "socnav/world/generator.hpp"

using namespace socnav;
using uncertainty::GpBarrierModel;
using uncertainty::GpDynamicsModel;
using uncertainty::Moments;

namespace {

GpDynamicsModel const_dyn(const Eigen::MatrixXd& F, const Eigen::MatrixXd& K) {
  GpDynamicsModel dyn;
  dyn.n = static_cast<int>(F.rows());
  dyn.m = static_cast<int>(F.cols()) - 1;
  dyn.mean = [F](const Eigen::VectorXd&) { return F; };
  dyn.cov = [K](const Eigen::VectorXd&) { return K; };
  return dyn;
}

GpBarrierModel const_barrier(double h, const Eigen::VectorXd& gh, double kh,
                             const Eigen::VectorXd& gk,
                             const Eigen::MatrixXd& hk, double a) {
  GpBarrierModel bar;
  bar.alpha_slope = a;
  bar.mean = [h](const Eigen::VectorXd&) { return h; };
  bar.grad_mean = [gh](const Eigen::VectorXd&) { return gh; };
  bar.var = [kh](const Eigen::VectorXd&) { return kh; };
  bar.grad_cov = [gk](const Eigen::VectorXd&) { return gk; };
  bar.hess_cov = [hk](const Eigen::VectorXd&) { return hk; };
  return bar;
}

}  // namespace

TEST_CASE("deterministic models collapse the CBC to the known-model form") {
  const int n = 3, m = 2;
  Eigen::MatrixXd F(n, m + 1);
  F << 0, 1, 0, 0, 0.5, 0, 0, 0, 1;
  Eigen::VectorXd gh(n);
  gh << 0.3, -0.2, 0.0;
  const double h = 0.7, a = 1.5;
  auto dyn = const_dyn(F, Eigen::MatrixXd::Zero(9, 9));
  auto bar = const_barrier(h, gh, 0.0, Eigen::VectorXd::Zero(n),
                           Eigen::MatrixXd::Zero(n, n), a);
  Moments mo = uncertainty::cbc_moments(dyn, bar, Eigen::VectorXd::Zero(n));
  Eigen::VectorXd expect = F.transpose() * gh;
  expect(0) += a * h;
  CHECK((mo.mean_vec - expect).norm() == doctest::Approx(0.0));
  CHECK(mo.var_mat.norm() == doctest::Approx(0.0));
}

TEST_CASE("hand-expanded 1x1 dynamics block: var = 4 I2") {
  // n = 1, m = 1, F~ = [1 1], grad h~ = [2], K_F = I2, a = 0
  Eigen::MatrixXd F(1, 2);
  F << 1, 1;
  Eigen::VectorXd gh(1);
  gh << 2;
  auto dyn = const_dyn(F, Eigen::MatrixXd::Identity(2, 2));
  auto bar = const_barrier(0.0, gh, 0.0, Eigen::VectorXd::Zero(1),
                           Eigen::MatrixXd::Zero(1, 1), 0.0);
  Moments mo = uncertainty::cbc_moments(dyn, bar, Eigen::VectorXd::Zero(1));
  CHECK(mo.mean_vec(0) == doctest::Approx(2.0));
  CHECK(mo.mean_vec(1) == doctest::Approx(2.0));
  CHECK((mo.var_mat - 4.0 * Eigen::MatrixXd::Identity(2, 2)).norm() ==
        doctest::Approx(0.0));
}

TEST_CASE("CLC with vanishing gradient keeps only the class-K mean") {
  Eigen::MatrixXd F(2, 2);
  F << 1, 2, 3, 4;
  auto dyn = const_dyn(F, Eigen::MatrixXd::Identity(4, 4));
  uncertainty::ClfSpec clf;
  clf.V = [](const Eigen::VectorXd&) { return 2.5; };
  clf.grad_V = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(2); };
  clf.alpha_slope = 2.0;
  Moments mo = uncertainty::clc_moments(dyn, clf, Eigen::VectorXd::Zero(2));
  CHECK(mo.mean_vec(0) == doctest::Approx(5.0));
  CHECK(mo.mean_vec(1) == doctest::Approx(0.0));
  CHECK(mo.var_mat.norm() == doctest::Approx(0.0));
}

TEST_CASE("Monte-Carlo oracle confirms the CBC moment propagation") {
  auto gen = make_engine(3);
  for (int trial = 0; trial < 3; ++trial) {
    auto inst = check::random_cbc_instance(gen, 3, 2, 0.06, 0.06);
    Eigen::VectorXd ulift(3);
    ulift << 1.0, 0.8, -0.6;
    auto mo = uncertainty::cbc_moments(inst.dynamics_model(),
                                       inst.barrier_model(),
                                       Eigen::VectorXd::Zero(3));
    auto mc = check::mc_cbc_moments(inst, ulift, 100000, 99 + trial);
    const double mean_f = mo.mean_vec.dot(ulift);
    const double var_f = ulift.dot(mo.var_mat * ulift);
    CHECK(std::abs(mean_f - mc.mean) <= 3.5 * mc.mean_se);
    CHECK(std::abs(var_f - mc.variance) / mc.variance <= 0.05);
  }
}

TEST_CASE("mvgp_expand: scalar and diagonal Kronecker examples") {
  uncertainty::MvgpCovariance cov;
  cov.A = Eigen::MatrixXd::Identity(2, 2);
  cov.B = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Constant(1, 1, 3.0);
  };
  Eigen::MatrixXd K = uncertainty::mvgp_expand(cov, Eigen::VectorXd::Zero(1));
  CHECK((K - 3.0 * Eigen::MatrixXd::Identity(2, 2)).norm() ==
        doctest::Approx(0.0));

  // A = diag(1,2) couples the input directions, B = diag(1,4) the states;
  // with column-stacked vec(F) the expansion interleaves as diag(1,4,2,8).
  cov.A = Eigen::Vector2d(1.0, 2.0).asDiagonal();
  cov.B = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd(Eigen::Vector2d(1.0, 4.0).asDiagonal());
  };
  K = uncertainty::mvgp_expand(cov, Eigen::VectorXd::Zero(2));
  Eigen::Vector4d expect(1.0, 4.0, 2.0, 8.0);
  CHECK((K.diagonal() - expect).norm() == doctest::Approx(0.0));
  CHECK(K.norm() == doctest::Approx(expect.norm()));
}

TEST_CASE("mvgp expansion reproduces the matrix-variate input variance") {
  auto gen = make_engine(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 3, m = 2;
  Eigen::MatrixXd RA(m + 1, m + 1), RB(n, n);
  for (int i = 0; i < m + 1; ++i)
    for (int j = 0; j < m + 1; ++j) RA(i, j) = normal(gen);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) RB(i, j) = normal(gen);
  uncertainty::MvgpCovariance cov;
  cov.A = RA * RA.transpose() + 0.1 * Eigen::MatrixXd::Identity(m + 1, m + 1);
  const Eigen::MatrixXd B =
      RB * RB.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  cov.B = [B](const Eigen::VectorXd&) { return B; };
  const Eigen::MatrixXd K = uncertainty::mvgp_expand(cov, Eigen::VectorXd::Zero(n));

  Eigen::VectorXd ulift(m + 1);
  ulift << 1.0, -0.4, 1.7;
  Eigen::MatrixXd varFu = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < m + 1; ++i)
    for (int j = 0; j < m + 1; ++j)
      varFu += ulift(i) * ulift(j) * K.block(i * n, j * n, n, n);
  const Eigen::MatrixXd closed = ulift.dot(cov.A * ulift) * B;
  CHECK((varFu - closed).norm() / closed.norm() <= 1e-12);
}

TEST_CASE("var_factor: identity, rank-deficient diagonal, random PSD") {
  Moments mo;
  mo.mean_vec = Eigen::VectorXd::Zero(3);
  mo.var_mat = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd D = uncertainty::var_factor(mo);
  Eigen::VectorXd u(3);
  u << 1.0, -2.0, 0.5;
  CHECK((D * u).norm() == doctest::Approx(u.norm()).epsilon(1e-12));

  mo.var_mat = Eigen::Vector3d(4.0, 9.0, 0.0).asDiagonal();
  D = uncertainty::var_factor(mo);
  CHECK((D * u).norm() ==
        doctest::Approx(std::sqrt(4.0 * 1 + 9.0 * 4)).epsilon(1e-12));

  auto gen = make_engine(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd R(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) R(i, j) = normal(gen);
  mo.var_mat = R * R.transpose();
  D = uncertainty::var_factor(mo);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd w(4);
    for (int i = 0; i < 4; ++i) w(i) = normal(gen);
    const double lhs = (D * w).norm();
    const double rhs = std::sqrt(w.dot(mo.var_mat * w));
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, rhs));
  }

  mo.var_mat = -Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(uncertainty::var_factor(mo), std::domain_error);
}

TEST_CASE("psd repair flags a projection beyond tolerance") {
  Eigen::MatrixXd F(1, 2);
  F << 1, 1;
  Eigen::VectorXd gh(1);
  gh << 1;
  // grad_cov cross term with alpha makes the assembled matrix indefinite
  auto dyn = const_dyn(F, Eigen::MatrixXd::Zero(2, 2));
  Eigen::VectorXd gk(1);
  gk << 5.0;
  auto bar = const_barrier(1.0, gh, 0.0, gk, Eigen::MatrixXd::Zero(1, 1), 1.0);
  Moments mo = uncertainty::cbc_moments(dyn, bar, Eigen::VectorXd::Zero(1));
  CHECK(mo.psd_projected);
  CHECK(mo.min_eig_before_repair < -1e-8);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mo.var_mat);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("synthetic estimator: zero noise is exact, bounds dominate") {
  const auto scene = world::generate_scene(21, 0);
  const auto truth = world::assemble_barriers(scene, 0.177);

  uncertainty::CorruptionSpec spec;
  spec.sigma = 0.0;
  spec.sigma_dyn = 0.0;
  auto clean = uncertainty::synthetic_estimator(scene, spec, 0.177);
  Eigen::Vector3d x(4.2, 2.8, 0.4);
  for (std::size_t i = 0; i < clean.barriers.size(); ++i) {
    CHECK(clean.barriers[i].mean(x) ==
          doctest::Approx(truth.value(i, x)).epsilon(1e-14));
    CHECK(clean.worst_case[i].e_h(x) == 0.0);
    CHECK(clean.worst_case[i].e_grad_h(x) == 0.0);
    CHECK(clean.worst_case[i].e_F(x) == 0.0);
  }

  spec.sigma = 0.05;
  spec.sigma_dyn = 0.01;
  spec.seed = 77;
  auto noisy = uncertainty::synthetic_estimator(scene, spec, 0.177);
  auto gen = make_engine(31);
  std::uniform_real_distribution<double> ux(0.0, 10.0), uy(0.0, 6.0);
  for (int s = 0; s < 2000; ++s) {
    Eigen::Vector3d q(ux(gen), uy(gen), 0.0);
    for (std::size_t i = 0; i < noisy.barriers.size(); ++i) {
      CHECK(std::abs(noisy.barriers[i].mean(q) - truth.value(i, q)) <=
            noisy.worst_case[i].e_h(q));
    }
  }
  CHECK(noisy.worst_case[0].e_h(x) == doctest::Approx(3.89 * 0.05));

  // e_h scales monotonically with the noise level
  double prev = -1.0;
  for (double sigma : {0.01, 0.02, 0.05}) {
    spec.sigma = sigma;
    auto m = uncertainty::synthetic_estimator(scene, spec, 0.177);
    const double eh = m.worst_case[0].e_h(x);
    CHECK(eh > prev);
    prev = eh;
  }
}
