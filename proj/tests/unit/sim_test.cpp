#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "socnav/check/oracles.hpp"
#include "socnav/common/rng.hpp"
#include "socnav/sim/frechet.hpp"
#include "socnav/sim/sweep.hpp"
#include "socnav/world/clf.hpp"
#include "socnav/world/generator.hpp"

using namespace socnav;

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

}  // namespace

TEST_CASE("zero-order-hold RK4 step: rest, straight line, circle closure") {
  sim::SimConfig cfg;
  world::UnicycleState s{1.0, 2.0, 0.5};
  auto next = sim::step(s, {0.0, 0.0}, cfg);
  CHECK(next.x == doctest::Approx(1.0));
  CHECK(next.y == doctest::Approx(2.0));
  CHECK(next.mu == doctest::Approx(0.5));

  s = {0.0, 0.0, 0.0};
  next = sim::step(s, {1.0, 0.0}, cfg);
  CHECK(next.x == doctest::Approx(0.02).epsilon(1e-10));
  CHECK(std::abs(next.y) <= 1e-14);

  // v = w = 1 for 2 pi seconds traces the unit circle back to the start
  s = {0.0, 0.0, 0.0};
  const int steps = static_cast<int>(std::round(2.0 * M_PI / cfg.dt_control));
  world::UnicycleState cur = s;
  for (int i = 0; i < steps; ++i) cur = sim::step(cur, {1.0, 1.0}, cfg);
  // residual fraction of a period
  const double rem = 2.0 * M_PI - steps * cfg.dt_control;
  sim::SimConfig cfg_rem = cfg;
  cfg_rem.dt_control = rem;
  if (std::abs(rem) > 1e-15) cur = sim::step(cur, {1.0, 1.0}, cfg_rem);
  CHECK(std::abs(cur.x) <= 1e-6);
  CHECK(std::abs(cur.y) <= 1e-6);
}

TEST_CASE("discrete Frechet distance: identity, offset, brute force") {
  std::vector<Eigen::Vector2d> a, b;
  for (double x = 0.0; x <= 5.0; x += 0.5) {
    a.push_back({x, 0.0});
    b.push_back({x, 0.75});
  }
  CHECK(sim::frechet_distance(a, a) == doctest::Approx(0.0));
  CHECK(sim::frechet_distance(a, b) == doctest::Approx(0.75));
  CHECK(sim::frechet_distance(a, b) ==
        doctest::Approx(sim::frechet_distance(b, a)));

  auto gen = make_engine(17);
  std::uniform_int_distribution<int> len(2, 10);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (int i = 0; i < 60; ++i) {
    std::vector<Eigen::Vector2d> p(len(gen)), q(len(gen));
    for (auto& v : p) v = {coord(gen), coord(gen)};
    for (auto& v : q) v = {coord(gen), coord(gen)};
    CHECK(sim::frechet_distance(p, q) ==
          doctest::Approx(check::frechet_bruteforce(p, q)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sim::frechet_distance({}, a), std::invalid_argument);
}

TEST_CASE("free-space episode reaches the goal almost straight at v_max") {
  world::Scene scene;
  scene.name = "free";
  scene.bounds = {0, 10, 0, 6};
  scene.start = {0.5, 3.0, 0.0};
  scene.goal = {6.0, 3.0};
  for (double x = 0.5; x <= 6.0; x += 0.25) scene.path.push_back({x, 3.0});

  uncertainty::CorruptionSpec corr;
  corr.sigma = 0.0;
  corr.sigma_dyn = 0.0;
  auto models = uncertainty::synthetic_estimator(scene, corr, 0.177);
  auto clf = world::make_path_clf(scene.path);

  sim::EpisodeSetup setup;
  setup.scene = &scene;
  setup.kind = synthesis::ControllerKind::Qp;
  setup.models = &models;
  setup.clf = &clf;
  setup.params = paper_params();
  sim::SimConfig cfg;
  cfg.horizon = 1500;
  auto res = sim::run_episode(setup, cfg);
  CHECK(res.outcome.success);
  CHECK(!res.outcome.collision);
  CHECK(res.outcome.frechet <= 0.35);  // essentially straight tracking
  // cruises at the baseline speed most of the way
  double vmax_seen = 0.0;
  for (const auto& r : res.log.records) vmax_seen = std::max(vmax_seen, r.u(0));
  CHECK(vmax_seen == doctest::Approx(0.65).epsilon(1e-3));
  // log time stamps strictly increase
  for (std::size_t i = 1; i < res.log.records.size(); ++i)
    CHECK(res.log.records[i].t > res.log.records[i - 1].t);
}

TEST_CASE("trajectory log serializes to CSV with the documented header") {
  sim::TrajectoryLog log;
  sim::StepRecord r;
  r.t = 0.02;
  r.state = {1.0, 2.0, 0.3};
  r.u = {0.5, -0.1};
  log.records.push_back(r);
  const std::string csv = log.to_csv();
  CHECK(csv.find("t,x,y,mu,v,omega,delta,min_h_true,min_h_est,cbc_margin,"
                 "status,solve_time") == 0);
  CHECK(csv.find("Optimal") != std::string::npos);
  CHECK(log.to_json().find("\"u\"") != std::string::npos);
}

TEST_CASE("single-cell sweep matches a direct episode run") {
  sim::SweepSpec spec;
  spec.scenes = world::generate_environments(99, 1);
  spec.controllers = {{synthesis::ControllerKind::Robust, 0.0}};
  spec.noise_levels = {0.02};
  spec.seeds_per_cell = 1;
  spec.master_seed = 99;
  spec.sim.horizon = 300;
  spec.params = paper_params();
  auto res = sim::batch_sweep(spec);
  REQUIRE(res.cells.size() == 1);

  uncertainty::CorruptionSpec corr = spec.corruption;
  corr.sigma = 0.02;
  corr.seed = derive_seed(99, {0, 0, 0});
  auto models = uncertainty::synthetic_estimator(spec.scenes[0], corr, spec.rho);
  auto clf = world::make_path_clf(spec.scenes[0].path);
  sim::EpisodeSetup setup;
  setup.scene = &spec.scenes[0];
  setup.kind = synthesis::ControllerKind::Robust;
  setup.models = &models;
  setup.clf = &clf;
  setup.params = spec.params;
  auto direct = sim::run_episode(setup, spec.sim);
  CHECK(res.cells[0].outcome.steps == direct.outcome.steps);
  CHECK(res.cells[0].outcome.frechet ==
        doctest::Approx(direct.outcome.frechet));
  CHECK(res.cells[0].outcome.success == direct.outcome.success);
}

TEST_CASE("sweep repetition with the same seeds is bit-identical") {
  sim::SweepSpec spec;
  spec.scenes = world::generate_environments(123, 2);
  spec.controllers = {{synthesis::ControllerKind::Qp, 0.0},
                      {synthesis::ControllerKind::Probabilistic, 0.4}};
  spec.noise_levels = {0.02, 0.05};
  spec.seeds_per_cell = 2;
  spec.master_seed = 123;
  spec.sim.horizon = 120;
  spec.params = paper_params();
  spec.parallel = 3;
  auto r1 = sim::batch_sweep(spec);
  auto r2 = sim::batch_sweep(spec);
  CHECK(r1.success_table_csv() == r2.success_table_csv());
  CHECK(r1.frechet_table_csv(0) == r2.frechet_table_csv(0));
  CHECK(r1.frechet_table_csv(1) == r2.frechet_table_csv(1));
}

TEST_CASE("collision accounting: a blocked lane with a blind controller") {
  // one obstacle dead on the path; the estimator reports it far away, so
  // the QP controller drives into it and the log flags the collision
  world::Scene scene;
  scene.bounds = {0, 10, 0, 6};
  scene.start = {0.5, 3.0, 0.0};
  scene.goal = {9.0, 3.0};
  for (double x = 0.5; x <= 9.0; x += 0.25) scene.path.push_back({x, 3.0});
  scene.obstacles.push_back(world::Circle{{4.0, 3.0}, 0.4});

  uncertainty::CorruptionSpec corr;
  corr.sigma = 0.0;
  corr.sigma_dyn = 0.0;
  auto models = uncertainty::synthetic_estimator(scene, corr, 0.177);
  // blind the estimate
  for (auto& b : models.barriers) {
    b.mean = [](const Eigen::VectorXd&) { return 5.0; };
    b.grad_mean = [](const Eigen::VectorXd&) {
      return Eigen::VectorXd::Zero(3);
    };
  }
  auto clf = world::make_path_clf(scene.path);
  sim::EpisodeSetup setup;
  setup.scene = &scene;
  setup.kind = synthesis::ControllerKind::Qp;
  setup.models = &models;
  setup.clf = &clf;
  setup.params = paper_params();
  sim::SimConfig cfg;
  cfg.horizon = 1200;
  auto res = sim::run_episode(setup, cfg);
  CHECK(res.outcome.collision);
  CHECK(!res.outcome.success);
  CHECK(res.log.records.back().min_h_true < 0.0);
}
