#include <benchmark/benchmark.h>

#include "socnav/check/oracles.hpp"
#include "socnav/common/rng.hpp"
#include "socnav/conic/solver.hpp"
#include "socnav/synthesis/builders.hpp"
#include "socnav/uncertainty/synthetic.hpp"
#include "socnav/world/clf.hpp"
#include "socnav/world/generator.hpp"

using namespace socnav;

namespace {

synthesis::ControllerParams bench_params() {
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

struct BenchWorld {
  world::Scene scene = world::generate_scene(7, 0);
  uncertainty::SyntheticModels models;
  uncertainty::ClfSpec clf;
  synthesis::ModelSet ms;
  Eigen::Vector3d x{2.0, 3.0, 0.4};

  BenchWorld() {
    uncertainty::CorruptionSpec corr;
    corr.sigma = 0.02;
    corr.seed = 7;
    models = uncertainty::synthetic_estimator(scene, corr, 0.177);
    clf = world::make_path_clf(scene.path);
    ms.dyn = &models.dynamics;
    ms.gp_barriers = &models.barriers;
    ms.worst_case = &models.worst_case;
  }
};

}  // namespace

static void BM_SolvePlanted(benchmark::State& state) {
  auto gen = make_engine(42);
  auto inst = check::make_planted_socp(gen, static_cast<int>(state.range(0)),
                                       static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto sol = conic::solve(inst.problem);
    benchmark::DoNotOptimize(sol.obj_value);
  }
}
BENCHMARK(BM_SolvePlanted)->Args({5, 2})->Args({15, 4})->Args({25, 8});

static void BM_DecideQp(benchmark::State& state) {
  BenchWorld w;
  auto params = bench_params();
  for (auto _ : state) {
    auto dec = synthesis::decide(synthesis::ControllerKind::Qp, w.x, w.ms,
                                 w.clf, params);
    benchmark::DoNotOptimize(dec.delta);
  }
}
BENCHMARK(BM_DecideQp);

static void BM_DecideProbabilistic(benchmark::State& state) {
  BenchWorld w;
  auto params = bench_params();
  params.risk_p = 0.8;
  for (auto _ : state) {
    auto dec = synthesis::decide(synthesis::ControllerKind::Probabilistic, w.x,
                                 w.ms, w.clf, params);
    benchmark::DoNotOptimize(dec.delta);
  }
}
BENCHMARK(BM_DecideProbabilistic);

static void BM_DecideRobust(benchmark::State& state) {
  BenchWorld w;
  auto params = bench_params();
  for (auto _ : state) {
    auto dec = synthesis::decide(synthesis::ControllerKind::Robust, w.x, w.ms,
                                 w.clf, params);
    benchmark::DoNotOptimize(dec.delta);
  }
}
BENCHMARK(BM_DecideRobust);

BENCHMARK_MAIN();
