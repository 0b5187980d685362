#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "socnav/sim/simulate.hpp"

namespace socnav::sim {

struct ControllerSpec {
  synthesis::ControllerKind kind = synthesis::ControllerKind::Qp;
  double risk_p = 0.0;  // probabilistic controllers only
  std::string label() const;
};

/// Grid specification; one episode per (scene, controller, noise, seed).
/// The corruption fields are paired: they depend on (scene, noise, seed)
/// but not on the controller, so controller comparisons share realizations.
struct SweepSpec {
  std::vector<world::Scene> scenes;
  std::vector<ControllerSpec> controllers;
  std::vector<double> noise_levels;
  int seeds_per_cell = 10;
  std::uint64_t master_seed = 0;
  SimConfig sim;
  synthesis::ControllerParams params;
  uncertainty::CorruptionSpec corruption;  // sigma overridden per noise level
  double rho = 0.177;
  double alpha_h = 1.0;  // linear class-K slope of the barrier condition
  double lookahead = 0.3;
  double heading_weight = 1.0;
  int parallel = 1;
  bool keep_logs = false;
};

struct SweepCellOutcome {
  int scene = 0, controller = 0, noise = 0, seed = 0;
  RunOutcome outcome;
};

struct SweepResults {
  SweepSpec spec_echo;  // scenes omitted
  std::vector<SweepCellOutcome> cells;
  std::vector<TrajectoryLog> logs;  // parallel to cells when keep_logs

  double success_rate(int controller, int noise) const;
  double success_rate(int scene, int controller, int noise) const;
  /// Mean Frechet over successful runs; NaN when none succeeded.
  double mean_frechet(int scene, int controller, int noise) const;
  double mean_solve_time(int controller) const;

  /// Success-rate table: one row per noise level, one column per controller.
  std::string success_table_csv() const;
  /// Frechet table at one noise level: one row per scene, per-controller
  /// mean over successful runs with the success rate in a second column.
  std::string frechet_table_csv(int noise_index) const;
};

SweepResults batch_sweep(const SweepSpec& spec);

}  // namespace socnav::sim
