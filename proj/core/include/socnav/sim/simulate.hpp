#pragma once

#include <string>
#include <vector>

#include "socnav/synthesis/builders.hpp"
#include "socnav/uncertainty/synthetic.hpp"
#include "socnav/world/scene.hpp"

namespace socnav::sim {

enum class Fallback { Stop, HoldLast, Brake };
const char* to_string(Fallback f);

struct SimConfig {
  double dt_control = 0.02;  // zero-order hold period
  int substeps = 4;          // RK4 substeps per control period
  int horizon = 2000;        // max control steps
  double success_radius = 0.3;
  Fallback fallback = Fallback::Stop;
  double brake_decel = 3.0;  // m/s^2, Brake fallback only
  conic::SolverSettings solver;
};

struct StepRecord {
  double t = 0.0;
  world::UnicycleState state;
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
  double delta = 0.0;
  double min_h_true = 0.0;
  double min_h_est = 0.0;
  double cbc_margin = 0.0;
  conic::SolveStatus status = conic::SolveStatus::Optimal;
  double solve_time = 0.0;
};

struct TrajectoryLog {
  std::vector<StepRecord> records;

  std::vector<Eigen::Vector2d> positions() const;
  std::string to_csv() const;
  std::string to_json() const;
};

struct RunOutcome {
  bool success = false;
  bool collision = false;
  bool infeasible_stall = false;
  double frechet = 0.0;
  int steps = 0;
  double mean_solve_time = 0.0;
};

/// Advance one control period: zero-order hold on u, RK4 on the true
/// unicycle dynamics, heading wrapped.
world::UnicycleState step(const world::UnicycleState& s,
                          const Eigen::Vector2d& u, const SimConfig& config);

struct EpisodeSetup {
  const world::Scene* scene = nullptr;
  synthesis::ControllerKind kind = synthesis::ControllerKind::Qp;
  const uncertainty::SyntheticModels* models = nullptr;
  const uncertainty::ClfSpec* clf = nullptr;
  synthesis::ControllerParams params;
  double rho = 0.177;
};

struct EpisodeResult {
  TrajectoryLog log;
  RunOutcome outcome;
};

/// Closed-loop run; terminates on goal reach, collision (true min_h < 0),
/// horizon, or a sustained run of infeasible steps.  Collision is judged on
/// the ground-truth barriers, success on reaching the target region.
EpisodeResult run_episode(const EpisodeSetup& setup, const SimConfig& config);

}  // namespace socnav::sim
