#pragma once

#include <CLI11.hpp>
#include <cstdint>
#include <string>
#include <vector>

namespace socnav::tools {

/// The canonical experiment configuration.  Every numeric default is either
/// taken from the reference experiment setup (noted) or artifact-chosen.
struct CliConfig {
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  int parallel = 0;  // 0 = hardware concurrency
  bool debug_socp = false;

  std::string scene_file;
  int scene_index = 0;
  int scene_count = 10;  // ten environments in the headline sweep

  std::string controller = "robust";
  double risk = 0.8;
  std::vector<std::string> controllers = {"qp", "prob_0.2", "prob_0.4",
                                          "prob_0.8", "robust"};
  double noise = 0.02;                              // LiDAR-noise analog
  std::vector<double> noise_levels = {0.01, 0.02, 0.05};
  int seeds_per_cell = 10;

  double sigma_dyn = 0.005;    // artifact-chosen offline dynamics error scale
  double bound_factor = 3.89;  // 99.99% confidence factor

  double lambda = 1000.0;              // slack penalty
  std::vector<double> L = {0, 10, 3};  // diag of the effort weight
  double v_max = 0.65;                 // TurtleBot max linear velocity
  double omega_max = 2.0;              // artifact-chosen simulator bound
  double alpha_h = 1.0;                // alpha_h(h) = h

  double dt = 0.02;  // control period
  int substeps = 4;
  int horizon = 2000;
  double success_radius = 0.3;  // artifact-chosen goal region radius
  std::string fallback = "stop";
  double rho = 0.177;  // robot radius
  double lookahead = 0.3;
  double heading_weight = 1.0;
  std::string task = "path";

  std::string suite = "all";
  bool inject_cantelli_bug = false;
};

inline void add_common_options(CLI::App& app, CliConfig& cfg) {
  app.add_option("--out", cfg.out_dir, "Output directory");
  app.add_option("--seed", cfg.seed, "Master seed");
  app.add_option("--parallel", cfg.parallel, "Worker threads (0 = auto)");
  app.add_flag("--debug-socp", cfg.debug_socp, "Dump per-step SOCP JSON");
  app.add_option("--scene-file", cfg.scene_file, "Scene JSON file");
  app.add_option("--scene-index", cfg.scene_index, "Procedural scene index");
  app.add_option("--scene-count", cfg.scene_count, "Scenes in a sweep");
  app.add_option("--controller", cfg.controller,
                 "Controller: qp | prob_<p> | robust");
  app.add_option("--risk", cfg.risk, "Risk tolerance p in [0,1)");
  app.add_option("--controllers", cfg.controllers, "Sweep controller list");
  app.add_option("--noise", cfg.noise, "Corruption level sigma");
  app.add_option("--noise-levels", cfg.noise_levels, "Sweep sigma grid");
  app.add_option("--seeds-per-cell", cfg.seeds_per_cell, "Seeds per cell");
  app.add_option("--sigma-dyn", cfg.sigma_dyn, "Dynamics corruption level");
  app.add_option("--bound-factor", cfg.bound_factor,
                 "Error bound confidence factor");
  app.add_option("--lambda", cfg.lambda, "Slack penalty");
  app.add_option("--L", cfg.L, "Diagonal of the effort weight L")->expected(3);
  app.add_option("--v-max", cfg.v_max, "Max linear velocity");
  app.add_option("--omega-max", cfg.omega_max, "Max angular velocity");
  app.add_option("--alpha-h", cfg.alpha_h, "Barrier class-K slope");
  app.add_option("--dt", cfg.dt, "Control period");
  app.add_option("--substeps", cfg.substeps, "RK4 substeps per period");
  app.add_option("--horizon", cfg.horizon, "Max control steps");
  app.add_option("--success-radius", cfg.success_radius, "Goal region radius");
  app.add_option("--fallback", cfg.fallback,
                 "Infeasibility fallback: stop|hold|brake");
  app.add_option("--rho", cfg.rho, "Robot radius");
  app.add_option("--lookahead", cfg.lookahead, "Path CLF lookahead");
  app.add_option("--heading-weight", cfg.heading_weight,
                 "Path CLF heading term weight");
  app.add_option("--task", cfg.task, "run task: goal|path");
}

}  // namespace socnav::tools
