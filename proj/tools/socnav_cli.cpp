#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <thread>

#include "cli_app.hpp"
#include "socnav/check/suites.hpp"
#include "socnav/common/rng.hpp"
#include "socnav/sim/sweep.hpp"
#include "socnav/world/clf.hpp"
#include "socnav/world/generator.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace socnav;
using socnav::tools::CliConfig;

namespace {

synthesis::ControllerParams make_params(const CliConfig& cfg) {
  synthesis::ControllerParams p;
  if (cfg.L.size() != 3) throw CLI::ValidationError("--L needs 3 entries");
  p.L = Eigen::Vector3d(cfg.L[0], cfg.L[1], cfg.L[2]).asDiagonal();
  const double vmax = cfg.v_max;
  p.k_baseline = [vmax](const Eigen::VectorXd&) {
    return Eigen::Vector3d(1.0, vmax, 0.0);
  };
  p.lambda = cfg.lambda;
  p.risk_p = cfg.risk;
  p.u_max = Eigen::Vector2d(cfg.v_max, cfg.omega_max);
  p.u_min = Eigen::Vector2d(-cfg.v_max, -cfg.omega_max);
  return p;
}

sim::SimConfig make_sim_config(const CliConfig& cfg) {
  sim::SimConfig sc;
  sc.dt_control = cfg.dt;
  sc.substeps = cfg.substeps;
  sc.horizon = cfg.horizon;
  sc.success_radius = cfg.success_radius;
  if (cfg.fallback == "stop")
    sc.fallback = sim::Fallback::Stop;
  else if (cfg.fallback == "hold")
    sc.fallback = sim::Fallback::HoldLast;
  else if (cfg.fallback == "brake")
    sc.fallback = sim::Fallback::Brake;
  else
    throw CLI::ValidationError("--fallback must be stop|hold|brake");
  return sc;
}

world::Scene resolve_scene(const CliConfig& cfg) {
  if (!cfg.scene_file.empty()) {
    if (!fs::exists(cfg.scene_file))
      throw CLI::ValidationError("scene file not found: " + cfg.scene_file);
    return world::load_scene(cfg.scene_file);
  }
  return world::generate_scene(cfg.seed, cfg.scene_index);
}

sim::ControllerSpec parse_controller(const std::string& name) {
  if (name == "qp") return {synthesis::ControllerKind::Qp, 0.0};
  if (name == "robust") return {synthesis::ControllerKind::Robust, 0.0};
  if (name.rfind("prob_", 0) == 0)
    return {synthesis::ControllerKind::Probabilistic,
            std::stod(name.substr(5))};
  if (name == "prob") return {synthesis::ControllerKind::Probabilistic, 0.8};
  throw CLI::ValidationError("unknown controller: " + name);
}

int cmd_run(const CliConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  const world::Scene scene = resolve_scene(cfg);

  uncertainty::CorruptionSpec corr;
  corr.sigma = cfg.noise;
  corr.sigma_dyn = cfg.sigma_dyn;
  corr.bound_factor = cfg.bound_factor;
  corr.seed = derive_seed(cfg.seed, {0xEE});
  const auto models =
      uncertainty::synthetic_estimator(scene, corr, cfg.rho, cfg.alpha_h);

  uncertainty::ClfSpec clf;
  if (cfg.task == "goal" || scene.path.empty())
    clf = world::make_goal_clf(scene.goal);
  else if (cfg.task == "path")
    clf = world::make_path_clf(scene.path, cfg.lookahead, cfg.heading_weight);
  else
    throw CLI::ValidationError("--task must be goal|path");

  const sim::ControllerSpec ctrl = parse_controller(cfg.controller);
  sim::EpisodeSetup setup;
  setup.scene = &scene;
  setup.kind = ctrl.kind;
  setup.models = &models;
  setup.clf = &clf;
  setup.params = make_params(cfg);
  setup.params.risk_p =
      ctrl.kind == synthesis::ControllerKind::Probabilistic ? ctrl.risk_p
                                                            : cfg.risk;
  setup.rho = cfg.rho;

  const sim::SimConfig sc = make_sim_config(cfg);
  const sim::EpisodeResult res = sim::run_episode(setup, sc);

  tools::write_file(cfg.out_dir + "/trajectory.csv", res.log.to_csv());
  tools::write_file(cfg.out_dir + "/trajectory.json", res.log.to_json());
  tools::write_file(cfg.out_dir + "/scene.json", world::scene_to_json(scene));
  tools::write_file(
      cfg.out_dir + "/plot.svg",
      tools::scene_svg(scene, res.log.positions(), cfg.success_radius));

  json outcome;
  outcome["success"] = res.outcome.success;
  outcome["collision"] = res.outcome.collision;
  outcome["infeasible_stall"] = res.outcome.infeasible_stall;
  outcome["frechet"] = res.outcome.frechet;
  outcome["steps"] = res.outcome.steps;
  outcome["mean_solve_time"] = res.outcome.mean_solve_time;
  outcome["controller"] = cfg.controller;
  outcome["noise"] = cfg.noise;
  outcome["seed"] = cfg.seed;
  tools::write_file(cfg.out_dir + "/outcome.json", outcome.dump(2));

  if (cfg.debug_socp) {
    synthesis::ModelSet ms;
    ms.dyn = &models.dynamics;
    ms.gp_barriers = &models.barriers;
    ms.worst_case = &models.worst_case;
    std::ofstream dump(cfg.out_dir + "/socp_dumps.jsonl");
    for (std::size_t k = 0; k < res.log.records.size(); ++k) {
      const Eigen::VectorXd x = res.log.records[k].state.vec();
      conic::SocpProblem prob;
      switch (setup.kind) {
        case synthesis::ControllerKind::Qp:
          prob = synthesis::build_qp_socp(x, models.dynamics, models.barriers,
                                          clf, setup.params);
          break;
        case synthesis::ControllerKind::Probabilistic:
          prob = synthesis::build_prob_socp(x, models.dynamics,
                                            models.barriers, clf, setup.params);
          break;
        case synthesis::ControllerKind::Robust:
          prob = synthesis::build_robust_socp(x, models.worst_case, clf,
                                              setup.params);
          break;
      }
      json line = json::parse(conic::to_json(prob, -1));
      line["step"] = k;
      dump << line.dump() << "\n";
    }
  }

  std::cout << (res.outcome.success ? "success" : "failure")
            << " steps=" << res.outcome.steps
            << " frechet=" << res.outcome.frechet
            << " mean_solve_time=" << res.outcome.mean_solve_time << "\n";
  return res.outcome.success || !res.outcome.collision ? 0 : 1;
}

int cmd_sweep(const CliConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  sim::SweepSpec spec;
  if (!cfg.scene_file.empty())
    spec.scenes = {resolve_scene(cfg)};
  else
    spec.scenes = world::generate_environments(cfg.seed, cfg.scene_count);
  for (const auto& name : cfg.controllers)
    spec.controllers.push_back(parse_controller(name));
  spec.noise_levels = cfg.noise_levels;
  spec.seeds_per_cell = cfg.seeds_per_cell;
  spec.master_seed = cfg.seed;
  spec.sim = make_sim_config(cfg);
  spec.params = make_params(cfg);
  spec.corruption.sigma_dyn = cfg.sigma_dyn;
  spec.corruption.bound_factor = cfg.bound_factor;
  spec.rho = cfg.rho;
  spec.alpha_h = cfg.alpha_h;
  spec.lookahead = cfg.lookahead;
  spec.heading_weight = cfg.heading_weight;
  spec.parallel = cfg.parallel > 0
                      ? cfg.parallel
                      : static_cast<int>(std::thread::hardware_concurrency());

  const sim::SweepResults res = sim::batch_sweep(spec);

  fs::create_directories(cfg.out_dir + "/scenes");
  for (std::size_t i = 0; i < spec.scenes.size(); ++i)
    world::save_scene(spec.scenes[i],
                      cfg.out_dir + "/scenes/" + spec.scenes[i].name + ".json");

  tools::write_file(cfg.out_dir + "/success_rates.csv",
                    res.success_table_csv());
  for (std::size_t n = 0; n < cfg.noise_levels.size(); ++n) {
    std::ostringstream name;
    name << cfg.out_dir << "/frechet_sigma_" << cfg.noise_levels[n] << ".csv";
    tools::write_file(name.str(), res.frechet_table_csv(static_cast<int>(n)));
  }
  {
    std::ostringstream os;
    os << "scene,controller,noise,seed,success,collision,infeasible_stall,"
          "frechet,steps,mean_solve_time\n";
    os.precision(10);
    for (const auto& c : res.cells)
      os << c.scene << ',' << spec.controllers[c.controller].label() << ','
         << spec.noise_levels[c.noise] << ',' << c.seed << ','
         << c.outcome.success << ',' << c.outcome.collision << ','
         << c.outcome.infeasible_stall << ',' << c.outcome.frechet << ','
         << c.outcome.steps << ',' << c.outcome.mean_solve_time << '\n';
    tools::write_file(cfg.out_dir + "/sweep_cells.csv", os.str());
  }
  json summary;
  for (std::size_t c = 0; c < spec.controllers.size(); ++c) {
    json jc;
    jc["label"] = spec.controllers[c].label();
    jc["mean_solve_time"] = res.mean_solve_time(static_cast<int>(c));
    for (std::size_t n = 0; n < cfg.noise_levels.size(); ++n)
      jc["success_rate"][std::to_string(cfg.noise_levels[n])] =
          res.success_rate(static_cast<int>(c), static_cast<int>(n));
    summary["controllers"].push_back(jc);
  }
  tools::write_file(cfg.out_dir + "/summary.json", summary.dump(2));
  std::cout << res.success_table_csv();
  return 0;
}

int cmd_verify(const CliConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  check::SuiteOptions opts;
  opts.seed = cfg.seed;
  opts.inject_cantelli_bug = cfg.inject_cantelli_bug;
  const auto results = check::run_suites(
      cfg.suite == "all" ? std::string() : cfg.suite, opts);
  if (results.empty()) {
    std::cerr << "no checks match selector '" << cfg.suite << "'\n";
    return 2;
  }
  json report = json::array();
  int failures = 0;
  for (const auto& r : results) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << "\n";
    json jr;
    jr["name"] = r.name;
    jr["passed"] = r.passed;
    jr["stats"] = json::parse(r.stats);
    report.push_back(jr);
    failures += r.passed ? 0 : 1;
  }
  tools::write_file(cfg.out_dir + "/verify_report.json", report.dump(2));
  std::cout << (failures == 0 ? "all checks passed"
                              : std::to_string(failures) + " check(s) failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_dump_scene(const CliConfig& cfg, const std::string& out_file) {
  const world::Scene scene = resolve_scene(cfg);
  const std::string text = world::scene_to_json(scene);
  if (out_file.empty())
    std::cout << text << "\n";
  else
    tools::write_file(out_file, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CLF-CBF second-order cone controller synthesis and "
               "closed-loop navigation experiments"};
  app.set_config("--config", "", "Config file (TOML-style key = value)");

  CliConfig cfg;
  tools::add_common_options(app, cfg);

  auto* run = app.add_subcommand("run", "Run one closed-loop episode");
  auto* sweep = app.add_subcommand(
      "sweep", "Run the scenes x controllers x noise x seeds grid");
  auto* verify = app.add_subcommand("verify", "Run the verification suites");
  verify->add_option("--suite", cfg.suite,
                     "Selector prefix (e.g. conic, synthesis.cantelli)");
  verify->add_flag("--inject-cantelli-bug", cfg.inject_cantelli_bug,
                   "Mutation sanity mode: flips c(p) to p/(1-p)");
  std::string dump_out;
  auto* dump = app.add_subcommand("dump-scene", "Write a scene as JSON");
  dump->add_option("--to", dump_out, "Output file (default stdout)");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (dump->parsed()) return cmd_dump_scene(cfg, dump_out);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
