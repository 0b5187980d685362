#include "socnav/sim/sweep.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "socnav/common/rng.hpp"
#include "socnav/world/clf.hpp"

namespace socnav::sim {

std::string ControllerSpec::label() const {
  if (kind == synthesis::ControllerKind::Probabilistic) {
    std::ostringstream os;
    os << "prob_" << risk_p;
    return os.str();
  }
  return synthesis::to_string(kind);
}

SweepResults batch_sweep(const SweepSpec& spec) {
  SweepResults res;
  res.spec_echo = spec;
  res.spec_echo.scenes.clear();

  struct Job {
    int scene, controller, noise, seed;
  };
  std::vector<Job> jobs;
  for (int s = 0; s < static_cast<int>(spec.scenes.size()); ++s)
    for (int c = 0; c < static_cast<int>(spec.controllers.size()); ++c)
      for (int n = 0; n < static_cast<int>(spec.noise_levels.size()); ++n)
        for (int r = 0; r < spec.seeds_per_cell; ++r)
          jobs.push_back({s, c, n, r});

  res.cells.resize(jobs.size());
  if (spec.keep_logs) res.logs.resize(jobs.size());

  // CLFs are scene-local and shared across jobs.
  std::vector<uncertainty::ClfSpec> clfs;
  clfs.reserve(spec.scenes.size());
  for (const auto& sc : spec.scenes) {
    if (!sc.path.empty())
      clfs.push_back(
          world::make_path_clf(sc.path, spec.lookahead, spec.heading_weight));
    else
      clfs.push_back(world::make_goal_clf(sc.goal));
  }

  auto run_job = [&](std::size_t j) {
    const Job job = jobs[j];
    const world::Scene& scene = spec.scenes[job.scene];

    uncertainty::CorruptionSpec corr = spec.corruption;
    corr.sigma = spec.noise_levels[job.noise];
    // Fields are paired across controllers: seed excludes the controller.
    corr.seed = derive_seed(spec.master_seed,
                            {static_cast<std::uint64_t>(job.scene),
                             static_cast<std::uint64_t>(job.noise),
                             static_cast<std::uint64_t>(job.seed)});
    const uncertainty::SyntheticModels models =
        uncertainty::synthetic_estimator(scene, corr, spec.rho, spec.alpha_h);

    EpisodeSetup setup;
    setup.scene = &scene;
    setup.kind = spec.controllers[job.controller].kind;
    setup.models = &models;
    setup.clf = &clfs[job.scene];
    setup.params = spec.params;
    setup.params.risk_p = spec.controllers[job.controller].risk_p;
    setup.rho = spec.rho;

    EpisodeResult er = run_episode(setup, spec.sim);
    res.cells[j] = {job.scene, job.controller, job.noise, job.seed,
                    er.outcome};
    if (spec.keep_logs) res.logs[j] = std::move(er.log);
  };

  const int workers = std::max(1, spec.parallel);
  if (workers == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t j = next.fetch_add(1); j < jobs.size();
             j = next.fetch_add(1))
          run_job(j);
      });
    for (auto& t : pool) t.join();
  }
  return res;
}

double SweepResults::success_rate(int controller, int noise) const {
  int total = 0, ok = 0;
  for (const auto& c : cells)
    if (c.controller == controller && c.noise == noise) {
      ++total;
      ok += c.outcome.success ? 1 : 0;
    }
  return total > 0 ? static_cast<double>(ok) / total : 0.0;
}

double SweepResults::success_rate(int scene, int controller, int noise) const {
  int total = 0, ok = 0;
  for (const auto& c : cells)
    if (c.scene == scene && c.controller == controller && c.noise == noise) {
      ++total;
      ok += c.outcome.success ? 1 : 0;
    }
  return total > 0 ? static_cast<double>(ok) / total : 0.0;
}

double SweepResults::mean_frechet(int scene, int controller, int noise) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& c : cells)
    if (c.scene == scene && c.controller == controller && c.noise == noise &&
        c.outcome.success) {
      sum += c.outcome.frechet;
      ++count;
    }
  return count > 0 ? sum / count
                   : std::numeric_limits<double>::quiet_NaN();
}

double SweepResults::mean_solve_time(int controller) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& c : cells)
    if (c.controller == controller && c.outcome.steps > 0) {
      sum += c.outcome.mean_solve_time;
      ++count;
    }
  return count > 0 ? sum / count : 0.0;
}

std::string SweepResults::success_table_csv() const {
  std::ostringstream os;
  os << "noise";
  for (const auto& c : spec_echo.controllers) os << ',' << c.label();
  os << '\n';
  os.precision(10);
  for (int n = 0; n < static_cast<int>(spec_echo.noise_levels.size()); ++n) {
    os << spec_echo.noise_levels[n];
    for (int c = 0; c < static_cast<int>(spec_echo.controllers.size()); ++c)
      os << ',' << success_rate(c, n);
    os << '\n';
  }
  return os.str();
}

std::string SweepResults::frechet_table_csv(int noise_index) const {
  std::ostringstream os;
  os << "env";
  for (const auto& c : spec_echo.controllers)
    os << ',' << c.label() << ',' << c.label() << "_success";
  os << '\n';
  os.precision(10);
  int n_scenes = 0;
  for (const auto& c : cells) n_scenes = std::max(n_scenes, c.scene + 1);
  for (int s = 0; s < n_scenes; ++s) {
    os << (s + 1);
    for (int c = 0; c < static_cast<int>(spec_echo.controllers.size()); ++c) {
      const double f = mean_frechet(s, c, noise_index);
      os << ',';
      if (std::isnan(f))
        os << "N/A";
      else
        os << f;
      os << ',' << success_rate(s, c, noise_index);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace socnav::sim
