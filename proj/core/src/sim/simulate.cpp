#include "socnav/sim/simulate.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "socnav/sim/frechet.hpp"
#include "socnav/world/unicycle.hpp"

namespace socnav::sim {

const char* to_string(Fallback f) {
  switch (f) {
    case Fallback::Stop: return "stop";
    case Fallback::HoldLast: return "hold_last";
    case Fallback::Brake: return "brake";
  }
  return "unknown";
}

std::vector<Eigen::Vector2d> TrajectoryLog::positions() const {
  std::vector<Eigen::Vector2d> p;
  p.reserve(records.size());
  for (const auto& r : records) p.push_back(r.state.position());
  return p;
}

std::string TrajectoryLog::to_csv() const {
  std::ostringstream os;
  os << "t,x,y,mu,v,omega,delta,min_h_true,min_h_est,cbc_margin,status,"
        "solve_time\n";
  os.precision(12);
  for (const auto& r : records) {
    os << r.t << ',' << r.state.x << ',' << r.state.y << ',' << r.state.mu
       << ',' << r.u(0) << ',' << r.u(1) << ',' << r.delta << ','
       << r.min_h_true << ',' << r.min_h_est << ',' << r.cbc_margin << ','
       << conic::to_string(r.status) << ',' << r.solve_time << '\n';
  }
  return os.str();
}

std::string TrajectoryLog::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : records) {
    j.push_back({{"t", r.t},
                 {"state", {r.state.x, r.state.y, r.state.mu}},
                 {"u", {r.u(0), r.u(1)}},
                 {"delta", r.delta},
                 {"min_h_true", r.min_h_true},
                 {"min_h_est", r.min_h_est},
                 {"cbc_margin", r.cbc_margin},
                 {"status", conic::to_string(r.status)},
                 {"solve_time", r.solve_time}});
  }
  return j.dump();
}

world::UnicycleState step(const world::UnicycleState& s,
                          const Eigen::Vector2d& u, const SimConfig& config) {
  const double h = config.dt_control / config.substeps;
  Eigen::Vector3d y = s.vec();
  auto f = [&u](const Eigen::Vector3d& v) {
    return world::dynamics_true(world::UnicycleState{v(0), v(1), v(2)}, u);
  };
  for (int i = 0; i < config.substeps; ++i) {
    const Eigen::Vector3d k1 = f(y);
    const Eigen::Vector3d k2 = f(y + 0.5 * h * k1);
    const Eigen::Vector3d k3 = f(y + 0.5 * h * k2);
    const Eigen::Vector3d k4 = f(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return world::UnicycleState::from_vec(y);
}

EpisodeResult run_episode(const EpisodeSetup& setup, const SimConfig& config) {
  EpisodeResult out;
  const world::Scene& scene = *setup.scene;
  const world::BarrierSet truth = world::assemble_barriers(scene, setup.rho);
  const Eigen::Vector2d target =
      scene.path.empty() ? scene.goal : scene.path.back();

  synthesis::ModelSet models;
  models.dyn = &setup.models->dynamics;
  models.gp_barriers = &setup.models->barriers;
  models.worst_case = &setup.models->worst_case;

  world::UnicycleState state = scene.start;
  Eigen::Vector2d u_last = Eigen::Vector2d::Zero();
  int consecutive_infeasible = 0;
  double solve_time_sum = 0.0;
  constexpr int kStallLimit = 100;

  for (int k = 0; k < config.horizon; ++k) {
    const Eigen::VectorXd x = state.vec();
    synthesis::ControlDecision dec = synthesis::decide(
        setup.kind, x, models, *setup.clf, setup.params, config.solver);
    solve_time_sum += dec.solve_time;

    Eigen::Vector2d u;
    if (dec.status == conic::SolveStatus::Optimal) {
      u = dec.u;
      consecutive_infeasible = 0;
    } else {
      ++consecutive_infeasible;
      switch (config.fallback) {
        case Fallback::Stop: u.setZero(); break;
        case Fallback::HoldLast: u = u_last; break;
        case Fallback::Brake: {
          const double v = u_last(0);
          const double dv = config.brake_decel * config.dt_control;
          u << (std::abs(v) <= dv ? 0.0 : v - std::copysign(dv, v)), 0.0;
          break;
        }
      }
    }
    u_last = u;

    StepRecord rec;
    rec.t = k * config.dt_control;
    rec.state = state;
    rec.u = u;
    rec.delta = dec.status == conic::SolveStatus::Optimal ? dec.delta : 0.0;
    rec.min_h_true = truth.min_value(x);
    double est = std::numeric_limits<double>::infinity();
    for (const auto& b : setup.models->barriers)
      est = std::min(est, b.mean(x));
    rec.min_h_est = est;
    rec.cbc_margin =
        dec.margins.empty()
            ? 0.0
            : *std::min_element(dec.margins.begin(), dec.margins.end());
    rec.status = dec.status;
    rec.solve_time = dec.solve_time;
    out.log.records.push_back(rec);

    if (rec.min_h_true < 0.0) {
      out.outcome.collision = true;
      break;
    }
    if ((state.position() - target).norm() <= config.success_radius) {
      out.outcome.success = true;
      break;
    }
    if (consecutive_infeasible >= kStallLimit) {
      out.outcome.infeasible_stall = true;
      break;
    }
    state = step(state, u, config);
  }

  out.outcome.steps = static_cast<int>(out.log.records.size());
  out.outcome.success = out.outcome.success && !out.outcome.collision;
  out.outcome.mean_solve_time =
      out.outcome.steps > 0 ? solve_time_sum / out.outcome.steps : 0.0;

  std::vector<Eigen::Vector2d> reference = scene.path;
  if (reference.empty()) reference = {scene.start.position(), scene.goal};
  const auto traj = out.log.positions();
  out.outcome.frechet =
      traj.empty() ? 0.0 : frechet_distance(traj, reference);
  return out;
}

}  // namespace socnav::sim
