#include "socnav/world/generator.hpp"

#include <cmath>
#include <random>

#include "socnav/common/rng.hpp"
#include "socnav/world/clf.hpp"

namespace socnav::world {
namespace {

double min_distance_to_polyline(const Polyline& line, const Eigen::Vector2d& p) {
  return (line.project(p).point - p).norm();
}

}  // namespace

Scene generate_scene(std::uint64_t master_seed, int index,
                     const GeneratorParams& gp) {
  auto gen = make_engine(derive_seed(master_seed, {0x5CE4E, static_cast<std::uint64_t>(index)}));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * u01(gen); };

  Scene s;
  s.name = "env" + std::string(index + 1 < 10 ? "0" : "") + std::to_string(index + 1);
  s.bounds = {0.0, 10.0, 0.0, 6.0};

  // Reference path: a sine lane across the workspace.
  const double y0 = uni(2.4, 3.6);
  const double amp = uni(0.5, 1.1);
  const double period = uni(5.0, 9.0);
  const double phase = uni(0.0, 2.0 * M_PI);
  for (double x = 0.5; x <= 9.5 + 1e-9; x += 0.25) {
    const double y = y0 + amp * std::sin(2.0 * M_PI * x / period + phase);
    s.path.push_back({x, y});
  }
  Polyline line(s.path);
  const double total = line.total_length();

  const Eigen::Vector2d p_start = s.path.front();
  const Eigen::Vector2d p_end = s.path.back();
  Eigen::Vector2d tan0 = (s.path[1] - s.path[0]).normalized();
  s.start = {p_start(0), p_start(1), std::atan2(tan0(1), tan0(0))};
  s.goal = p_end;

  std::vector<double> radii;
  auto admissible = [&](const Eigen::Vector2d& c, double r) {
    if (c(0) < s.bounds.xmin + r || c(0) > s.bounds.xmax - r ||
        c(1) < s.bounds.ymin + r || c(1) > s.bounds.ymax - r)
      return false;
    if ((c - p_start).norm() < r + gp.rho + gp.keepout_endpoints) return false;
    if ((c - p_end).norm() < r + gp.rho + gp.keepout_endpoints) return false;
    for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
      const auto& prev = std::get<Circle>(s.obstacles[i]);
      const double need =
          r + prev.radius + 2.0 * gp.rho + gp.min_separation;
      if ((c - prev.center).norm() < need) return false;
    }
    return true;
  };

  auto place = [&](double arc_frac, double offset, double r) {
    Eigen::Vector2d tan;
    const Eigen::Vector2d q = line.at_arc(arc_frac * total, &tan);
    const Eigen::Vector2d normal(-tan(1), tan(0));
    const Eigen::Vector2d c = q + offset * normal;
    if (!admissible(c, r)) return false;
    s.obstacles.push_back(Circle{c, r});
    radii.push_back(r);
    return true;
  };

  const int n_block = gp.blocking_min +
                      static_cast<int>(u01(gen) * (gp.blocking_max - gp.blocking_min + 1));
  double side = u01(gen) < 0.5 ? 1.0 : -1.0;
  int placed = 0;
  for (int tries = 0; placed < n_block && tries < 80; ++tries) {
    const double r = uni(gp.radius_min, gp.radius_max);
    const double overlap = uni(gp.overlap_min, gp.overlap_max);
    const double frac = uni(0.18, 0.82);
    if (place(frac, side * (r + gp.rho - overlap), r)) {
      ++placed;
      side = -side;  // alternate so a passable side always exists
    }
  }

  const int n_skim =
      gp.skim_min + static_cast<int>(u01(gen) * (gp.skim_max - gp.skim_min + 1));
  placed = 0;
  for (int tries = 0; placed < n_skim && tries < 80; ++tries) {
    const double r = uni(gp.radius_min, gp.radius_max);
    const double clearance = uni(gp.clearance_min, gp.clearance_max);
    const double frac = uni(0.15, 0.85);
    const double sgn = u01(gen) < 0.5 ? 1.0 : -1.0;
    if (place(frac, sgn * (r + gp.rho + clearance), r)) ++placed;
  }

  // One decorative rounded box away from the lane.
  for (int tries = 0; tries < 40; ++tries) {
    const Eigen::Vector2d c(uni(1.5, 8.5), uni(0.6, 5.4));
    const Eigen::Vector2d half(uni(0.25, 0.45), uni(0.2, 0.35));
    const double reach = half.norm() + 0.05;
    if (min_distance_to_polyline(line, c) < reach + gp.rho + 0.8) continue;
    bool clash = false;
    for (const auto& o : s.obstacles) {
      const auto& prev = std::get<Circle>(o);
      if ((c - prev.center).norm() < reach + prev.radius + 2.0 * gp.rho + 0.4)
        clash = true;
    }
    if ((c - p_start).norm() < reach + gp.rho + gp.keepout_endpoints) clash = true;
    if ((c - p_end).norm() < reach + gp.rho + gp.keepout_endpoints) clash = true;
    if (clash) continue;
    s.obstacles.push_back(RoundedBox{c, half, 0.05});
    break;
  }

  return s;
}

std::vector<Scene> generate_environments(std::uint64_t master_seed, int count,
                                         const GeneratorParams& params) {
  std::vector<Scene> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back(generate_scene(master_seed, i, params));
  return out;
}

}  // namespace socnav::world
