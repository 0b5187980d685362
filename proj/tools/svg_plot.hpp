#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "socnav/world/scene.hpp"

namespace socnav::tools {

/// Static SVG overlay of a scene: obstacles, reference path, executed
/// trajectory, start marker and goal disk.
inline std::string scene_svg(const world::Scene& scene,
                             const std::vector<Eigen::Vector2d>& trajectory,
                             double goal_radius) {
  const auto& bb = scene.bounds;
  const double scale = 80.0;
  const double w = (bb.xmax - bb.xmin) * scale;
  const double h = (bb.ymax - bb.ymin) * scale;
  auto X = [&](double x) { return (x - bb.xmin) * scale; };
  auto Y = [&](double y) { return h - (y - bb.ymin) * scale; };

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
     << h << "' viewBox='0 0 " << w << " " << h << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";

  os << "<circle cx='" << X(scene.goal(0)) << "' cy='" << Y(scene.goal(1))
     << "' r='" << goal_radius * scale
     << "' fill='#b8f0b8' stroke='none'/>\n";

  for (const auto& o : scene.obstacles) {
    if (const auto* c = std::get_if<world::Circle>(&o)) {
      os << "<circle cx='" << X(c->center(0)) << "' cy='" << Y(c->center(1))
         << "' r='" << c->radius * scale
         << "' fill='#444' stroke='black'/>\n";
    } else {
      const auto& b = std::get<world::RoundedBox>(o);
      const double bw = 2.0 * (b.half(0) + b.round) * scale;
      const double bh = 2.0 * (b.half(1) + b.round) * scale;
      os << "<rect x='" << X(b.center(0) - b.half(0) - b.round) << "' y='"
         << Y(b.center(1) + b.half(1) + b.round) << "' width='" << bw
         << "' height='" << bh << "' rx='" << b.round * scale
         << "' fill='#444' stroke='black'/>\n";
    }
  }

  auto polyline = [&](const std::vector<Eigen::Vector2d>& pts,
                      const std::string& color, double width) {
    if (pts.size() < 2) return;
    os << "<polyline fill='none' stroke='" << color << "' stroke-width='"
       << width << "' points='";
    for (const auto& p : pts) os << X(p(0)) << "," << Y(p(1)) << " ";
    os << "'/>\n";
  };
  polyline(scene.path, "#3366cc", 2.0);
  polyline(trajectory, "#cc2222", 2.5);

  os << "<circle cx='" << X(scene.start.x) << "' cy='" << Y(scene.start.y)
     << "' r='6' fill='#00cccc'/>\n";
  os << "</svg>\n";
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace socnav::tools
