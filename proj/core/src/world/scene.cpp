#include "socnav/world/scene.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace socnav::world {

SdfValue sdf(const Circle& c, const Eigen::Vector2d& y) {
  SdfValue out;
  const Eigen::Vector2d d = y - c.center;
  const double r = d.norm();
  out.value = r - c.radius;
  if (r > 1e-12) {
    out.gradient = d / r;
  } else {
    out.gradient = Eigen::Vector2d(1.0, 0.0);
    out.degenerate = true;
  }
  return out;
}

SdfValue sdf(const RoundedBox& b, const Eigen::Vector2d& y) {
  SdfValue out;
  const Eigen::Vector2d d = y - b.center;
  const Eigen::Vector2d q = d.cwiseAbs() - b.half;
  const Eigen::Vector2d sgn(d(0) >= 0.0 ? 1.0 : -1.0, d(1) >= 0.0 ? 1.0 : -1.0);
  if (q(0) <= 0.0 && q(1) <= 0.0) {
    // interior of the core box: distance to the nearest face
    int k = q(0) >= q(1) ? 0 : 1;
    out.value = q(k) - b.round;
    out.gradient = Eigen::Vector2d::Zero();
    out.gradient(k) = sgn(k);
    if (std::abs(q(0) - q(1)) < 1e-12) out.degenerate = true;
  } else {
    const Eigen::Vector2d outer = q.cwiseMax(0.0);
    const double n = outer.norm();
    out.value = n - b.round;
    out.gradient = Eigen::Vector2d(sgn(0) * outer(0), sgn(1) * outer(1)) / n;
  }
  return out;
}

SdfValue sdf(const Obstacle& o, const Eigen::Vector2d& y) {
  return std::visit([&](const auto& shape) { return sdf(shape, y); }, o);
}

SdfValue Scene::sdf_union(const Eigen::Vector2d& y) const {
  SdfValue best;
  best.value = std::numeric_limits<double>::infinity();
  for (const auto& o : obstacles) {
    SdfValue v = sdf(o, y);
    if (v.value < best.value) best = v;
  }
  return best;
}

namespace {

nlohmann::json obstacle_to_json(const Obstacle& o) {
  nlohmann::json j;
  if (const auto* c = std::get_if<Circle>(&o)) {
    j["type"] = "circle";
    j["center"] = {c->center(0), c->center(1)};
    j["radius"] = c->radius;
  } else {
    const auto& b = std::get<RoundedBox>(o);
    j["type"] = "box";
    j["center"] = {b.center(0), b.center(1)};
    j["half"] = {b.half(0), b.half(1)};
    j["round"] = b.round;
  }
  return j;
}

Obstacle obstacle_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type");
  if (type == "circle") {
    Circle c;
    c.center = Eigen::Vector2d(j.at("center")[0].get<double>(),
                               j.at("center")[1].get<double>());
    c.radius = j.at("radius");
    if (c.radius <= 0.0) throw std::invalid_argument("circle radius must be > 0");
    return c;
  }
  if (type == "box") {
    RoundedBox b;
    b.center = Eigen::Vector2d(j.at("center")[0].get<double>(),
                               j.at("center")[1].get<double>());
    b.half = Eigen::Vector2d(j.at("half")[0].get<double>(),
                             j.at("half")[1].get<double>());
    b.round = j.value("round", 0.0);
    if (b.half.minCoeff() <= 0.0 || b.round < 0.0)
      throw std::invalid_argument("box extents must be positive");
    return b;
  }
  throw std::invalid_argument("unknown obstacle type: " + type);
}

}  // namespace

Scene scene_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Scene s;
  s.name = j.value("name", "scene");
  for (const auto& jo : j.value("obstacles", nlohmann::json::array()))
    s.obstacles.push_back(obstacle_from_json(jo));
  if (j.contains("bounds")) {
    const auto& jb = j["bounds"];
    s.bounds = {jb.at("xmin"), jb.at("xmax"), jb.at("ymin"), jb.at("ymax")};
  }
  if (j.contains("goal"))
    s.goal = Eigen::Vector2d(j["goal"][0].get<double>(), j["goal"][1].get<double>());
  for (const auto& jp : j.value("path", nlohmann::json::array()))
    s.path.push_back(Eigen::Vector2d(jp[0].get<double>(), jp[1].get<double>()));
  if (j.contains("start")) {
    const auto& js = j["start"];
    s.start = {js[0].get<double>(), js[1].get<double>(),
               wrap_angle(js[2].get<double>())};
  }
  return s;
}

std::string scene_to_json(const Scene& s, int indent) {
  nlohmann::json j;
  j["name"] = s.name;
  j["bounds"] = {{"xmin", s.bounds.xmin},
                 {"xmax", s.bounds.xmax},
                 {"ymin", s.bounds.ymin},
                 {"ymax", s.bounds.ymax}};
  j["obstacles"] = nlohmann::json::array();
  for (const auto& o : s.obstacles) j["obstacles"].push_back(obstacle_to_json(o));
  j["goal"] = {s.goal(0), s.goal(1)};
  j["path"] = nlohmann::json::array();
  for (const auto& p : s.path) j["path"].push_back({p(0), p(1)});
  j["start"] = {s.start.x, s.start.y, s.start.mu};
  return j.dump(indent);
}

Scene load_scene(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) throw std::runtime_error("cannot open scene file: " + file_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return scene_from_json(buf.str());
}

void save_scene(const Scene& s, const std::string& file_path) {
  std::ofstream out(file_path);
  if (!out) throw std::runtime_error("cannot write scene file: " + file_path);
  out << scene_to_json(s) << "\n";
}

double BarrierSet::value(std::size_t i, const Eigen::Vector3d& state) const {
  return sdf(obstacles[i], state.head<2>()).value - rho;
}

Eigen::Vector3d BarrierSet::gradient(std::size_t i,
                                     const Eigen::Vector3d& state) const {
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  g.head<2>() = sdf(obstacles[i], state.head<2>()).gradient;
  return g;
}

double BarrierSet::min_value(const Eigen::Vector3d& state) const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < obstacles.size(); ++i)
    m = std::min(m, value(i, state));
  return m;
}

BarrierSet assemble_barriers(const Scene& scene, double rho) {
  if (rho < 0.0) throw std::invalid_argument("robot radius must be >= 0");
  return BarrierSet{scene.obstacles, rho};
}

}  // namespace socnav::world
