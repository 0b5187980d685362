#pragma once

#include <Eigen/Core>
#include <string>
#include <variant>
#include <vector>

#include "socnav/world/unicycle.hpp"

namespace socnav::world {

/// Signed distance evaluation: negative inside, zero on the boundary,
/// unit gradient away from the medial axis.
struct SdfValue {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  bool degenerate = false;  // gradient fixed arbitrarily (e.g. circle center)
};

struct Circle {
  Eigen::Vector2d center;
  double radius;
};

/// Axis-aligned box with half extents, dilated by `round` (exact SDF).
struct RoundedBox {
  Eigen::Vector2d center;
  Eigen::Vector2d half;
  double round = 0.0;
};

using Obstacle = std::variant<Circle, RoundedBox>;

SdfValue sdf(const Circle& c, const Eigen::Vector2d& y);
SdfValue sdf(const RoundedBox& b, const Eigen::Vector2d& y);
SdfValue sdf(const Obstacle& o, const Eigen::Vector2d& y);

struct Bounds {
  double xmin = 0.0, xmax = 10.0, ymin = 0.0, ymax = 6.0;
};

struct Scene {
  std::string name;
  std::vector<Obstacle> obstacles;
  Bounds bounds;
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  std::vector<Eigen::Vector2d> path;  // reference path; may be empty
  UnicycleState start;

  /// min over obstacles, gradient from the argmin obstacle
  SdfValue sdf_union(const Eigen::Vector2d& y) const;
};

Scene scene_from_json(const std::string& text);
std::string scene_to_json(const Scene& s, int indent = 2);
Scene load_scene(const std::string& file_path);
void save_scene(const Scene& s, const std::string& file_path);

/// Per-obstacle barriers h_i(x) = sdf_i(position(x)) - rho, with rho the
/// robot radius.  State gradient is (grad sdf, 0).
struct BarrierSet {
  std::vector<Obstacle> obstacles;
  double rho = 0.0;

  std::size_t size() const { return obstacles.size(); }
  double value(std::size_t i, const Eigen::Vector3d& state) const;
  Eigen::Vector3d gradient(std::size_t i, const Eigen::Vector3d& state) const;
  double min_value(const Eigen::Vector3d& state) const;
};

BarrierSet assemble_barriers(const Scene& scene, double rho);

}  // namespace socnav::world
