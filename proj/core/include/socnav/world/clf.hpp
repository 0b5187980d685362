#pragma once

#include <vector>

#include "socnav/uncertainty/models.hpp"

namespace socnav::world {

/// Goal-seeking CLF: V = ||position - goal||^2, alpha_V(V) = 2V.
uncertainty::ClfSpec make_goal_clf(const Eigen::Vector2d& goal);

/// Path-following CLF built from a lookahead point: the progress variable
/// is the arc length of the closest-point projection advanced by
/// `lookahead`.  V combines squared distance to the lookahead point with a
/// heading-alignment term toward the path tangent there,
///   V = ||p - p_L||^2 + w (1 - cos(mu - theta_L)),
/// so both inputs of the unicycle enter the decrease condition.
uncertainty::ClfSpec make_path_clf(const std::vector<Eigen::Vector2d>& reference,
                                   double lookahead = 0.3,
                                   double heading_weight = 1.0);

/// Closest-point machinery shared by the CLF and the simulator metrics.
struct PathProjection {
  Eigen::Vector2d point;      // closest point q
  Eigen::Vector2d tangent;    // unit tangent of the segment owning q
  double arc = 0.0;           // arc length at q
  bool at_vertex = false;     // q is a polyline vertex (ds/dp = 0)
};

struct Polyline {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> cum_arc;  // cumulative arc length, size = points

  explicit Polyline(std::vector<Eigen::Vector2d> pts);
  double total_length() const { return cum_arc.back(); }
  PathProjection project(const Eigen::Vector2d& p) const;
  /// Point at arc length s (clamped); `clamped` reports saturation at the end.
  Eigen::Vector2d at_arc(double s, Eigen::Vector2d* tangent = nullptr,
                         bool* clamped = nullptr) const;
};

}  // namespace socnav::world
