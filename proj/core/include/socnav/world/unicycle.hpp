#pragma once

#include <Eigen/Core>

namespace socnav::world {

/// Planar unicycle: state (x, y, mu) with heading wrapped to [-pi, pi),
/// input u = (v, omega).
struct UnicycleState {
  double x = 0.0;
  double y = 0.0;
  double mu = 0.0;

  Eigen::Vector2d position() const { return {x, y}; }
  Eigen::Vector3d vec() const { return {x, y, mu}; }
  static UnicycleState from_vec(const Eigen::Vector3d& v);
};

double wrap_angle(double a);

/// xdot = (v cos mu, v sin mu, omega)
Eigen::Vector3d dynamics_true(const UnicycleState& s, const Eigen::Vector2d& u);

/// Control-affine form xdot = F(x) [1; u] with F = [f g], f = 0,
/// g = [[cos mu, 0], [sin mu, 0], [0, 1]].
Eigen::Matrix3d dynamics_matrix(const UnicycleState& s);
Eigen::Matrix3d dynamics_matrix(const Eigen::Vector3d& state);

}  // namespace socnav::world
