#include "socnav/world/unicycle.hpp"

#include <cmath>

namespace socnav::world {

UnicycleState UnicycleState::from_vec(const Eigen::Vector3d& v) {
  return {v(0), v(1), wrap_angle(v(2))};
}

double wrap_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  double w = std::fmod(a + M_PI, two_pi);
  if (w < 0.0) w += two_pi;
  return w - M_PI;
}

Eigen::Vector3d dynamics_true(const UnicycleState& s, const Eigen::Vector2d& u) {
  return {u(0) * std::cos(s.mu), u(0) * std::sin(s.mu), u(1)};
}

Eigen::Matrix3d dynamics_matrix(const UnicycleState& s) {
  Eigen::Matrix3d F = Eigen::Matrix3d::Zero();
  F(0, 1) = std::cos(s.mu);
  F(1, 1) = std::sin(s.mu);
  F(2, 2) = 1.0;
  return F;
}

Eigen::Matrix3d dynamics_matrix(const Eigen::Vector3d& state) {
  return dynamics_matrix(UnicycleState{state(0), state(1), state(2)});
}

}  // namespace socnav::world
