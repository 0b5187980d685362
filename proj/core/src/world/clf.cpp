#include "socnav/world/clf.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "socnav/world/unicycle.hpp"

namespace socnav::world {

uncertainty::ClfSpec make_goal_clf(const Eigen::Vector2d& goal) {
  uncertainty::ClfSpec clf;
  clf.alpha_slope = 2.0;
  clf.V = [goal](const Eigen::VectorXd& x) {
    return (x.head<2>() - goal).squaredNorm();
  };
  clf.grad_V = [goal](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
    g.head<2>() = 2.0 * (x.head<2>() - goal);
    return g;
  };
  return clf;
}

Polyline::Polyline(std::vector<Eigen::Vector2d> pts) : points(std::move(pts)) {
  if (points.size() < 2)
    throw std::invalid_argument("polyline needs at least 2 vertices");
  cum_arc.resize(points.size());
  cum_arc[0] = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    cum_arc[i] = cum_arc[i - 1] + (points[i] - points[i - 1]).norm();
  if (total_length() <= 0.0)
    throw std::invalid_argument("polyline has zero length");
}

PathProjection Polyline::project(const Eigen::Vector2d& p) const {
  PathProjection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Eigen::Vector2d a = points[i], b = points[i + 1];
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) continue;
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    const Eigen::Vector2d q = a + t * ab;
    const double d2 = (p - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best.point = q;
      best.tangent = ab.normalized();
      best.arc = cum_arc[i] + t * std::sqrt(len2);
      best.at_vertex = (t <= 0.0 || t >= 1.0);
    }
  }
  return best;
}

Eigen::Vector2d Polyline::at_arc(double s, Eigen::Vector2d* tangent,
                                 bool* clamped) const {
  if (clamped) *clamped = false;
  if (s <= 0.0) {
    if (tangent) *tangent = (points[1] - points[0]).normalized();
    if (clamped) *clamped = true;
    return points.front();
  }
  if (s >= total_length()) {
    if (tangent)
      *tangent = (points.back() - points[points.size() - 2]).normalized();
    if (clamped) *clamped = true;
    return points.back();
  }
  std::size_t i = 1;
  while (i + 1 < cum_arc.size() && cum_arc[i] < s) ++i;
  const Eigen::Vector2d a = points[i - 1], b = points[i];
  const double seg = cum_arc[i] - cum_arc[i - 1];
  const double t = (s - cum_arc[i - 1]) / seg;
  if (tangent) *tangent = (b - a).normalized();
  return a + t * (b - a);
}

uncertainty::ClfSpec make_path_clf(const std::vector<Eigen::Vector2d>& reference,
                                   double lookahead, double heading_weight) {
  auto line = std::make_shared<Polyline>(reference);
  if (lookahead < 0.0) throw std::invalid_argument("lookahead must be >= 0");

  struct Eval {
    Eigen::Vector2d p_look;
    Eigen::Vector2d tan_look;
    Eigen::Vector2d tan_proj;
    double theta;
    bool frozen;  // dp_L/dp = 0 (vertex projection or clamped lookahead)
  };
  auto eval_at = [line, lookahead](const Eigen::VectorXd& x) {
    const Eigen::Vector2d p = x.head<2>();
    PathProjection proj = line->project(p);
    Eval ev;
    bool clamped = false;
    ev.p_look = line->at_arc(proj.arc + lookahead, &ev.tan_look, &clamped);
    ev.tan_proj = proj.tangent;
    ev.theta = std::atan2(ev.tan_look(1), ev.tan_look(0));
    ev.frozen = proj.at_vertex || clamped;
    return ev;
  };

  uncertainty::ClfSpec clf;
  clf.alpha_slope = 2.0;
  clf.V = [eval_at, heading_weight](const Eigen::VectorXd& x) {
    const Eval ev = eval_at(x);
    const Eigen::Vector2d d = x.head<2>() - ev.p_look;
    return d.squaredNorm() + heading_weight * (1.0 - std::cos(x(2) - ev.theta));
  };
  clf.grad_V = [eval_at, heading_weight](const Eigen::VectorXd& x) {
    const Eval ev = eval_at(x);
    const Eigen::Vector2d d = x.head<2>() - ev.p_look;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
    // d/dp ||p - p_L(p)||^2 with dp_L/dp = tan_look * tan_proj' in the
    // interior region, zero when the projection sits on a vertex or the
    // lookahead is clamped at the path end.
    g.head<2>() = 2.0 * d;
    if (!ev.frozen) g.head<2>() -= 2.0 * ev.tan_proj * ev.tan_look.dot(d);
    g(2) = heading_weight * std::sin(x(2) - ev.theta);
    return g;
  };
  return clf;
}

}  // namespace socnav::world
