#pragma once

#include <Eigen/Core>
#include <vector>

namespace socnav::sim {

/// Discrete Frechet distance between two polylines (dynamic programming
/// over monotone couplings).
double frechet_distance(const std::vector<Eigen::Vector2d>& a,
                        const std::vector<Eigen::Vector2d>& b);

}  // namespace socnav::sim
