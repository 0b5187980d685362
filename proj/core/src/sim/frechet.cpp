#include "socnav/sim/frechet.hpp"

#include <algorithm>
#include <stdexcept>

namespace socnav::sim {

double frechet_distance(const std::vector<Eigen::Vector2d>& a,
                        const std::vector<Eigen::Vector2d>& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("frechet_distance: empty polyline");
  const std::size_t na = a.size(), nb = b.size();
  std::vector<double> prev(nb), cur(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    const double d = (a[0] - b[j]).norm();
    prev[j] = j == 0 ? d : std::max(prev[j - 1], d);
  }
  for (std::size_t i = 1; i < na; ++i) {
    cur[0] = std::max(prev[0], (a[i] - b[0]).norm());
    for (std::size_t j = 1; j < nb; ++j) {
      const double reach = std::min({prev[j], prev[j - 1], cur[j - 1]});
      cur[j] = std::max(reach, (a[i] - b[j]).norm());
    }
    std::swap(prev, cur);
  }
  return prev[nb - 1];
}

}  // namespace socnav::sim
