#pragma once

#include <cstdint>

#include "socnav/world/scene.hpp"

namespace socnav::world {

/// Tunable knobs of the procedural environment generator.  Obstacles are
/// placed relative to the reference path: "blocking" circles clip into the
/// path corridor so every controller must deviate, "skim" circles sit just
/// outside it.  A passable gap is always preserved.
struct GeneratorParams {
  double rho = 0.177;          // robot radius used for corridor sizing
  int blocking_min = 2, blocking_max = 3;
  int skim_min = 1, skim_max = 2;
  double radius_min = 0.30, radius_max = 0.55;
  double overlap_min = 0.06, overlap_max = 0.26;    // path penetration depth
  double clearance_min = 0.03, clearance_max = 0.15;  // skim gap to the path
  double min_separation = 0.60;  // extra gap between inflated obstacles
  double keepout_endpoints = 1.0;
};

Scene generate_scene(std::uint64_t master_seed, int index,
                     const GeneratorParams& params = {});

std::vector<Scene> generate_environments(std::uint64_t master_seed, int count,
                                         const GeneratorParams& params = {});

}  // namespace socnav::world
