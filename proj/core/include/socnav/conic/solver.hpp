#pragma once

#include "socnav/conic/problem.hpp"

namespace socnav::conic {

/// Solve a dense SOCP with a primal-dual path-following interior point
/// method (Nesterov-Todd scaling, Mehrotra predictor-corrector) on the
/// homogeneous self-dual embedding.  Infeasibility and unboundedness are
/// certified from the embedding's ray.
SocpSolution solve(const SocpProblem& problem, const SolverSettings& settings = {});

}  // namespace socnav::conic
