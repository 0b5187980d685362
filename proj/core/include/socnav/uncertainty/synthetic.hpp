#pragma once

#include <cstdint>
#include <vector>

#include "socnav/uncertainty/models.hpp"
#include "socnav/world/scene.hpp"

namespace socnav::uncertainty {

/// Parameters of the synthetic uncertainty-injection oracle that stands in
/// for the learned estimators: smooth random Fourier error fields are added
/// to the analytic ground truth, and the published variances / error bounds
/// dominate the injected error by construction.
struct CorruptionSpec {
  double sigma = 0.02;       // barrier field standard deviation (meters)
  double sigma_dyn = 0.005;  // per-entry dynamics field standard deviation
  double bound_factor = 3.89;  // confidence factor for the error bounds
  int n_features = 8;          // Fourier features per barrier field
  int n_features_dyn = 4;
  double max_frequency = 1.5;  // rad/m
  std::uint64_t seed = 0;
};

struct SyntheticModels {
  GpDynamicsModel dynamics;
  std::vector<GpBarrierModel> barriers;    // one per obstacle
  std::vector<WorstCaseModel> worst_case;  // one per obstacle
};

/// Build corrupted estimates of the scene barriers (h_i = sdf_i - rho) and
/// of the unicycle dynamics.  Guarantees, pointwise for every x:
///   |h_tilde_i(x) - h_i(x)|        <= e_h
///   ||grad h_tilde_i - grad h_i||  <= e_grad_h
///   ||F_tilde(x) - F(x)||          <= e_F
/// and grad h_tilde is the exact analytic gradient of h_tilde.
SyntheticModels synthetic_estimator(const world::Scene& scene,
                                    const CorruptionSpec& noise, double rho,
                                    double alpha_h_slope = 1.0);

}  // namespace socnav::uncertainty
