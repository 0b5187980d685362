#include "socnav/uncertainty/synthetic.hpp"

#include <cmath>
#include <memory>

#include "socnav/common/rng.hpp"
#include "socnav/world/unicycle.hpp"

namespace socnav::uncertainty {
namespace {

// Smooth random Fourier field over R^dim with pointwise variance sigma^2
// (over phases/amplitudes) and a rigorous amplitude bound.  Coefficients
// are rescaled so that sup |field| <= bound_factor * sigma.
struct FourierField {
  Eigen::MatrixXd freq;   // dim x J
  Eigen::VectorXd amp;    // J, includes sigma * sqrt(2/J)
  Eigen::VectorXd phase;  // J
  double sup_bound = 0.0;
  double grad_bound = 0.0;

  static FourierField make(int dim, int features, double sigma,
                           double max_frequency, double bound_factor,
                           std::mt19937_64& gen) {
    FourierField f;
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> ufreq(-max_frequency, max_frequency);
    f.freq.resize(dim, features);
    f.amp.resize(features);
    f.phase.resize(features);
    const double scale = sigma * std::sqrt(2.0 / features);
    for (int j = 0; j < features; ++j) {
      for (int d = 0; d < dim; ++d) f.freq(d, j) = ufreq(gen);
      f.amp(j) = scale * normal(gen);
      f.phase(j) = uphase(gen);
    }
    double sup = f.amp.cwiseAbs().sum();
    const double cap = bound_factor * sigma;
    if (sup > cap && sup > 0.0) {
      f.amp *= cap / sup;
      sup = cap;
    }
    f.sup_bound = cap;  // valid bound whether or not the clamp fired
    f.grad_bound = 0.0;
    for (int j = 0; j < features; ++j)
      f.grad_bound += std::abs(f.amp(j)) * f.freq.col(j).norm();
    return f;
  }

  double value(const Eigen::VectorXd& x) const {
    double v = 0.0;
    for (int j = 0; j < amp.size(); ++j)
      v += amp(j) * std::cos(freq.col(j).dot(x) + phase(j));
    return v;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (int j = 0; j < amp.size(); ++j)
      g -= amp(j) * std::sin(freq.col(j).dot(x) + phase(j)) * freq.col(j);
    return g;
  }

  // E[grad grad'] of the field over phases: sigma^2/J sum w w'
  Eigen::MatrixXd grad_covariance(double sigma) const {
    const int dim = static_cast<int>(freq.rows());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    if (amp.size() == 0) return H;
    for (int j = 0; j < amp.size(); ++j)
      H += freq.col(j) * freq.col(j).transpose();
    return (sigma * sigma / static_cast<double>(amp.size())) * H;
  }
};

}  // namespace

SyntheticModels synthetic_estimator(const world::Scene& scene,
                                    const CorruptionSpec& noise, double rho,
                                    double alpha_h_slope) {
  SyntheticModels out;
  const int n = 3, m = 2;

  // Dynamics: F_tilde = F_true + per-entry Fourier fields over the state.
  auto gen = make_engine(derive_seed(noise.seed, {0xD1}));
  auto dyn_fields = std::make_shared<std::vector<FourierField>>();
  for (int e = 0; e < n * (m + 1); ++e)
    dyn_fields->push_back(FourierField::make(n, noise.n_features_dyn,
                                             noise.sigma_dyn,
                                             noise.max_frequency,
                                             noise.bound_factor, gen));
  double ef2 = 0.0;
  for (const auto& f : *dyn_fields) ef2 += f.sup_bound * f.sup_bound;
  const double e_F = std::sqrt(ef2);  // Frobenius dominates the spectral norm

  out.dynamics.n = n;
  out.dynamics.m = m;
  out.dynamics.mean = [dyn_fields](const Eigen::VectorXd& x) {
    Eigen::MatrixXd F = world::dynamics_matrix(Eigen::Vector3d(x));
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 3; ++r) F(r, c) += (*dyn_fields)[c * 3 + r].value(x);
    return F;
  };
  const double sd2 = noise.sigma_dyn * noise.sigma_dyn;
  out.dynamics.cov = [sd2](const Eigen::VectorXd&) {
    return sd2 * Eigen::MatrixXd::Identity(9, 9);
  };

  // Barriers: one independent field per obstacle, over the position only.
  const auto barriers = world::assemble_barriers(scene, rho);
  for (std::size_t i = 0; i < barriers.size(); ++i) {
    auto bgen = make_engine(derive_seed(noise.seed, {0xB0, i}));
    auto field = std::make_shared<FourierField>(
        FourierField::make(2, noise.n_features, noise.sigma,
                           noise.max_frequency, noise.bound_factor, bgen));
    const world::Obstacle obstacle = barriers.obstacles[i];

    GpBarrierModel gp;
    gp.alpha_slope = alpha_h_slope;
    gp.mean = [obstacle, field, rho](const Eigen::VectorXd& x) {
      return world::sdf(obstacle, x.head<2>()).value - rho +
             field->value(x.head<2>());
    };
    gp.grad_mean = [obstacle, field](const Eigen::VectorXd& x) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
      g.head<2>() = world::sdf(obstacle, x.head<2>()).gradient +
                    field->gradient(x.head<2>());
      return g;
    };
    const double kh = noise.sigma * noise.sigma;
    gp.var = [kh](const Eigen::VectorXd&) { return kh; };
    gp.grad_cov = [](const Eigen::VectorXd&) {
      return Eigen::VectorXd::Zero(3);  // stationary synthetic kernel
    };
    Eigen::MatrixXd H3 = Eigen::MatrixXd::Zero(3, 3);
    H3.topLeftCorner<2, 2>() = field->grad_covariance(noise.sigma);
    gp.hess_cov = [H3](const Eigen::VectorXd&) { return H3; };
    out.barriers.push_back(gp);

    WorstCaseModel wc;
    wc.alpha_slope = alpha_h_slope;
    wc.F_tilde = out.dynamics.mean;
    wc.h_tilde = gp.mean;
    wc.grad_h_tilde = gp.grad_mean;
    wc.e_F = [e_F](const Eigen::VectorXd&) { return e_F; };
    const double eh = field->sup_bound;
    wc.e_h = [eh](const Eigen::VectorXd&) { return eh; };
    const double egh = field->grad_bound;
    wc.e_grad_h = [egh](const Eigen::VectorXd&) { return egh; };
    out.worst_case.push_back(wc);
  }
  return out;
}

}  // namespace socnav::uncertainty
