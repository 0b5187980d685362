#include "socnav/check/oracles.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>

namespace socnav::check {

MultivariateNormal MultivariateNormal::from_cov(const Eigen::VectorXd& mean,
                                                const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (cov + cov.transpose()));
  MultivariateNormal mvn;
  mvn.mean = mean;
  mvn.factor = es.eigenvectors() *
               es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return mvn;
}

Eigen::VectorXd MultivariateNormal::sample(std::mt19937_64& gen) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(gen);
  return mean + factor * z;
}

double grid_min_1d(const std::function<double(double)>& f, double lo,
                   double hi, int samples, int rounds) {
  double best = std::numeric_limits<double>::infinity();
  double best_x = 0.5 * (lo + hi);
  double center = best_x, half = 0.5 * (hi - lo);
  for (int r = 0; r < rounds; ++r) {
    for (int i = 0; i <= samples; ++i) {
      const double x = center - half + 2.0 * half * i / samples;
      const double v = f(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
    center = best_x;
    half *= 0.4;
  }
  return best;
}

double grid_min_joint_norm(const Eigen::VectorXd& v, const Eigen::MatrixXd& A,
                           const Eigen::VectorXd& a, const Eigen::MatrixXd& B,
                           const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                           const Eigen::VectorXd& center0, double halfwidth,
                           int per_axis, int rounds) {
  const int dim = static_cast<int>(v.size());
  Eigen::VectorXd center = center0;
  double half = halfwidth;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_z = center;

  Eigen::VectorXd z(dim);
  for (int r = 0; r < rounds; ++r) {
    bool improved = false;
    const int npts = per_axis;
    std::vector<int> idx(dim, 0);
    while (true) {
      for (int k = 0; k < dim; ++k)
        z(k) = center(k) - half + 2.0 * half * idx[k] / (npts - 1);
      if ((A * z - a).norm() + (B * z - b).norm() <= c.dot(z)) {
        const double val = v.dot(z);
        if (val < best) {
          best = val;
          best_z = z;
          improved = true;
        }
      }
      int k = 0;
      while (k < dim && ++idx[k] == npts) idx[k++] = 0;
      if (k == dim) break;
    }
    if (std::isfinite(best)) center = best_z;
    half *= improved || std::isfinite(best) ? 0.45 : 0.9;
  }
  return best;
}

PlantedSocp make_planted_socp(std::mt19937_64& gen, int dim, int n_cones,
                              int max_rows) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto randn_vec = [&](int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(gen);
    return v;
  };
  auto randn_mat = [&](int r, int co) {
    Eigen::MatrixXd m(r, co);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < co; ++j) m(i, j) = normal(gen);
    return m;
  };

  PlantedSocp out;
  out.z_star = 1.5 * randn_vec(dim);
  const Eigen::VectorXd interior_dir = randn_vec(dim).normalized();
  const Eigen::VectorXd z_int = out.z_star + interior_dir;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
  out.problem.objective = g;

  const double margin = 0.1;
  for (int ci = 0; ci < n_cones; ++ci) {
    const bool active = (ci == 0) || (u01(gen) < 0.5);
    const int k = static_cast<int>(u01(gen) * (max_rows + 1));  // 0..max_rows
    conic::SecondOrderCone cone;
    Eigen::VectorXd c_rand = 0.5 * randn_vec(dim) / std::sqrt(double(dim));
    if (k == 0) {
      if (active) {
        const double beta =
            std::max(0.0, margin - c_rand.dot(interior_dir));
        cone.c = c_rand + beta * interior_dir;
        cone.d0 = -cone.c.dot(out.z_star);
        const double t = 0.2 + 1.8 * u01(gen);
        g += t * cone.c;
      } else {
        cone.c = c_rand;
        const double slack = 0.3 + u01(gen);
        cone.d0 = std::max(-cone.c.dot(out.z_star), -cone.c.dot(z_int)) + slack;
      }
      cone.A.resize(0, dim);
      cone.b.resize(0);
    } else {
      cone.A = randn_mat(k, dim) / std::sqrt(double(k));
      if (active) {
        Eigen::VectorXd vres = randn_vec(k);
        vres *= (0.5 + u01(gen)) / vres.norm();  // boundary residual, norm >= 0.5
        cone.b = vres - cone.A * out.z_star;
        const double reach = (cone.A * z_int + cone.b).norm();
        const double beta = std::max(
            0.0, reach - vres.norm() - c_rand.dot(interior_dir) + margin);
        cone.c = c_rand + beta * interior_dir;
        cone.d0 = vres.norm() - cone.c.dot(out.z_star);
        const double t = 0.2 + 1.8 * u01(gen);
        g += t * (cone.c + cone.A.transpose() * (-vres / vres.norm()));
      } else {
        cone.b = randn_vec(k);
        cone.c = c_rand;
        const double slack = 0.3 + u01(gen);
        const double need_star =
            (cone.A * out.z_star + cone.b).norm() - cone.c.dot(out.z_star);
        const double need_int =
            (cone.A * z_int + cone.b).norm() - cone.c.dot(z_int);
        cone.d0 = std::max(need_star, need_int) + slack;
      }
    }
    out.problem.cones.push_back(std::move(cone));
  }
  out.problem.objective = g;
  out.planted_objective = g.dot(out.z_star);
  return out;
}

uncertainty::GpDynamicsModel GaussianCbcInstance::dynamics_model() const {
  uncertainty::GpDynamicsModel dyn;
  dyn.n = n;
  dyn.m = m;
  const Eigen::MatrixXd F = F_mean, K = KF;
  dyn.mean = [F](const Eigen::VectorXd&) { return F; };
  dyn.cov = [K](const Eigen::VectorXd&) { return K; };
  return dyn;
}

uncertainty::GpBarrierModel GaussianCbcInstance::barrier_model() const {
  uncertainty::GpBarrierModel bar;
  bar.alpha_slope = alpha;
  const double h = hgrad_mean(0);
  const Eigen::VectorXd gh = hgrad_mean.tail(n);
  const double kh = K2(0, 0);
  const Eigen::VectorXd gk = K2.block(1, 0, n, 1);
  const Eigen::MatrixXd hk = K2.block(1, 1, n, n);
  bar.mean = [h](const Eigen::VectorXd&) { return h; };
  bar.grad_mean = [gh](const Eigen::VectorXd&) { return gh; };
  bar.var = [kh](const Eigen::VectorXd&) { return kh; };
  bar.grad_cov = [gk](const Eigen::VectorXd&) { return gk; };
  bar.hess_cov = [hk](const Eigen::VectorXd&) { return hk; };
  return bar;
}

GaussianCbcInstance random_cbc_instance(std::mt19937_64& gen, int n, int m,
                                        double sigma_dyn, double sigma_bar) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto randn_mat = [&](int r, int c) {
    Eigen::MatrixXd mm(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) mm(i, j) = normal(gen);
    return mm;
  };

  GaussianCbcInstance inst;
  inst.n = n;
  inst.m = m;
  // O(1) means keep the neglected product-of-variances term well under the
  // Monte-Carlo tolerance at these sigma scales.
  inst.F_mean = randn_mat(n, m + 1);
  inst.F_mean.array() += 0.5 * inst.F_mean.array().sign();
  const int nf = (m + 1) * n;
  Eigen::MatrixXd R = randn_mat(nf, nf) / std::sqrt(double(nf));
  inst.KF = sigma_dyn * sigma_dyn *
            (R * R.transpose() +
             0.2 * Eigen::MatrixXd::Identity(nf, nf));
  Eigen::MatrixXd R2 = randn_mat(n + 1, n + 1) / std::sqrt(double(n + 1));
  inst.K2 = sigma_bar * sigma_bar *
            (R2 * R2.transpose() +
             0.2 * Eigen::MatrixXd::Identity(n + 1, n + 1));
  inst.hgrad_mean = randn_mat(n + 1, 1);
  inst.hgrad_mean.array() += 0.5 * inst.hgrad_mean.array().sign();
  inst.alpha = u01(gen) < 0.25 ? 0.0 : 0.5 + u01(gen);
  return inst;
}

McMoments mc_cbc_moments(const GaussianCbcInstance& inst,
                         const Eigen::VectorXd& ulift, std::size_t n_samples,
                         std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const MultivariateNormal mvF = MultivariateNormal::from_cov(
      Eigen::Map<const Eigen::VectorXd>(inst.F_mean.data(), inst.F_mean.size()),
      inst.KF);
  const MultivariateNormal mvH =
      MultivariateNormal::from_cov(inst.hgrad_mean, inst.K2);

  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const Eigen::VectorXd fvec = mvF.sample(gen);
    const Eigen::VectorXd hg = mvH.sample(gen);
    const Eigen::Map<const Eigen::MatrixXd> F(fvec.data(), inst.n, inst.m + 1);
    const double cbc =
        hg.tail(inst.n).dot(F * ulift) + inst.alpha * hg(0);
    sum += cbc;
    sumsq += cbc * cbc;
  }
  McMoments out;
  out.samples = n_samples;
  out.mean = sum / n_samples;
  out.variance = (sumsq - n_samples * out.mean * out.mean) / (n_samples - 1);
  out.mean_se = std::sqrt(out.variance / n_samples);
  return out;
}

McMoments mc_clc_moments(const Eigen::MatrixXd& F_mean,
                         const Eigen::MatrixXd& KF, const Eigen::VectorXd& gV,
                         double alpha_term, const Eigen::VectorXd& ulift,
                         std::size_t n_samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const int n = static_cast<int>(F_mean.rows());
  const int mp1 = static_cast<int>(F_mean.cols());
  const MultivariateNormal mvF = MultivariateNormal::from_cov(
      Eigen::Map<const Eigen::VectorXd>(F_mean.data(), F_mean.size()), KF);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const Eigen::VectorXd fvec = mvF.sample(gen);
    const Eigen::Map<const Eigen::MatrixXd> F(fvec.data(), n, mp1);
    const double clc = gV.dot(F * ulift) + alpha_term;
    sum += clc;
    sumsq += clc * clc;
  }
  McMoments out;
  out.samples = n_samples;
  out.mean = sum / n_samples;
  out.variance = (sumsq - n_samples * out.mean * out.mean) / (n_samples - 1);
  out.mean_se = std::sqrt(out.variance / n_samples);
  return out;
}

double mc_cbc_violation_rate(const GaussianCbcInstance& inst,
                             const Eigen::VectorXd& ulift,
                             std::size_t n_samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const MultivariateNormal mvF = MultivariateNormal::from_cov(
      Eigen::Map<const Eigen::VectorXd>(inst.F_mean.data(), inst.F_mean.size()),
      inst.KF);
  const MultivariateNormal mvH =
      MultivariateNormal::from_cov(inst.hgrad_mean, inst.K2);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const Eigen::VectorXd fvec = mvF.sample(gen);
    const Eigen::VectorXd hg = mvH.sample(gen);
    const Eigen::Map<const Eigen::MatrixXd> F(fvec.data(), inst.n, inst.m + 1);
    const double cbc = hg.tail(inst.n).dot(F * ulift) + inst.alpha * hg(0);
    if (cbc < 0.0) ++bad;
  }
  return static_cast<double>(bad) / n_samples;
}

double min_true_cbc_on_bounds(const RobustCbcInstance& inst,
                              const Eigen::VectorXd& ulift,
                              std::size_t n_samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int n = static_cast<int>(inst.F_tilde.rows());
  const int mp1 = static_cast<int>(inst.F_tilde.cols());

  double worst = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd G(n, mp1);
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < mp1; ++j) G(i, j) = normal(gen);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
    const double smax = svd.singularValues()(0);
    const Eigen::MatrixXd DF = (inst.e_F / smax) * G;

    Eigen::VectorXd dgh(n);
    for (int i = 0; i < n; ++i) dgh(i) = normal(gen);
    dgh *= inst.e_grad_h / dgh.norm();

    const double dh = u01(gen) < 0.5 ? -inst.e_h : inst.e_h;
    const double cbc = (inst.grad_h_tilde + dgh).dot((inst.F_tilde + DF) * ulift) +
                       inst.alpha * (inst.h_tilde + dh);
    worst = std::min(worst, cbc);
  }
  return worst;
}

std::optional<Eigen::VectorXd> solve_dense_qp_enumeration(const DenseQp& qp) {
  const int nw = static_cast<int>(qp.H.rows());
  const int nc = static_cast<int>(qp.C.rows());
  if (nc > 20) return std::nullopt;  // enumeration guard
  double best = std::numeric_limits<double>::infinity();
  std::optional<Eigen::VectorXd> best_w;
  const double tol = 1e-9;

  for (std::uint32_t mask = 0; mask < (1u << nc); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < nc; ++i)
      if (mask & (1u << i)) act.push_back(i);
    if (static_cast<int>(act.size()) > nw) continue;
    const int na = static_cast<int>(act.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nw + na, nw + na);
    kkt.topLeftCorner(nw, nw) = qp.H;
    Eigen::VectorXd rhs(nw + na);
    rhs.head(nw) = -qp.g;
    for (int i = 0; i < na; ++i) {
      kkt.block(nw + i, 0, 1, nw) = qp.C.row(act[i]);
      kkt.block(0, nw + i, nw, 1) = qp.C.row(act[i]).transpose();
      rhs(nw + i) = qp.d(act[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd w = sol.head(nw);
    const Eigen::VectorXd nu = sol.tail(na);
    if (((qp.C * w - qp.d).array() > tol).any()) continue;
    if ((nu.array() < -tol).any()) continue;
    const double obj = 0.5 * w.dot(qp.H * w) + qp.g.dot(w);
    if (obj < best) {
      best = obj;
      best_w = w;
    }
  }
  return best_w;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
    xp(i) = x(i);
    xm(i) = x(i);
  }
  return g;
}

double frechet_bruteforce(const std::vector<Eigen::Vector2d>& a,
                          const std::vector<Eigen::Vector2d>& b) {
  const std::size_t na = a.size(), nb = b.size();
  std::vector<double> dist(na * nb);
  std::vector<double> cand;
  cand.reserve(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      dist[i * nb + j] = (a[i] - b[j]).norm();
      cand.push_back(dist[i * nb + j]);
    }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  auto feasible = [&](double leash) {
    if (dist[0] > leash || dist[na * nb - 1] > leash) return false;
    std::vector<char> seen(na * nb, 0);
    std::deque<std::pair<std::size_t, std::size_t>> queue;
    queue.push_back({0, 0});
    seen[0] = 1;
    while (!queue.empty()) {
      auto [i, j] = queue.front();
      queue.pop_front();
      if (i == na - 1 && j == nb - 1) return true;
      const std::size_t moves[3][2] = {{i + 1, j}, {i, j + 1}, {i + 1, j + 1}};
      for (const auto& mv : moves) {
        if (mv[0] >= na || mv[1] >= nb) continue;
        const std::size_t id = mv[0] * nb + mv[1];
        if (!seen[id] && dist[id] <= leash) {
          seen[id] = 1;
          queue.push_back({mv[0], mv[1]});
        }
      }
    }
    return false;
  };

  // binary search over the sorted candidate leash lengths
  std::size_t lo = 0, hi = cand.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible(cand[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return cand[lo];
}

}  // namespace socnav::check
