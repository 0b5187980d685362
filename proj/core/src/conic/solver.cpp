#include "socnav/conic/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

namespace socnav::conic {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Internal conic form:  min c'x  s.t.  G x + s = h,  s in K,
// K = R_+^l x Q_{q1} x ... x Q_{qN}.  LP rows collect the degenerate
// (k = 0) cones; each k >= 1 cone maps to a Q_{k+1} block
// (s0, s1) = (c'z + d0, A z + b) via rows (-c'; -A) and offsets (d0; b).
struct ConeLayout {
  Eigen::Index l = 0;
  std::vector<Eigen::Index> soc;       // dims (k_i + 1)
  std::vector<Eigen::Index> soc_offset;
  Eigen::Index total = 0;
};

struct StandardForm {
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  ConeLayout K;
};

StandardForm to_standard_form(const SocpProblem& p) {
  StandardForm sf;
  Eigen::Index lp_rows = 0, soc_rows = 0;
  for (const auto& k : p.cones) {
    if (k.rows() == 0)
      ++lp_rows;
    else
      soc_rows += k.rows() + 1;
  }
  const Eigen::Index d = p.dim();
  const Eigen::Index M = lp_rows + soc_rows;
  sf.G.setZero(M, d);
  sf.h.setZero(M);
  sf.K.l = lp_rows;

  Eigen::Index lp_at = 0, soc_at = lp_rows;
  for (const auto& k : p.cones) {
    if (k.rows() == 0) {
      sf.G.row(lp_at) = -k.c.transpose();
      sf.h(lp_at) = k.d0;
      ++lp_at;
    } else {
      sf.K.soc_offset.push_back(soc_at);
      sf.K.soc.push_back(k.rows() + 1);
      sf.G.row(soc_at) = -k.c.transpose();
      sf.h(soc_at) = k.d0;
      sf.G.block(soc_at + 1, 0, k.rows(), d) = -k.A;
      sf.h.segment(soc_at + 1, k.rows()) = k.b;
      soc_at += k.rows() + 1;
    }
  }
  sf.K.total = M;
  return sf;
}

// ---- Jordan algebra / cone helpers over the concatenated vector ----

Eigen::VectorXd cone_identity(const ConeLayout& K) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(K.total);
  e.head(K.l).setOnes();
  for (std::size_t i = 0; i < K.soc.size(); ++i) e(K.soc_offset[i]) = 1.0;
  return e;
}

double cone_margin(const ConeLayout& K, const Eigen::VectorXd& v) {
  double m = kInf;
  for (Eigen::Index i = 0; i < K.l; ++i) m = std::min(m, v(i));
  for (std::size_t i = 0; i < K.soc.size(); ++i) {
    const Eigen::Index o = K.soc_offset[i], n = K.soc[i];
    m = std::min(m, v(o) - v.segment(o + 1, n - 1).norm());
  }
  return m;
}

// u o v in the product algebra
Eigen::VectorXd jprod(const ConeLayout& K, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& v) {
  Eigen::VectorXd w(K.total);
  w.head(K.l) = u.head(K.l).cwiseProduct(v.head(K.l));
  for (std::size_t i = 0; i < K.soc.size(); ++i) {
    const Eigen::Index o = K.soc_offset[i], n = K.soc[i] - 1;
    w(o) = u.segment(o, n + 1).dot(v.segment(o, n + 1));
    w.segment(o + 1, n) = u(o) * v.segment(o + 1, n) + v(o) * u.segment(o + 1, n);
  }
  return w;
}

// solve lam o u = d for u
Eigen::VectorXd jdiv(const ConeLayout& K, const Eigen::VectorXd& lam,
                     const Eigen::VectorXd& d) {
  Eigen::VectorXd u(K.total);
  u.head(K.l) = d.head(K.l).cwiseQuotient(lam.head(K.l));
  for (std::size_t i = 0; i < K.soc.size(); ++i) {
    const Eigen::Index o = K.soc_offset[i], n = K.soc[i] - 1;
    const double l0 = lam(o);
    const auto l1 = lam.segment(o + 1, n);
    const double det = l0 * l0 - l1.squaredNorm();
    const double u0 = (l0 * d(o) - l1.dot(d.segment(o + 1, n))) / det;
    u(o) = u0;
    u.segment(o + 1, n) = (d.segment(o + 1, n) - u0 * l1) / l0;
  }
  return u;
}

// Max alpha in [0, inf] with v + alpha dv in K (v strictly interior).
double max_step(const ConeLayout& K, const Eigen::VectorXd& v,
                const Eigen::VectorXd& dv) {
  double alpha = kInf;
  for (Eigen::Index i = 0; i < K.l; ++i)
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  for (std::size_t i = 0; i < K.soc.size(); ++i) {
    const Eigen::Index o = K.soc_offset[i], n = K.soc[i] - 1;
    const double v0 = v(o), dv0 = dv(o);
    const auto v1 = v.segment(o + 1, n);
    const auto dv1 = dv.segment(o + 1, n);
    // roots of (v0+a dv0)^2 - |v1+a dv1|^2 = 0
    const double a = dv0 * dv0 - dv1.squaredNorm();
    const double b = 2.0 * (v0 * dv0 - v1.dot(dv1));
    const double c = v0 * v0 - v1.squaredNorm();
    double best = kInf;
    const double disc = b * b - 4.0 * a * c;
    if (std::abs(a) < 1e-14) {
      if (b < 0.0) best = -c / b;
    } else if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
      double r1 = qq / a;
      double r2 = (std::abs(qq) > 0.0) ? c / qq : kInf;
      if (r1 > 1e-16) best = std::min(best, r1);
      if (r2 > 1e-16) best = std::min(best, r2);
    }
    alpha = std::min(alpha, best);
  }
  return alpha;
}

// Nesterov-Todd scaling: per LP row w_i = sqrt(s/z); per SOC block the
// normalized point wbar and magnitude eta with W = eta * Wbar,
// Wbar = [w0, w1'; w1, I + w1 w1'/(1+w0)].
struct NTScaling {
  Eigen::VectorXd w_lp;  // l
  std::vector<double> eta;
  std::vector<Eigen::VectorXd> wbar;
  const ConeLayout* K = nullptr;

  bool compute(const ConeLayout& layout, const Eigen::VectorXd& s,
               const Eigen::VectorXd& z) {
    K = &layout;
    w_lp.resize(layout.l);
    for (Eigen::Index i = 0; i < layout.l; ++i) {
      if (s(i) <= 0.0 || z(i) <= 0.0) return false;
      w_lp(i) = std::sqrt(s(i) / z(i));
    }
    eta.assign(layout.soc.size(), 0.0);
    wbar.assign(layout.soc.size(), Eigen::VectorXd());
    for (std::size_t i = 0; i < layout.soc.size(); ++i) {
      const Eigen::Index o = layout.soc_offset[i], n = layout.soc[i] - 1;
      const double s0 = s(o), z0 = z(o);
      const auto s1 = s.segment(o + 1, n);
      const auto z1 = z.segment(o + 1, n);
      const double ss = (s0 - s1.norm()) * (s0 + s1.norm());
      const double zz = (z0 - z1.norm()) * (z0 + z1.norm());
      if (ss <= 0.0 || zz <= 0.0) return false;
      const double rs = std::sqrt(ss), rz = std::sqrt(zz);
      Eigen::VectorXd sb(n + 1), zb(n + 1);
      sb(0) = s0 / rs;
      sb.tail(n) = s1 / rs;
      zb(0) = z0 / rz;
      zb.tail(n) = z1 / rz;
      const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
      Eigen::VectorXd wb(n + 1);
      wb(0) = (sb(0) + zb(0)) / (2.0 * gamma);
      wb.tail(n) = (sb.tail(n) - zb.tail(n)) / (2.0 * gamma);
      eta[i] = std::sqrt(rs / rz);
      wbar[i] = std::move(wb);
    }
    return true;
  }

  // W v
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd u(K->total);
    u.head(K->l) = w_lp.cwiseProduct(v.head(K->l));
    for (std::size_t i = 0; i < K->soc.size(); ++i) {
      const Eigen::Index o = K->soc_offset[i], n = K->soc[i] - 1;
      const auto& wb = wbar[i];
      const double dot1 = wb.tail(n).dot(v.segment(o + 1, n));
      u(o) = eta[i] * (wb(0) * v(o) + dot1);
      u.segment(o + 1, n) =
          eta[i] * (v(o) * wb.tail(n) + v.segment(o + 1, n) +
                    dot1 / (1.0 + wb(0)) * wb.tail(n));
    }
    return u;
  }

  // W^{-1} v  (Wbar^{-1} = J Wbar J)
  Eigen::VectorXd apply_inv(const Eigen::VectorXd& v) const {
    Eigen::VectorXd u(K->total);
    u.head(K->l) = v.head(K->l).cwiseQuotient(w_lp);
    for (std::size_t i = 0; i < K->soc.size(); ++i) {
      const Eigen::Index o = K->soc_offset[i], n = K->soc[i] - 1;
      const auto& wb = wbar[i];
      const double dot1 = wb.tail(n).dot(v.segment(o + 1, n));
      u(o) = (wb(0) * v(o) - dot1) / eta[i];
      u.segment(o + 1, n) =
          (-v(o) * wb.tail(n) + v.segment(o + 1, n) +
           dot1 / (1.0 + wb(0)) * wb.tail(n)) /
          eta[i];
    }
    return u;
  }

  // W^{-2} v = eta^{-2} (2 (J wbar)(J wbar)' - J) v
  Eigen::VectorXd apply_inv2(const Eigen::VectorXd& v) const {
    Eigen::VectorXd u(K->total);
    u.head(K->l) = v.head(K->l).cwiseQuotient(w_lp.cwiseProduct(w_lp));
    for (std::size_t i = 0; i < K->soc.size(); ++i) {
      const Eigen::Index o = K->soc_offset[i], n = K->soc[i] - 1;
      const auto& wb = wbar[i];
      const double jdot = wb(0) * v(o) - wb.tail(n).dot(v.segment(o + 1, n));
      u(o) = (2.0 * wb(0) * jdot - v(o)) / (eta[i] * eta[i]);
      u.segment(o + 1, n) =
          (-2.0 * jdot * wb.tail(n) + v.segment(o + 1, n)) / (eta[i] * eta[i]);
    }
    return u;
  }

  // W^2 v = eta^2 (2 wbar wbar' - J) v
  Eigen::VectorXd apply_sq(const Eigen::VectorXd& v) const {
    Eigen::VectorXd u(K->total);
    u.head(K->l) = v.head(K->l).cwiseProduct(w_lp.cwiseProduct(w_lp));
    for (std::size_t i = 0; i < K->soc.size(); ++i) {
      const Eigen::Index o = K->soc_offset[i], n = K->soc[i] - 1;
      const auto& wb = wbar[i];
      const double dot = wb(0) * v(o) + wb.tail(n).dot(v.segment(o + 1, n));
      u(o) = (2.0 * wb(0) * dot - v(o)) * eta[i] * eta[i];
      u.segment(o + 1, n) =
          (2.0 * dot * wb.tail(n) + v.segment(o + 1, n)) * eta[i] * eta[i];
    }
    return u;
  }
};

// KKT solver for  [0 G'; G -W^2] [u; v] = [p; q]  via the Schur
// complement M = G' W^{-2} G (+ static regularization), with two rounds
// of iterative refinement on the full system.
struct KktSolver {
  const Eigen::MatrixXd* G = nullptr;
  const NTScaling* W = nullptr;
  Eigen::LLT<Eigen::MatrixXd> llt;
  double reg = 0.0;

  bool factor(const Eigen::MatrixXd& Gm, const NTScaling& scal,
              const SolverSettings& st) {
    G = &Gm;
    W = &scal;
    Eigen::MatrixXd WiG(Gm.rows(), Gm.cols());
    for (Eigen::Index j = 0; j < Gm.cols(); ++j)
      WiG.col(j) = scal.apply_inv2(Gm.col(j));
    Eigen::MatrixXd M = Gm.transpose() * WiG;
    reg = st.static_reg;
    for (int attempt = 0; attempt <= st.reg_escalations; ++attempt) {
      Eigen::MatrixXd Mr = M + reg * Eigen::MatrixXd::Identity(M.rows(), M.cols());
      llt.compute(Mr);
      if (llt.info() == Eigen::Success) return true;
      reg *= 100.0;
    }
    return false;
  }

  void solve(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
             Eigen::VectorXd& u, Eigen::VectorXd& v) const {
    u = llt.solve(p + G->transpose() * W->apply_inv2(q));
    v = W->apply_inv2(*G * u - q);
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd r1 = p - G->transpose() * v;
      Eigen::VectorXd r2 = q - *G * u + W->apply_sq(v);
      Eigen::VectorXd du = llt.solve(r1 + G->transpose() * W->apply_inv2(r2));
      Eigen::VectorXd dv = W->apply_inv2(*G * du - r2);
      u += du;
      v += dv;
    }
  }
};

struct Metrics {
  double pres, dres, absgap, relgap, pobj;
};

Metrics metrics_at(const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                   const Eigen::VectorXd& c, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& s, const Eigen::VectorXd& z,
                   double tau) {
  Metrics m{};
  m.pobj = c.dot(x) / tau;
  m.pres = ((G * x + s) / tau - h).norm() / std::max(1.0, h.norm());
  m.dres = (G.transpose() * z / tau + c).norm() / std::max(1.0, c.norm());
  m.absgap = s.dot(z) / (tau * tau);
  m.relgap = m.absgap / std::max(1.0, std::abs(m.pobj));
  return m;
}

}  // namespace

SocpSolution solve(const SocpProblem& problem, const SolverSettings& settings) {
  problem.validate();
  const Eigen::Index d = problem.dim();
  SocpSolution sol;
  sol.z = Eigen::VectorXd::Zero(d);

  if (problem.cones.empty()) {
    // Pure linear objective over R^d: bounded only if it is constant.
    if (problem.objective.norm() == 0.0) {
      sol.status = SolveStatus::Optimal;
      sol.obj_value = 0.0;
      sol.primal_residual = sol.dual_residual = sol.duality_gap = 0.0;
      return sol;
    }
    sol.status = SolveStatus::Unbounded;
    sol.z = -problem.objective.normalized();
    return sol;
  }

  StandardForm sf = to_standard_form(problem);
  const Eigen::MatrixXd& G = sf.G;
  const Eigen::VectorXd& h = sf.h;
  const Eigen::VectorXd c = problem.objective;
  const ConeLayout& K = sf.K;
  const double nu = static_cast<double>(K.l) + static_cast<double>(K.soc.size());
  const Eigen::VectorXd e = cone_identity(K);

  // Initialization: least-squares primal/dual points shifted into the cone.
  Eigen::VectorXd x, s, z;
  double tau = 1.0, kappa = 1.0;
  {
    Eigen::MatrixXd M0 = G.transpose() * G +
                         std::max(settings.static_reg, 1e-12) *
                             Eigen::MatrixXd::Identity(d, d);
    Eigen::LLT<Eigen::MatrixXd> llt0(M0);
    if (llt0.info() != Eigen::Success) {
      sol.status = SolveStatus::NumericalFailure;
      return sol;
    }
    x = llt0.solve(G.transpose() * h);
    s = h - G * x;
    double m = cone_margin(K, s);
    if (m <= 0.0) s += (1.0 - m) * e;
    z = G * llt0.solve(-c);
    m = cone_margin(K, z);
    if (m <= 0.0) z += (1.0 - m) * e;
  }

  const double mu0 = (s.dot(z) + tau * kappa) / (nu + 1.0);
  int stalls = 0;
  NTScaling W;
  KktSolver kkt;

  for (int it = 0; it <= settings.max_iters; ++it) {
    // Residuals of the self-dual embedding.
    Eigen::VectorXd rx = -(G.transpose() * z) - c * tau;  // dual
    Eigen::VectorXd rz = s + G * x - h * tau;             // primal
    double rtau = kappa + c.dot(x) + h.dot(z);
    double mu = (s.dot(z) + tau * kappa) / (nu + 1.0);

    Metrics m = metrics_at(G, h, c, x, s, z, tau);
    sol.iterations = it;
    sol.primal_residual = m.pres;
    sol.dual_residual = m.dres;
    sol.duality_gap = std::min(m.absgap, m.relgap);

    if (m.pres <= settings.feas_tol && m.dres <= settings.feas_tol &&
        (m.absgap <= settings.gap_tol || m.relgap <= settings.gap_tol)) {
      sol.status = SolveStatus::Optimal;
      sol.z = x / tau;
      sol.obj_value = c.dot(sol.z);
      return sol;
    }

    // Certificates from the embedding ray.
    if (mu <= 0.9 * mu0) {
      const double hz = h.dot(z);
      if (hz < 0.0) {
        double pinf = (G.transpose() * z).norm() / (-hz) / std::max(1.0, c.norm());
        if (pinf <= settings.feas_tol) {
          sol.status = SolveStatus::Infeasible;
          sol.z.resize(0);
          return sol;
        }
      }
      const double cx = c.dot(x);
      if (cx < 0.0) {
        double dinf = (G * x + s).norm() / (-cx) / std::max(1.0, h.norm());
        if (dinf <= settings.feas_tol) {
          sol.status = SolveStatus::Unbounded;
          sol.z = x / (-cx);
          return sol;
        }
      }
    }

    if (it == settings.max_iters) break;

    if (!W.compute(K, s, z)) {
      sol.status = SolveStatus::NumericalFailure;
      return sol;
    }
    if (!kkt.factor(G, W, settings)) {
      sol.status = SolveStatus::NumericalFailure;
      return sol;
    }
    Eigen::VectorXd lambda = W.apply(z);

    // Base direction for the tau elimination.
    Eigen::VectorXd x1, z1;
    kkt.solve(-c, h, x1, z1);
    const double denom = c.dot(x1) + h.dot(z1) - kappa / tau;
    if (!std::isfinite(denom) || std::abs(denom) < 1e-300) {
      sol.status = SolveStatus::NumericalFailure;
      return sol;
    }

    auto direction = [&](const Eigen::VectorXd& bx, const Eigen::VectorXd& bz_raw,
                         double btau, const Eigen::VectorXd& ds, double dkappa,
                         Eigen::VectorXd& dx, Eigen::VectorXd& dz,
                         Eigen::VectorXd& dsv, double& dtau, double& dkap) {
      Eigen::VectorXd wds = W.apply(jdiv(K, lambda, ds));
      Eigen::VectorXd x2, z2;
      kkt.solve(bx, bz_raw - wds, x2, z2);
      dtau = (btau - dkappa / tau - c.dot(x2) - h.dot(z2)) / denom;
      dx = x2 + dtau * x1;
      dz = z2 + dtau * z1;
      dsv = wds - W.apply_sq(dz);
      dkap = (dkappa - kappa * dtau) / tau;
    };

    // Affine (predictor) direction.
    Eigen::VectorXd dxa, dza, dsa;
    double dtaua, dkapa;
    {
      Eigen::VectorXd ds_aff = -jprod(K, lambda, lambda);
      direction(rx, -rz, -rtau, ds_aff, -tau * kappa, dxa, dza, dsa, dtaua,
                dkapa);
    }
    double alpha_aff = std::min({max_step(K, s, dsa), max_step(K, z, dza),
                                 dtaua < 0 ? -tau / dtaua : kInf,
                                 dkapa < 0 ? -kappa / dkapa : kInf, 1.0});
    double mu_aff = ((s + alpha_aff * dsa).dot(z + alpha_aff * dza) +
                     (tau + alpha_aff * dtaua) * (kappa + alpha_aff * dkapa)) /
                    (nu + 1.0);
    double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
    sigma = std::clamp(sigma, 1e-10, 1.0 - 1e-10);

    // Combined (corrector) direction with Mehrotra second-order term.
    Eigen::VectorXd dx, dz, ds;
    double dtau, dkap;
    {
      Eigen::VectorXd corr = jprod(K, W.apply_inv(dsa), W.apply(dza));
      Eigen::VectorXd ds_c =
          -jprod(K, lambda, lambda) + sigma * mu * e - corr;
      double dk_c = -tau * kappa + sigma * mu - dtaua * dkapa;
      direction((1.0 - sigma) * rx, -(1.0 - sigma) * rz, -(1.0 - sigma) * rtau,
                ds_c, dk_c, dx, dz, ds, dtau, dkap);
    }
    double alpha = std::min({max_step(K, s, ds), max_step(K, z, dz),
                             dtau < 0 ? -tau / dtau : kInf,
                             dkap < 0 ? -kappa / dkap : kInf});
    alpha = std::min(0.99 * alpha, 1.0);

    if (alpha < 1e-9) {
      if (++stalls >= 2) {
        sol.status = SolveStatus::NumericalFailure;
        return sol;
      }
    } else {
      stalls = 0;
    }

    x += alpha * dx;
    z += alpha * dz;
    s += alpha * ds;
    tau += alpha * dtau;
    kappa += alpha * dkap;

    if (tau <= 0.0 || kappa <= 0.0 || !x.allFinite()) {
      sol.status = SolveStatus::NumericalFailure;
      return sol;
    }
  }

  // Ran out of iterations: classify with relaxed certificate tolerances.
  const double hz = h.dot(z);
  if (hz < 0.0 &&
      (G.transpose() * z).norm() / (-hz) / std::max(1.0, c.norm()) <= 1e-6) {
    sol.status = SolveStatus::Infeasible;
    sol.z.resize(0);
    return sol;
  }
  const double cx = c.dot(x);
  if (cx < 0.0 &&
      (G * x + s).norm() / (-cx) / std::max(1.0, h.norm()) <= 1e-6) {
    sol.status = SolveStatus::Unbounded;
    sol.z = x / (-cx);
    return sol;
  }
  sol.status = SolveStatus::MaxIters;
  sol.z = x / tau;
  sol.obj_value = c.dot(sol.z);
  return sol;
}

}  // namespace socnav::conic
