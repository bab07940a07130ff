#include "saga/dynamics.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace saga::dynamics {

using Vec4 = std::array<double, 4>;

DynamicsParams DynamicsParams::from_game(const games::NormalFormGame& game,
                                         double epsilon) {
  if (!game.is_2x2())
    throw UnsupportedShape("dynamics parameters require a 2x2 game");
  if (!(epsilon > 0)) throw ContractViolation("epsilon must be positive");
  DynamicsParams p;
  for (int i = 0; i < 2; ++i) {
    const games::ReducedCoefficients rc = games::reduced_coefficients(game, i);
    p.u[static_cast<size_t>(i)] = rc.u;
    p.c[static_cast<size_t>(i)] = rc.c;
    p.d[static_cast<size_t>(i)] = rc.d;
    p.e[static_cast<size_t>(i)] = rc.e;
  }
  p.epsilon = epsilon;
  return p;
}

std::array<double, 4> saiga_rhs(const DynamicsState& x, const DynamicsParams& P) {
  const double u1 = P.u[0], u2 = P.u[1];
  const double c1 = P.c[0], c2 = P.c[1];
  const double d1 = P.d[0], d2 = P.d[1];
  const double e1 = P.e[0], e2 = P.e[1];
  const double p1 = x.p1, p2 = x.p2, w1 = x.w1, w2 = x.w2;

  const double dp1 = (u1 + 0.5 * (u2 - u1) * w1) * p2 + 0.5 * (d2 - c1) * w1 + c1;
  const double dp2 = (u2 + 0.5 * (u1 - u2) * w2) * p1 + 0.5 * (d1 - c2) * w2 + c2;
  // The attitude flow is epsilon times (own expected payoff - two-player
  // average); the two expressions below are exact negations of each other
  // term by term whenever e2 == -e1, as any game guarantees.
  const double dw1 = P.epsilon * (((u1 - u2) * (p1 * p2) + (c1 - d2) * p1) +
                                  ((d1 - c2) * p2 + e1));
  const double dw2 = P.epsilon * (((u2 - u1) * (p1 * p2) + (d2 - c1) * p1) +
                                  ((c2 - d1) * p2 + e2));
  return {dp1, dp2, dw1, dw2};
}

SymmetricLabels symmetric_labels(const games::NormalFormGame& game) {
  if (!games::is_symmetric(game))
    throw ContractViolation("game is not symmetric");
  SymmetricLabels L;
  L.a = game.payoff({0, 0}, 0);
  L.b = game.payoff({0, 1}, 0);
  L.c = game.payoff({1, 0}, 0);
  L.d = game.payoff({1, 1}, 0);
  return L;
}

CoordinationLabels coordination_labels(const games::NormalFormGame& game) {
  if (!game.is_2x2())
    throw UnsupportedShape("coordination labels require a 2x2 game");
  CoordinationLabels L;
  L.R = game.payoff({0, 0}, 0);
  L.S = game.payoff({0, 1}, 0);
  L.T = game.payoff({1, 0}, 0);
  L.P = game.payoff({1, 1}, 0);
  L.r = game.payoff({0, 0}, 1);
  L.t = game.payoff({0, 1}, 1);
  L.s = game.payoff({1, 0}, 1);
  L.p = game.payoff({1, 1}, 1);
  if (!(L.R > L.T)) throw ContractViolation("coordination game requires R > T");
  if (!(L.P > L.S)) throw ContractViolation("coordination game requires P > S");
  if (!(L.r > L.t)) throw ContractViolation("coordination game requires r > t");
  if (!(L.p > L.s)) throw ContractViolation("coordination game requires p > s");
  return L;
}

std::array<double, 4> symmetric_rhs(const DynamicsState& x,
                                    const games::NormalFormGame& game,
                                    double epsilon) {
  const SymmetricLabels L = symmetric_labels(game);
  const double u = L.u();
  const double dp1 = u * x.p2 + 0.5 * (L.c - L.b) * x.w1 + (L.b - L.d);
  const double dp2 = u * x.p1 + 0.5 * (L.c - L.b) * x.w2 + (L.b - L.d);
  const double dw1 = epsilon * (L.b - L.c) * (x.p1 - x.p2);
  const double dw2 = epsilon * (L.b - L.c) * (x.p2 - x.p1);
  return {dp1, dp2, dw1, dw2};
}

std::array<double, 4> coordination_rhs(const DynamicsState& x,
                                       const games::NormalFormGame& game,
                                       double epsilon) {
  const CoordinationLabels L = coordination_labels(game);
  const double u1 = L.R + L.P - L.S - L.T;
  const double u2 = L.r + L.p - L.s - L.t;
  const double c1 = L.S - L.P, c2 = L.s - L.p;
  const double d1 = L.T - L.P, d2 = L.t - L.p;
  const double e1 = L.P - L.p;
  const double dp1 = (u1 + 0.5 * (u2 - u1) * x.w1) * x.p2 + 0.5 * (d2 - c1) * x.w1 + c1;
  const double dp2 = (u2 + 0.5 * (u1 - u2) * x.w2) * x.p1 + 0.5 * (d1 - c2) * x.w2 + c2;
  const double dw1 = epsilon * (((u1 - u2) * (x.p1 * x.p2) + (c1 - d2) * x.p1) +
                                ((d1 - c2) * x.p2 + e1));
  return {dp1, dp2, dw1, -dw1};
}

namespace {

Vec4 axpy(const Vec4& x, double h, const Vec4& k) {
  return {x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2], x[3] + h * k[3]};
}

Vec4 clamp01(Vec4 v) {
  for (double& c : v) c = std::min(1.0, std::max(0.0, c));
  return v;
}

bool all_finite(const Vec4& v) {
  for (double c : v)
    if (!std::isfinite(c)) return false;
  return true;
}

double max_abs(const Vec4& v) {
  double m = 0;
  for (double c : v) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

Trajectory integrate(const DynamicsParams& params, const DynamicsState& x0,
                     double dt, long steps, bool projected, int record_every) {
  if (!(dt > 0)) throw ContractViolation("integration step must be positive");
  if (steps < 1) throw ContractViolation("need at least one integration step");
  if (record_every < 1) record_every = 1;

  Trajectory traj;
  traj.params = params;
  traj.dt = dt;
  traj.projected = projected;

  const auto f = [&](const Vec4& y) {
    return saiga_rhs(DynamicsState::from_array(projected ? clamp01(y) : y), params);
  };

  Vec4 x = x0.to_array();
  if (projected) x = clamp01(x);
  traj.times.push_back(0.0);
  traj.states.push_back(DynamicsState::from_array(x));

  for (long k = 0; k < steps; ++k) {
    const Vec4 k1 = f(x);
    const Vec4 k2 = f(axpy(x, 0.5 * dt, k1));
    const Vec4 k3 = f(axpy(x, 0.5 * dt, k2));
    const Vec4 k4 = f(axpy(x, dt, k3));
    for (int i = 0; i < 4; ++i)
      x[static_cast<size_t>(i)] +=
          dt / 6.0 * (k1[static_cast<size_t>(i)] + 2 * k2[static_cast<size_t>(i)] +
                      2 * k3[static_cast<size_t>(i)] + k4[static_cast<size_t>(i)]);
    if (projected) x = clamp01(x);
    if (!all_finite(x)) throw IntegrationError("non-finite state", k);
    if ((k + 1) % record_every == 0 || k + 1 == steps) {
      traj.times.push_back(static_cast<double>(k + 1) * dt);
      traj.states.push_back(DynamicsState::from_array(x));
    }
  }
  return traj;
}

Matrix4 linearize(const DynamicsParams& P, const DynamicsState& x) {
  const double u1 = P.u[0], u2 = P.u[1];
  const double c1 = P.c[0], c2 = P.c[1];
  const double d1 = P.d[0], d2 = P.d[1];
  const double eps = P.epsilon;
  Matrix4 J{};
  J[0][1] = u1 + 0.5 * (u2 - u1) * x.w1;
  J[0][2] = 0.5 * (u2 - u1) * x.p2 + 0.5 * (d2 - c1);
  J[1][0] = u2 + 0.5 * (u1 - u2) * x.w2;
  J[1][3] = 0.5 * (u1 - u2) * x.p1 + 0.5 * (d1 - c2);
  J[2][0] = eps * ((u1 - u2) * x.p2 + (c1 - d2));
  J[2][1] = eps * ((u1 - u2) * x.p1 + (d1 - c2));
  J[3][0] = -J[2][0];
  J[3][1] = -J[2][1];
  return J;
}

Matrix4 symmetric_stability_matrix(const SymmetricLabels& L, double epsilon) {
  const double u = L.u();
  const double cb = L.c - L.b;
  Matrix4 A{};
  A[0][1] = u;
  A[0][2] = cb;
  A[1][0] = u;
  A[1][3] = cb;
  A[2][0] = -epsilon * cb;
  A[2][1] = epsilon * cb;
  A[3][0] = epsilon * cb;
  A[3][1] = -epsilon * cb;
  return A;
}

std::array<std::complex<double>, 4> eigenvalues_4x4(const Matrix4& m) {
  Eigen::Matrix4d em;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      em(i, j) = m[static_cast<size_t>(i)][static_cast<size_t>(j)];
  Eigen::EigenSolver<Eigen::Matrix4d> solver(em, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigenvalue iteration did not converge");
  std::array<std::complex<double>, 4> ev;
  for (int i = 0; i < 4; ++i) ev[static_cast<size_t>(i)] = solver.eigenvalues()(i);
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    if (std::abs(a.imag()) != std::abs(b.imag()))
      return std::abs(a.imag()) < std::abs(b.imag());
    return a.imag() < b.imag();
  });
  return ev;
}

namespace {

// Closure of {w in [0,1] : s*w + k > 0} (or < 0 when `greater` is false).
Interval half_line_range(double s, double k, bool greater) {
  Interval none{1, 0};
  if (s == 0) return (greater ? k > 0 : k < 0) ? Interval{0, 1} : none;
  const double cut = -k / s;
  const bool above = (s > 0) == greater;  // admissible side is w > cut
  if (above) {
    if (cut >= 1) return none;
    return Interval{std::max(0.0, cut), 1.0};
  }
  if (cut <= 0) return none;
  return Interval{0.0, std::min(1.0, cut)};
}

std::vector<std::complex<double>> eigs_at(const DynamicsParams& params,
                                          const DynamicsState& x) {
  const auto ev = eigenvalues_4x4(linearize(params, x));
  return {ev.begin(), ev.end()};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::vector<EquilibriumReport> symmetric_equilibria(const games::NormalFormGame& game,
                                                    double epsilon) {
  const SymmetricLabels L = symmetric_labels(game);
  if (!(epsilon > 0)) throw ContractViolation("epsilon must be positive");
  const DynamicsParams params = DynamicsParams::from_game(game, epsilon);
  const double s = 0.5 * (L.c - L.b);
  const double u = L.u();
  std::vector<EquilibriumReport> out;

  const auto corner_family = [&](double corner, double slope, double offset,
                                 bool greater, const std::string& cond) {
    const Interval range = half_line_range(slope, offset, greater);
    if (range.empty()) return;
    EquilibriumReport rep;
    rep.kind = EqKind::BoundaryType1;
    rep.stable = Stability::Stable;
    const double wm = 0.5 * (range.lo + range.hi);
    rep.point = {corner, corner, wm, wm};
    rep.w1_range = rep.w2_range = range;
    rep.condition = cond + "  =>  w* in [" + fmt(range.lo) + ", " + fmt(range.hi) +
                    "] (strict at the interior cut)";
    rep.eigenvalues = eigs_at(params, rep.point);
    out.push_back(std::move(rep));
  };

  // p stays pinned at a corner while the inward flow condition holds; the
  // attitude flow vanishes there because p1 == p2.
  corner_family(0.0, s, L.b - L.d, /*greater=*/false,
                "(c-b)/2 w* + b-d < 0");
  corner_family(1.0, s, L.a - L.c, /*greater=*/true,
                "(c-b)/2 w* + a-c > 0");

  const auto corner_pair = [&](DynamicsState x1, DynamicsState x2,
                               const std::string& cond) {
    for (const DynamicsState& x : {x1, x2}) {
      EquilibriumReport rep;
      rep.kind = EqKind::BoundaryType2;
      rep.stable = Stability::Stable;
      rep.point = x;
      rep.condition = cond;
      rep.eigenvalues = eigs_at(params, x);
      out.push_back(std::move(rep));
    }
  };
  if (L.c > L.b && L.b > L.d && L.b + L.c > 2 * L.a)
    corner_pair({1, 0, 0, 1}, {0, 1, 1, 0}, "c>b>d and b+c>2a");
  if (L.b > L.c && L.c > L.a && L.b + L.c > 2 * L.d)
    corner_pair({1, 0, 1, 0}, {0, 1, 0, 1}, "b>c>a and b+c>2d");

  if (u == 0) {
    EquilibriumReport rep;
    rep.kind = EqKind::Degenerate;
    rep.stable = Stability::Marginal;
    rep.point = {0.5, 0.5, 0.5, 0.5};
    rep.condition = "u = a+d-b-c = 0: interior equilibria are not a transverse line";
    out.push_back(std::move(rep));
    return out;
  }

  const double slope = (L.b - L.c) / (2 * u);
  const double intercept = (L.d - L.b) / u;
  // w-range on which p*(w) = slope*w + intercept stays inside [0,1]
  Interval wr{0, 1};
  if (slope != 0) {
    double w_at_p0 = (0.0 - intercept) / slope;
    double w_at_p1 = (1.0 - intercept) / slope;
    if (w_at_p0 > w_at_p1) std::swap(w_at_p0, w_at_p1);
    wr.lo = std::max(0.0, w_at_p0);
    wr.hi = std::min(1.0, w_at_p1);
  } else if (intercept < 0 || intercept > 1) {
    wr = {1, 0};
  }
  if (!wr.empty()) {
    EquilibriumReport rep;
    rep.kind = EqKind::InteriorLine;
    rep.stable = Stability::Unstable;
    const double wm = 0.5 * (wr.lo + wr.hi);
    const double pm = slope * wm + intercept;
    rep.point = {pm, pm, wm, wm};
    rep.line_slope = slope;
    rep.line_intercept = intercept;
    rep.line_w_range = wr;
    rep.condition = "p* = " + fmt(slope) + " w* + " + fmt(intercept) +
                    ", w* in [" + fmt(wr.lo) + ", " + fmt(wr.hi) + "]";
    rep.eigenvalues = eigs_at(params, rep.point);
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<EquilibriumReport> coordination_equilibria(const games::NormalFormGame& game,
                                                       double epsilon) {
  const CoordinationLabels L = coordination_labels(game);
  if (!(epsilon > 0)) throw ContractViolation("epsilon must be positive");
  const DynamicsParams params = DynamicsParams::from_game(game, epsilon);
  std::vector<EquilibriumReport> out;

  // At a corner with p1 == p2, w is driven to (1,0) or (0,1) by the sign of
  // the payoff difference V1 - V2, or free when it vanishes. The corner is an
  // equilibrium iff the p-flow points into it there.
  const auto corner_reports = [&](double q) {
    const double delta = q == 0 ? L.P - L.p : L.R - L.r;  // V1 - V2 at the corner
    const char* dname = q == 0 ? "P-p" : "R-r";
    const auto p_rate = [&](const DynamicsState& x) {
      return saiga_rhs(x, params);
    };
    const bool inward_needs_positive = q == 1;
    if (delta != 0) {
      const DynamicsState x{q, q, delta > 0 ? 1.0 : 0.0, delta > 0 ? 0.0 : 1.0};
      const auto rhs = p_rate(x);
      const bool ok = inward_needs_positive ? (rhs[0] > 0 && rhs[1] > 0)
                                            : (rhs[0] < 0 && rhs[1] < 0);
      if (!ok) return;
      EquilibriumReport rep;
      rep.kind = EqKind::BoundaryType1;
      rep.stable = Stability::Stable;
      rep.point = x;
      rep.w1_range = Interval{x.w1, x.w1};
      rep.w2_range = Interval{x.w2, x.w2};
      rep.condition = std::string(dname) + " = " + fmt(delta) + " drives (w1,w2) -> (" +
                      fmt(x.w1) + "," + fmt(x.w2) + "); p1' = " + fmt(rhs[0]) +
                      ", p2' = " + fmt(rhs[1]) + " point inward";
      rep.eigenvalues = eigs_at(params, x);
      out.push_back(std::move(rep));
      return;
    }
    // delta == 0: attitudes are free wherever the p-flow still points inward.
    // Both p-rates are affine in the own attitude at the corner.
    const double u1 = L.R + L.P - L.S - L.T, u2 = L.r + L.p - L.s - L.t;
    const double c1 = L.S - L.P, c2 = L.s - L.p;
    const double d1 = L.T - L.P, d2 = L.t - L.p;
    double s1, k1, s2, k2;
    if (q == 0) {
      s1 = 0.5 * (d2 - c1), k1 = c1;
      s2 = 0.5 * (d1 - c2), k2 = c2;
    } else {
      s1 = 0.5 * ((u2 - u1) + (d2 - c1)), k1 = u1 + c1;
      s2 = 0.5 * ((u1 - u2) + (d1 - c2)), k2 = u2 + c2;
    }
    const Interval r1 = half_line_range(s1, k1, inward_needs_positive);
    const Interval r2 = half_line_range(s2, k2, inward_needs_positive);
    if (r1.empty() || r2.empty()) return;
    EquilibriumReport rep;
    rep.kind = EqKind::BoundaryType1;
    rep.stable = Stability::Stable;
    rep.point = {q, q, 0.5 * (r1.lo + r1.hi), 0.5 * (r2.lo + r2.hi)};
    rep.w1_range = r1;
    rep.w2_range = r2;
    rep.condition = std::string(dname) + " = 0: attitudes free with w1* in [" +
                    fmt(r1.lo) + ", " + fmt(r1.hi) + "], w2* in [" + fmt(r2.lo) +
                    ", " + fmt(r2.hi) + "] keeping the p-flow inward";
    rep.eigenvalues = eigs_at(params, rep.point);
    out.push_back(std::move(rep));
  };
  corner_reports(0.0);
  corner_reports(1.0);

  for (const DynamicsState& root : find_interior_equilibria(params)) {
    EquilibriumReport rep;
    rep.kind = EqKind::InteriorPoint;
    rep.stable = Stability::Unstable;
    rep.point = root;
    rep.condition = "interior zero of the flow";
    rep.eigenvalues = eigs_at(params, root);
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<DynamicsState> find_interior_equilibria(const DynamicsParams& params) {
  constexpr double kResidualTol = 1e-10;
  constexpr double kDedupe = 1e-6;
  const std::array<double, 5> grid{0.1, 0.3, 0.5, 0.7, 0.9};

  std::vector<DynamicsState> roots;
  const auto already_known = [&](const Vec4& x) {
    for (const DynamicsState& r : roots) {
      const Vec4 ra = r.to_array();
      double dist = 0;
      for (int i = 0; i < 4; ++i)
        dist = std::max(dist, std::abs(ra[static_cast<size_t>(i)] - x[static_cast<size_t>(i)]));
      if (dist < kDedupe) return true;
    }
    return false;
  };

  for (double g0 : grid)
    for (double g1 : grid)
      for (double g2 : grid)
        for (double g3 : grid) {
          Vec4 x{g0, g1, g2, g3};
          double lambda = 1e-3;
          bool converged = false;
          Vec4 fx = saiga_rhs(DynamicsState::from_array(x), params);
          for (int iter = 0; iter < 120; ++iter) {
            if (max_abs(fx) <= 1e-13) {
              converged = true;
              break;
            }
            const Matrix4 Jm = linearize(params, DynamicsState::from_array(x));
            Eigen::Matrix4d J;
            Eigen::Vector4d F;
            for (int i = 0; i < 4; ++i) {
              F(i) = fx[static_cast<size_t>(i)];
              for (int j = 0; j < 4; ++j)
                J(i, j) = Jm[static_cast<size_t>(i)][static_cast<size_t>(j)];
            }
            // Damped Gauss-Newton step; the damping keeps the solve well
            // posed on the rank-deficient zero sets of symmetric games.
            bool stepped = false;
            for (int tries = 0; tries < 16 && !stepped; ++tries) {
              const Eigen::Matrix4d H =
                  J.transpose() * J + lambda * Eigen::Matrix4d::Identity();
              const Eigen::Vector4d delta = H.ldlt().solve(-J.transpose() * F);
              Vec4 xn;
              for (int i = 0; i < 4; ++i)
                xn[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] + delta(i);
              const Vec4 fn = saiga_rhs(DynamicsState::from_array(xn), params);
              if (all_finite(fn) && max_abs(fn) < max_abs(fx)) {
                x = xn;
                fx = fn;
                lambda = std::max(1e-12, lambda / 3);
                stepped = true;
              } else {
                lambda *= 10;
              }
            }
            if (!stepped) break;
          }
          if (!converged) {
            fx = saiga_rhs(DynamicsState::from_array(x), params);
            if (max_abs(fx) > kResidualTol) continue;
          }
          bool interior = true;
          for (double c : x) interior = interior && c > 1e-9 && c < 1 - 1e-9;
          if (!interior || already_known(x)) continue;
          roots.push_back(DynamicsState::from_array(x));
        }

  std::sort(roots.begin(), roots.end(), [](const DynamicsState& a, const DynamicsState& b) {
    return a.to_array() < b.to_array();
  });
  return roots;
}

const char* to_string(EqKind k) {
  switch (k) {
    case EqKind::BoundaryType1: return "boundary_type1";
    case EqKind::BoundaryType2: return "boundary_type2";
    case EqKind::InteriorLine: return "interior_line";
    case EqKind::InteriorPoint: return "interior_point";
    case EqKind::Degenerate: return "degenerate";
  }
  return "?";
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,p1,p2,w1,w2\n";
  char buf[160];
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const DynamicsState& s = traj.states[i];
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g\n", traj.times[i],
                  s.p1, s.p2, s.w1, s.w2);
    out << buf;
  }
}

std::string equilibria_to_json(const std::vector<EquilibriumReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const EquilibriumReport& rep : reports) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(rep.kind);
    j["stable"] = to_string(rep.stable);
    j["point"] = {rep.point.p1, rep.point.p2, rep.point.w1, rep.point.w2};
    nlohmann::ordered_json evs = nlohmann::ordered_json::array();
    for (const auto& ev : rep.eigenvalues) evs.push_back({ev.real(), ev.imag()});
    j["eigenvalues"] = evs;
    j["condition"] = rep.condition;
    if (rep.w1_range) j["w1_range"] = {rep.w1_range->lo, rep.w1_range->hi};
    if (rep.w2_range) j["w2_range"] = {rep.w2_range->lo, rep.w2_range->hi};
    if (rep.line_slope) {
      j["line"] = {{"slope", *rep.line_slope},
                   {"intercept", *rep.line_intercept},
                   {"w_range", {rep.line_w_range->lo, rep.line_w_range->hi}}};
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

}  // namespace saga::dynamics
