#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "saga/games.hpp"

namespace saga::dynamics {

// Joint state of two socially-aware gradient learners: action-0 probabilities
// p1, p2 and social attitudes w1, w2. Components live in [0,1] under projected
// integration; analysis routines accept unconstrained values.
struct DynamicsState {
  double p1 = 0, p2 = 0, w1 = 0, w2 = 0;

  std::array<double, 4> to_array() const { return {p1, p2, w1, w2}; }
  static DynamicsState from_array(const std::array<double, 4>& a) {
    return {a[0], a[1], a[2], a[3]};
  }
};

// Reduced-coefficient parameterization of the two-player dynamics plus the
// attitude/policy learning-rate ratio epsilon > 0.
struct DynamicsParams {
  std::array<double, 2> u{}, c{}, d{}, e{};
  double epsilon = 1.0;

  static DynamicsParams from_game(const games::NormalFormGame& game, double epsilon);
};

// Time derivative (p1', p2', w1', w2') of the coupled policy/attitude flow:
//   p_i' = (u_i + (u_-i - u_i)/2 w_i) p_-i + (d_-i - c_i)/2 w_i + c_i
//   w_i' = eps [ (u_i - u_-i) p_i p_-i + (c_i - d_-i) p_i + (d_i - c_-i) p_-i + e_i ]
// The w-flow is eps times the difference between the player's own expected
// payoff and the two-player average, so w1' + w2' = 0 identically.
std::array<double, 4> saiga_rhs(const DynamicsState& x, const DynamicsParams& params);

// Symmetric-game labels: cells (1,1)=a/a, (1,2)=b/c, (2,1)=c/b, (2,2)=d/d.
struct SymmetricLabels {
  double a = 0, b = 0, c = 0, d = 0;
  double u() const { return a + d - b - c; }
};
SymmetricLabels symmetric_labels(const games::NormalFormGame& game);

// Coordination-game labels: cells (1,1)=R/r, (1,2)=S/t, (2,1)=T/s, (2,2)=P/p
// with R>T, P>S, r>t, p>s.
struct CoordinationLabels {
  double R = 0, S = 0, T = 0, P = 0;
  double r = 0, s = 0, t = 0, p = 0;
};
// Throws ContractViolation naming the violated inequality.
CoordinationLabels coordination_labels(const games::NormalFormGame& game);

// Reduction of the flow for symmetric games:
//   p_i' = u p_-i + (c-b)/2 w_i + b - d,   w_i' = eps (b-c)(p_i - p_-i).
// Agrees with saiga_rhs on the same game to 1e-12.
std::array<double, 4> symmetric_rhs(const DynamicsState& x,
                                    const games::NormalFormGame& game,
                                    double epsilon);

// Reduction for general coordination games; w2' = -w1' always.
std::array<double, 4> coordination_rhs(const DynamicsState& x,
                                       const games::NormalFormGame& game,
                                       double epsilon);

struct Trajectory {
  std::vector<double> times;
  std::vector<DynamicsState> states;
  DynamicsParams params;
  std::string game_id;
  double dt = 0;
  bool projected = true;
};

// Fixed-step classic Runge-Kutta integration. When projected, every state fed
// to the right-hand side and every stored state is clamped to [0,1]^4.
// Throws IntegrationError (with the step index) on non-finite states.
Trajectory integrate(const DynamicsParams& params, const DynamicsState& x0,
                     double dt, long steps, bool projected, int record_every = 1);

enum class EqKind { BoundaryType1, BoundaryType2, InteriorLine, InteriorPoint, Degenerate };
enum class Stability { Stable, Unstable, Marginal };

const char* to_string(EqKind k);
const char* to_string(Stability s);

struct Interval {
  double lo = 0, hi = 0;
  bool empty() const { return !(lo <= hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// One equilibrium or one family of equilibria of the projected flow.
// Families carry their parameter ranges instead of being enumerated.
struct EquilibriumReport {
  EqKind kind;
  Stability stable;
  DynamicsState point;  // representative member
  std::vector<std::complex<double>> eigenvalues;  // of the Jacobian at `point`
  std::string condition;  // the inequality the family satisfies

  // Boundary families: the corner and the admissible attitude ranges.
  std::optional<Interval> w1_range, w2_range;
  // Interior line p* = line_slope * w* + line_intercept with w* in line_w_range
  // (and p1=p2=p*, w1=w2=w*).
  std::optional<double> line_slope, line_intercept;
  std::optional<Interval> line_w_range;
};

// Equilibrium structure of a symmetric game: corner families (0,0,w*,w*) /
// (1,1,w*,w*) with their stability ranges, anti-coordination corner quadruples
// when the label inequalities admit them, and the unstable interior line.
std::vector<EquilibriumReport> symmetric_equilibria(const games::NormalFormGame& game,
                                                    double epsilon);

// Equilibrium structure of a general coordination game: stable boundary
// points/families at (0,0) and (1,1) decided by the inward flow, plus
// numerically located interior equilibria (unstable).
std::vector<EquilibriumReport> coordination_equilibria(const games::NormalFormGame& game,
                                                       double epsilon);

// Multi-start damped Newton search for interior zeros of the flow. Returns
// distinct roots in (0,1)^4 with max-norm residual <= 1e-10, deduplicated at
// distance 1e-6, in lexicographic order.
std::vector<DynamicsState> find_interior_equilibria(const DynamicsParams& params);

using Matrix4 = std::array<std::array<double, 4>, 4>;

// Analytic Jacobian of saiga_rhs at a point.
Matrix4 linearize(const DynamicsParams& params, const DynamicsState& x);

// The constant system matrix used in the symmetric-game stability argument
// (attitude coupling entering unhalved):
//   [ 0        u        c-b   0   ]
//   [ u        0        0     c-b ]
//   [ eps(b-c) eps(c-b) 0     0   ]
//   [ eps(c-b) eps(b-c) 0     0   ]
// Its spectrum contains 0 and u; see symmetric_equilibria tests.
Matrix4 symmetric_stability_matrix(const SymmetricLabels& labels, double epsilon);

// All four eigenvalues, conjugate pairs adjacent, sorted by (re, im).
// Throws NumericalError if the solver does not converge.
std::array<std::complex<double>, 4> eigenvalues_4x4(const Matrix4& m);

// CSV with header t,p1,p2,w1,w2.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

// JSON array of {point, kind, stable, eigenvalues, condition, ...} records.
std::string equilibria_to_json(const std::vector<EquilibriumReport>& reports);

}  // namespace saga::dynamics
