#pragma once

// The 0-conormal cone N*_0(S) of a closed polyhedral set and the tests that
// characterize it.

#include "microlocal/geometry.hpp"
#include "microlocal/scalar_field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace microlocal {

struct BallTestParams {
  enum class Mode { Exact, Floating };

  std::vector<Rational> t_grid;  // strictly decreasing, positive
  Mode mode = Mode::Exact;
  /// When the grid is exhausted, fall back to the half-space test.
  bool strict = false;

  /// 2^-1, 2^-2, ..., 2^-20, exact mode.
  static BallTestParams defaults();
  void validate() const;
};

/// C_x(S) lies in {<v, xi> >= 0}. Throws NotInSet if x is not in S.
bool conormal0_halfspace_test(const PolyhedralSet& s, const Vec& x, const Vec& xi);

/// Some open ball B_{t|xi|}(x - t xi), t in the grid, misses S.
bool conormal0_ball_test(const PolyhedralSet& s, const Vec& x, const Vec& xi,
                         const BallTestParams& params = BallTestParams::defaults());

/// Exact descriptor of N*_0(S): the zero section over every piece plus, for
/// each relatively open cell of the arrangement of S on which the tangent
/// cone has a nonzero polar, closure(cell) x polar.
ConicSubset conormal0(const PolyhedralSet& s);

struct SweepParams {
  ConvexCone gamma;
  Rational epsilon;
  Vec v;
  Rational delta;
  Rational rho;

  /// Throws ParameterInconsistency.
  void validate() const;
};

/// U = {(x; xi) : |x - center| < radius, xi in fiber \ 0}.
struct ConicNeighborhood {
  Vec center;
  Rational radius;
  ConvexCone fiber;

  bool contains(const CotangentPoint& p) const;
};

/// Parameters in the style of the existence argument: gamma polar to a small
/// polyhedral cone around xi_0, then rho, delta, epsilon shrunk until the
/// localization conditions hold exactly. The neighborhood is B_radius(x_0) x
/// (gamma° \ 0).
struct SweepSetup {
  SweepParams params;
  ConicNeighborhood neighborhood;
};

SweepSetup derive_sweep_setup(const PolyhedralSet& s, const CotangentPoint& p, const Rational& radius);

struct SweepResult {
  CotangentPoint point;   // (x_1; xi_1)
  Rational c_lower;       // W_t misses S_0 at t = c_lower
  Rational c_upper;       // and meets it at t = c_upper
  Vec ball_center;        // y, nearest point of x_0 + c_lower v + gamma^a
  Rational squared_radius;
  bool ball_test = false;
  int bisection_steps = 0;
};

/// Sweeps W_t = x_0 + gamma^a_eps + t v towards S_0 = S cap closure(H_-)
/// and returns the first contact point with its exterior ball.
SweepResult sweep_support_search(const PolyhedralSet& s, const CotangentPoint& p, const SweepParams& params,
                                 const ConicNeighborhood& u, int max_bisection_steps = 48);

/// x -> linear * x + offset with linear of size n x m.
struct AffineMap {
  std::vector<Vec> linear;
  Vec offset;

  std::size_t source_dim() const { return linear.empty() ? 0 : linear.front().size(); }
  std::size_t target_dim() const { return linear.size(); }
  Vec apply(const Vec& x) const;
  PolyhedralSet image(const PolyhedralSet& s) const;
};

/// N*_0(f(S)) as the pushforward of N*_0(S) along an injective affine map.
ConicSubset embed_conormal(const PolyhedralSet& s, const AffineMap& f);

/// Every fiber of N*_0(S) is {0}.
bool openness_criterion(const PolyhedralSet& s);

struct MinPrincipleReport {
  Vec minimizer;
  Rational min_value;
  Vec differential;
  bool in_conormal = false;
};

/// Minimizes an affine or convex quadratic f (base variables only) over S
/// exactly through the KKT system of each face, then checks df(x*) in
/// N*_0(S). Throws UnboundedBelow if f is unbounded below on S and
/// Unsupported for other f.
MinPrincipleReport min_principle_check(const ScalarField& f, const PolyhedralSet& s);

struct ProperConeProbe {
  std::optional<CotangentPoint> witness;  // nullopt: S is empty
  bool verified = false;                  // witness is in N*_0(S) with xi in Int(gamma°)
};

ProperConeProbe proper_cone_probe(const PolyhedralSet& s, const ConvexCone& gamma);

}  // namespace microlocal
