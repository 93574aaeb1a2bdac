#pragma once

// Exact polyhedral and conic primitives in R^n and T*R^n = R^n x R^n.
//
// Every predicate here is decided in exact rational arithmetic. Distances are
// reported both as an exact squared value and as a double.

#include "microlocal/lp.hpp"
#include "microlocal/rational.hpp"

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

namespace microlocal {

/// The closed half-space {x : <normal, x> >= offset}.
struct Halfspace {
  Vec normal;
  Rational offset;
};

class ConvexPolyhedron {
 public:
  ConvexPolyhedron() = default;
  ConvexPolyhedron(std::size_t dim, std::vector<Halfspace> halfspaces);
  ConvexPolyhedron(const ConvexPolyhedron& other);
  ConvexPolyhedron(ConvexPolyhedron&& other) noexcept;
  ConvexPolyhedron& operator=(const ConvexPolyhedron& other);
  ConvexPolyhedron& operator=(ConvexPolyhedron&& other) noexcept;

  static ConvexPolyhedron whole(std::size_t dim);
  static ConvexPolyhedron point(const Vec& x);
  static ConvexPolyhedron box(const Vec& lo, const Vec& hi);
  /// {x : <a, x> = b}
  static ConvexPolyhedron hyperplane(const Vec& a, const Rational& b);

  std::size_t dim() const { return dim_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

  bool contains(const Vec& x) const;
  bool is_empty() const;
  bool is_bounded() const;
  /// Dimension of the affine hull; -1 for the empty set.
  int affine_dimension() const;
  /// A point of the relative interior, or nullopt if empty.
  std::optional<Vec> relative_interior_point() const;
  /// Indices of constraints that hold with equality on the whole polyhedron.
  std::vector<std::size_t> implicit_equalities() const;

  std::vector<lp::LinearConstraint> constraints() const;
  ConvexPolyhedron intersect(const ConvexPolyhedron& other) const;
  ConvexPolyhedron with(Halfspace h) const;
  /// Same set with duplicate and redundant constraints removed.
  ConvexPolyhedron simplified() const;
  /// other is a subset of *this
  bool contains_polyhedron(const ConvexPolyhedron& other) const;

 private:
  std::size_t dim_ = 0;
  std::vector<Halfspace> halfspaces_;
  mutable std::atomic<int> empty_state_{-1};
};

/// Finite union of closed convex polyhedra of one ambient dimension.
class PolyhedralSet {
 public:
  PolyhedralSet() = default;
  PolyhedralSet(std::size_t dim, std::vector<ConvexPolyhedron> pieces);

  static PolyhedralSet empty(std::size_t dim) { return PolyhedralSet(dim, {}); }
  static PolyhedralSet whole(std::size_t dim);

  std::size_t dim() const { return dim_; }
  const std::vector<ConvexPolyhedron>& pieces() const { return pieces_; }

  bool contains(const Vec& x) const;
  bool is_empty() const;
  bool is_bounded() const;

 private:
  std::size_t dim_ = 0;
  std::vector<ConvexPolyhedron> pieces_;
};

/// closure \ removed, with removed contained in closure.
class LocallyClosedPolyhedralSet {
 public:
  LocallyClosedPolyhedralSet() = default;
  LocallyClosedPolyhedralSet(PolyhedralSet closure, PolyhedralSet removed);
  static LocallyClosedPolyhedralSet closed(PolyhedralSet s);

  std::size_t dim() const { return closure_.dim(); }
  const PolyhedralSet& closure() const { return closure_; }
  const PolyhedralSet& removed() const { return removed_; }
  bool contains(const Vec& x) const;

 private:
  PolyhedralSet closure_;
  PolyhedralSet removed_;
};

/// Closed convex cone {v : <a, v> >= 0 for every listed normal a}.
class ConvexCone {
 public:
  ConvexCone() = default;
  ConvexCone(std::size_t dim, std::vector<Vec> normals);

  static ConvexCone whole(std::size_t dim) { return ConvexCone(dim, {}); }
  static ConvexCone zero(std::size_t dim);
  static ConvexCone orthant(std::size_t dim);
  /// The ray {t d : t >= 0}.
  static ConvexCone ray(const Vec& d);
  /// The line {t d : t real}.
  static ConvexCone line(const Vec& d);

  std::size_t dim() const { return dim_; }
  const std::vector<Vec>& normals() const { return normals_; }

  bool contains(const Vec& v) const;
  bool is_zero() const;
  ConvexPolyhedron as_polyhedron() const;
  std::vector<lp::LinearConstraint> constraints() const;
  /// other is a subset of *this
  bool contains_cone(const ConvexCone& other) const;
  ConvexCone intersect(const ConvexCone& other) const;
  int dimension() const { return as_polyhedron().affine_dimension(); }

 private:
  std::size_t dim_ = 0;
  std::vector<Vec> normals_;
};

bool cones_equal(const ConvexCone& a, const ConvexCone& b);

struct CotangentPoint {
  Vec x;
  Vec xi;
};

/// base x fiber
struct ConicPiece {
  ConvexPolyhedron base;
  ConvexCone fiber;
};

/// Closed fiberwise-conic subset of T*R^n. Stored exactly as a union of
/// closed base x fiber pieces, optionally with sample points; a subset built
/// from samples alone supports only estimates.
class ConicSubset {
 public:
  ConicSubset() = default;
  ConicSubset(std::size_t dim, std::vector<ConicPiece> pieces);
  static ConicSubset empty(std::size_t dim) { return ConicSubset(dim, {}); }
  static ConicSubset from_samples(std::size_t dim, std::vector<CotangentPoint> samples);
  /// Zero section over S.
  static ConicSubset zero_section(const PolyhedralSet& s);

  std::size_t dim() const { return dim_; }
  bool exact() const { return exact_; }
  const std::vector<ConicPiece>& pieces() const { return pieces_; }
  const std::vector<CotangentPoint>& samples() const { return samples_; }

  ConicSubset with_samples(std::vector<CotangentPoint> samples) const;

 private:
  std::size_t dim_ = 0;
  bool exact_ = true;
  std::vector<ConicPiece> pieces_;
  std::vector<CotangentPoint> samples_;
};

// --- cones -----------------------------------------------------------------

/// Cone generated by the given vectors, in H-representation.
ConvexCone cone_from_generators(std::size_t dim, const std::vector<Vec>& generators);

/// gamma° = {xi : <v, xi> >= 0 for all v in gamma}
ConvexCone polar_cone(const ConvexCone& gamma);

/// A closed convex cone is proper when its polar has nonempty interior.
bool is_proper_cone(const ConvexCone& gamma);

/// A point in the interior of gamma° (sum of gamma's normals); requires
/// gamma proper.
Vec interior_polar_direction(const ConvexCone& gamma);

// --- distances -------------------------------------------------------------

struct Projection {
  Rational squared_distance;
  double distance = 0.0;
  Vec nearest;
};

/// Nearest point of a nonempty convex polyhedron, exactly.
Projection dist_to_convex(const Vec& x, const ConvexPolyhedron& c);
/// Same, warm-started from a known point of c.
Projection dist_to_convex(const Vec& x, const ConvexPolyhedron& c, const Vec& feasible_start);

struct PolyhedraDistance {
  Rational squared_distance;
  Vec first;
  Vec second;
};

/// Closest pair between two nonempty polyhedra. If `strict_bound` is given,
/// returns nullopt unless the squared distance is < *strict_bound.
std::optional<PolyhedraDistance> closest_points(const ConvexPolyhedron& p, const ConvexPolyhedron& q,
                                                const std::optional<Rational>& strict_bound = std::nullopt);

// --- tangent and normal cones ----------------------------------------------

/// C_x(S) for polyhedral S, as the union of the feasible-direction cones of
/// the pieces containing x.
std::vector<ConvexCone> tangent_cone(const PolyhedralSet& s, const Vec& x);

/// Monte-Carlo under-approximation of C_p(S1, S2).
struct SampledCone {
  std::size_t dim = 0;
  std::vector<Vec> directions;
  bool under_approximation = true;
};

SampledCone normal_cone_pair_sampled(const PolyhedralSet& s1, const PolyhedralSet& s2, const Vec& p,
                                     std::size_t budget, std::uint64_t seed, const Rational& radius = 1);

// --- conic subsets -----------------------------------------------------------

ConicSubset antipodal(const ConicSubset& a);

/// Exact membership; throws EstimateOnly on samples-only subsets.
bool conic_membership(const ConicSubset& a, const CotangentPoint& p);

/// inner is a subset of outer (exact, both need pieces).
bool conic_contains(const ConicSubset& outer, const ConicSubset& inner);
bool conic_equal(const ConicSubset& a, const ConicSubset& b);
ConicSubset conic_union(const ConicSubset& a, const ConicSubset& b);
ConicSubset conic_product(const ConicSubset& a, const ConicSubset& b);
PolyhedralSet base_projection(const ConicSubset& a);

bool set_contains(const PolyhedralSet& outer, const PolyhedralSet& inner);
bool set_equal(const PolyhedralSet& a, const PolyhedralSet& b);
PolyhedralSet set_product(const PolyhedralSet& a, const PolyhedralSet& b);
ConvexPolyhedron polyhedron_product(const ConvexPolyhedron& a, const ConvexPolyhedron& b);
ConvexCone cone_product(const ConvexCone& a, const ConvexCone& b);

/// Fills the sample list of an exact subset: base points are projections of
/// random points of [-window, window]^n, fibers are projections of random
/// integer vectors rescaled to norm ~1. A fraction of samples has xi = 0.
ConicSubset sample_conic_subset(const ConicSubset& a, std::size_t count, std::uint64_t seed,
                                const Rational& window = 2);

}  // namespace microlocal
