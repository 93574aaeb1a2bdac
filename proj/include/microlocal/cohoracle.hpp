#pragma once

// Cellular oracle for truncated microsupports of constant sheaves k_S on
// locally closed polyhedral sets of dimension <= 2. Balls are replaced by
// rational 16-gon windows and germs by agreement at two radii.

#include "microlocal/geometry.hpp"
#include "microlocal/scalar_field.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace microlocal {

/// Degree -> rank; only nonzero ranks are stored.
using CohomologyRanks = std::map<int, std::size_t>;

bool all_zero(const CohomologyRanks& r);
long euler_characteristic(const CohomologyRanks& r);

/// Cell decomposition of a convex polygon by lines, with exact rational
/// vertices. Edge e has boundary vertices[e[1]] - vertices[e[0]]; a face
/// lists its boundary edges with orientation signs (counterclockwise).
struct PlanarComplex {
  std::vector<Vec> vertices;
  std::vector<std::array<std::size_t, 2>> edges;
  std::vector<std::vector<std::pair<std::size_t, int>>> faces;
  /// Relative interior point of every cell, by dimension.
  std::array<std::vector<Vec>, 3> samples;

  /// Splits `window` (a convex counterclockwise polygon) by every line
  /// {y : <a, y> = b} with a != 0.
  static PlanarComplex arrangement(const std::vector<Vec>& window, const std::vector<Halfspace>& lines);

  std::size_t cell_count(int dim) const { return samples[static_cast<std::size_t>(dim)].size(); }
  /// The cells whose relative interior lies in a closed set whose
  /// boundary lines are among the arrangement lines.
  std::array<std::vector<bool>, 3> cells_in(const PolyhedralSet& s) const;
  bool boundary_squared_zero() const;
  long euler_characteristic() const;
};

using CellMask = std::array<std::vector<bool>, 3>;

/// H^j(A, B) of subcomplexes B in A over Q. Throws InvalidArgument when B
/// is not a subcomplex of A.
CohomologyRanks pair_cohomology(const PlanarComplex& k, const CellMask& a, const CellMask& b);

/// Counterclockwise 16-gon with rational vertices on the circle of the given
/// radius around `center`.
std::vector<Vec> regular_window(const Vec& center, const Rational& radius);

/// H^j(A n W, B n W) for closed planar sets B in A and a convex window W.
CohomologyRanks pair_cohomology(const PolyhedralSet& a, const PolyhedralSet& b, const std::vector<Vec>& window);

struct LocalCohomology {
  CohomologyRanks local;       // H^j_{phi >= 0}(k_S)_x
  CohomologyRanks ball;        // RGamma(B; k_S)
  CohomologyRanks complement;  // RGamma(B \ Z; k_S)
  Rational radius;             // the radius at which the germ stabilized
};

struct LocalCohomologyOptions {
  /// First radius; the default is half the distance to the nearest boundary
  /// line missing x, rounded down to a power of two and capped at 1.
  std::optional<Rational> radius;
  /// Second radius; defaults to radius / 2.
  std::optional<Rational> inner_radius;
  /// Halvings tried after a disagreement before giving up.
  int retries = 3;
};

/// Largest power of two at most half the distance from x to every boundary
/// line of S that misses x (capped at 1).
Rational feature_radius(const LocallyClosedPolyhedralSet& s, const Vec& x);

/// Local cohomology of k_S at x with supports in {phi >= 0}. One-dimensional
/// inputs are computed on S x R. Throws InvalidArgument if phi is not affine
/// or phi(x) != 0, NotInSet if x is not in the closure of S, Unsupported
/// above dimension 2, and Unstable when the radii never agree.
LocalCohomology local_cohomology(const LocallyClosedPolyhedralSet& s, const Vec& x, const ScalarField& phi,
                                 const LocalCohomologyOptions& options = {});
LocalCohomology local_cohomology(const LocallyClosedPolyhedralSet& s, const Vec& x, const Vec& covector,
                                 const LocalCohomologyOptions& options = {});

struct SskTestOptions {
  /// Base displacement and covector tilt of the star stencil.
  Rational stencil_radius = ratio(1, 1024);
  /// Base directions of the stencil in the plane; the line uses +-1.
  std::vector<Vec> stencil_directions = {Vec{1, 0}, Vec{-1, 0}, Vec{0, 1}, Vec{0, -1},
                                         Vec{1, 1}, Vec{-1, -1}, Vec{1, -1}, Vec{-1, 1}};
  /// 0 reads MICROLOCAL_THREADS, then falls back to the hardware count.
  unsigned threads = 0;
  int retries = 3;
};

struct ProbeVerdict {
  enum class Status { In, Out, Unstable };
  Status status = Status::Out;
  /// Lowest degree with a nonzero local cohomology rank over the stencil.
  std::optional<int> first_degree;
};

const char* status_name(ProbeVerdict::Status s);

/// Evidence of membership in SS_k(k_S) for each probe (x; xi). A probe is in
/// when some stencil neighbour has a nonzero H^j_{phi >= 0} with j <= k for
/// phi = <xi, . - x>; out when all of them vanish; unstable otherwise.
std::vector<ProbeVerdict> ssk_definition_test(const LocallyClosedPolyhedralSet& s, int k,
                                              const std::vector<CotangentPoint>& probes,
                                              const SskTestOptions& options = {});

/// The sixteen rational directions (1,0), (2,1), (1,1), (1,2), ... of the
/// plane, or +-1 on the line; `with_zero` prepends the zero covector.
std::vector<Vec> probe_covectors(std::size_t n, bool with_zero = false);

/// Base points lo + i (hi - lo) / (steps - 1) in every coordinate, crossed
/// with the covectors.
std::vector<CotangentPoint> probe_grid(std::size_t n, const Rational& lo, const Rational& hi, int steps,
                                       const std::vector<Vec>& covectors);

/// Thread count from MICROLOCAL_THREADS or the hardware.
unsigned default_thread_count();

}  // namespace microlocal
