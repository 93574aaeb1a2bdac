#pragma once

// Built-in instances: the two-half-plane union, the open half-line, the
// perversity instances, and the weak-involutivity catalog.

#include "microlocal/geometry.hpp"
#include "microlocal/scalar_field.hpp"
#include "microlocal/sheaf.hpp"

#include <map>
#include <string>
#include <vector>

namespace microlocal::fixtures {

/// S = {x1 >= 0} u {x2 >= 0} in R^2.
PolyhedralSet union_set();
/// Zero section over S, {x2 = 0, x1 <= 0, xi1 = 0, xi2 >= 0} and
/// {x1 = 0, x2 <= 0, xi2 = 0, xi1 >= 0}, written out by hand.
ConicSubset union_conormal();
/// The quadrant {(0, 0; xi1, xi2) : xi1, xi2 >= 0}.
ConicSubset origin_quadrant();
/// k_S on four strata: the interior (degree 0), the two boundary rays
/// (degree 0) and the origin (degree 1).
StratifiedSheafDescription union_strata();

/// Z = (0, oo) in R as a locally closed set.
LocallyClosedPolyhedralSet open_half_line();
/// k_Z on {x > 0} (degree 0) and {0} with covectors xi < 0 (degree 1).
StratifiedSheafDescription open_half_line_strata();
/// {(x; 0) : x >= 0}.
ConicSubset open_half_line_ss0();

struct PerversityInstance {
  std::string name;
  StratifiedSheafDescription f;
  StratifiedSheafDescription dual;
  std::map<std::string, int> codims;
  bool expected = false;
};

/// k_X; the line {x1 = 0} in degree 0 (fails); the same line in degree 1.
std::vector<PerversityInstance> perversity_instances();

struct InvolutivityFixture {
  std::string name;
  ConicSubset set;                       // exact pieces
  std::vector<ScalarField> generators;   // vanish on `set`, pairwise brackets vanish there
};

std::vector<InvolutivityFixture> involutivity_catalog();

}  // namespace microlocal::fixtures
