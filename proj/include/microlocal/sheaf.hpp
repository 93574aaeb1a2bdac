#pragma once

// Truncated microsupports of sheaves given by stratification data, the
// perversity criterion, and pruning by low-dimensional sets.

#include "microlocal/geometry.hpp"

#include <map>
#include <string>
#include <vector>

namespace microlocal {

/// F is microlocally k_Y (x) K on Lambda, with Lambda open in T*_Y X.
/// `lambda` stores the closed pieces of closure(Lambda); `degrees` are the j
/// with H^j(K) != 0.
struct StratumDatum {
  std::string id;
  LocallyClosedPolyhedralSet stratum;
  ConicSubset lambda;
  std::vector<int> degrees;
  std::map<int, int> rank_by_degree;

  int min_degree() const;
  int max_degree() const;
  /// Throws InvalidArgument when degrees are empty or lambda is not conormal
  /// to the stratum.
  void validate() const;
};

struct StratifiedSheafDescription {
  std::size_t dim = 0;
  std::vector<StratumDatum> strata;
  /// The union of the closures of the Lambda_alpha is asserted to contain SS(F).
  bool covers_microsupport = true;

  /// Unique ids, well-formed strata, pairwise disjoint bases.
  void validate() const;
  const StratumDatum& find(const std::string& id) const;
};

/// Union of closure(Lambda_alpha) over alpha with min degree <= k.
ConicSubset ssk_from_strata(const StratifiedSheafDescription& d, int k);

/// SS_0(k_S) = N*_0(S) for closed S.
ConicSubset ss0_constant(const PolyhedralSet& s);

/// Closure of the conormal bundle of a stratum: each closure piece times the
/// annihilator of its direction space.
ConicSubset conormal_bundle_closure(const LocallyClosedPolyhedralSet& y);

/// Union of the conormals of strata with codim <= k; empty for k < 0. Throws
/// MissingCodimension when a conormal has no codimension.
ConicSubset perverse_ssk(const std::map<std::string, int>& codims,
                         const std::map<std::string, ConicSubset>& conormals, int k);

struct PerversityReport {
  bool perverse = true;
  int first_failure = 0;  // meaningful when !perverse
  int k_min = 0;
  int k_max = 0;
};

/// SS_k(F) u SS_k(D F) is contained in the perverse bound for every k in the
/// active range. Throws StratumMismatch if the descriptions do not share
/// strata and MissingCodimension if a stratum has no codimension.
PerversityReport perversity_check(const StratifiedSheafDescription& f, const StratifiedSheafDescription& dual,
                                  const std::map<std::string, int>& codims);

struct PruneReport {
  bool invariant = true;
  std::string reason;  // empty or "s_not_lower_dimensional_relative_to_a"
};

/// closure(A \ S) = A, with S a union of pieces of dimension < n in T*R^n.
/// Throws NotLowDimensional when a piece of S has dimension >= n.
PruneReport prune_invariance(const ConicSubset& a, const ConicSubset& s);

/// Dimension of base x fiber as a polyhedron in R^2n (-1 if empty).
int piece_dimension(const ConicPiece& p);

}  // namespace microlocal
