#include "microlocal/sheaf.hpp"

#include "microlocal/errors.hpp"
#include "microlocal/linalg.hpp"
#include "microlocal/normalcone.hpp"

#include <algorithm>
#include <set>

namespace microlocal {

namespace {

// Annihilator of the direction space of a nonempty polyhedron.
ConvexCone annihilator(const ConvexPolyhedron& p) {
  const std::size_t n = p.dim();
  linalg::Matrix eqs;
  for (auto i : p.implicit_equalities()) eqs.push_back(p.halfspaces()[i].normal);
  std::vector<Vec> normals;
  for (const auto& d : linalg::nullspace(eqs, n)) {
    normals.push_back(d);
    normals.push_back(negate(d));
  }
  return ConvexCone(n, std::move(normals));
}

ConvexPolyhedron as_product(const ConicPiece& p) { return polyhedron_product(p.base, p.fiber.as_polyhedron()); }

std::vector<ConvexPolyhedron> joined_pieces(const PolyhedralSet& a, const PolyhedralSet& b) {
  std::vector<ConvexPolyhedron> out = a.pieces();
  out.insert(out.end(), b.pieces().begin(), b.pieces().end());
  return out;
}

}  // namespace

int StratumDatum::min_degree() const {
  if (degrees.empty()) throw Error(ErrorCode::InvalidArgument, "stratum " + id + " has no degrees");
  return *std::min_element(degrees.begin(), degrees.end());
}

int StratumDatum::max_degree() const {
  if (degrees.empty()) throw Error(ErrorCode::InvalidArgument, "stratum " + id + " has no degrees");
  return *std::max_element(degrees.begin(), degrees.end());
}

void StratumDatum::validate() const {
  if (degrees.empty()) throw Error(ErrorCode::InvalidArgument, "stratum " + id + " has no degrees");
  for (const auto& [degree, rank] : rank_by_degree) {
    if (rank <= 0) throw Error(ErrorCode::InvalidArgument, "stratum " + id + " has a nonpositive rank");
    if (std::find(degrees.begin(), degrees.end(), degree) == degrees.end()) {
      throw Error(ErrorCode::InvalidArgument, "stratum " + id + " has a rank for a degree it does not list");
    }
  }
  if (lambda.dim() != stratum.dim()) throw Error(ErrorCode::DimensionMismatch, "stratum " + id + ": lambda dimension");
  for (const auto& piece : lambda.pieces()) {
    if (piece.base.is_empty()) continue;
    bool conormal = false;
    for (const auto& closure_piece : stratum.closure().pieces()) {
      if (closure_piece.is_empty() || !closure_piece.contains_polyhedron(piece.base)) continue;
      if (annihilator(closure_piece).contains_cone(piece.fiber)) {
        conormal = true;
        break;
      }
    }
    if (!conormal) {
      throw Error(ErrorCode::InvalidArgument,
                  "stratum " + id + ": lambda is not contained in the conormal bundle of the stratum");
    }
  }
}

void StratifiedSheafDescription::validate() const {
  std::set<std::string> ids;
  for (const auto& s : strata) {
    if (s.stratum.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "stratum " + s.id + " has the wrong dimension");
    if (!ids.insert(s.id).second) throw Error(ErrorCode::InvalidArgument, "duplicate stratum id " + s.id);
    s.validate();
  }
  for (std::size_t a = 0; a < strata.size(); ++a) {
    for (std::size_t b = a + 1; b < strata.size(); ++b) {
      PolyhedralSet removed(dim, joined_pieces(strata[a].stratum.removed(), strata[b].stratum.removed()));
      for (const auto& pa : strata[a].stratum.closure().pieces()) {
        for (const auto& pb : strata[b].stratum.closure().pieces()) {
          auto meet = pa.intersect(pb);
          if (meet.is_empty()) continue;
          if (!set_contains(removed, PolyhedralSet(dim, {meet}))) {
            throw Error(ErrorCode::InvalidArgument, "strata " + strata[a].id + " and " + strata[b].id + " intersect");
          }
        }
      }
    }
  }
}

const StratumDatum& StratifiedSheafDescription::find(const std::string& id) const {
  for (const auto& s : strata) {
    if (s.id == id) return s;
  }
  throw Error(ErrorCode::StratumMismatch, "no stratum with id " + id);
}

ConicSubset ssk_from_strata(const StratifiedSheafDescription& d, int k) {
  std::vector<ConicPiece> pieces;
  for (const auto& s : d.strata) {
    if (s.min_degree() > k) continue;
    pieces.insert(pieces.end(), s.lambda.pieces().begin(), s.lambda.pieces().end());
  }
  return ConicSubset(d.dim, std::move(pieces));
}

ConicSubset ss0_constant(const PolyhedralSet& s) { return conormal0(s); }

ConicSubset conormal_bundle_closure(const LocallyClosedPolyhedralSet& y) {
  std::vector<ConicPiece> pieces;
  for (const auto& p : y.closure().pieces()) {
    if (p.is_empty()) continue;
    pieces.push_back({p, annihilator(p)});
  }
  return ConicSubset(y.dim(), std::move(pieces));
}

ConicSubset perverse_ssk(const std::map<std::string, int>& codims,
                         const std::map<std::string, ConicSubset>& conormals, int k) {
  std::size_t dim = conormals.empty() ? 0 : conormals.begin()->second.dim();
  std::vector<ConicPiece> pieces;
  for (const auto& [id, conormal] : conormals) {
    auto it = codims.find(id);
    if (it == codims.end()) throw Error(ErrorCode::MissingCodimension, "no codimension for stratum " + id);
    if (it->second < 0) throw Error(ErrorCode::InvalidArgument, "negative codimension for stratum " + id);
    if (conormal.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "conormals differ in dimension");
    if (k < 0 || it->second > k) continue;
    pieces.insert(pieces.end(), conormal.pieces().begin(), conormal.pieces().end());
  }
  return ConicSubset(dim, std::move(pieces));
}

PerversityReport perversity_check(const StratifiedSheafDescription& f, const StratifiedSheafDescription& dual,
                                  const std::map<std::string, int>& codims) {
  if (f.dim != dual.dim || f.strata.size() != dual.strata.size()) {
    throw Error(ErrorCode::StratumMismatch, "F and its dual are described on different strata");
  }
  std::map<std::string, ConicSubset> conormals;
  int k_min = 0, k_max = 0;
  bool first = true;
  for (const auto& s : f.strata) {
    const auto& t = dual.find(s.id);
    if (!set_equal(s.stratum.closure(), t.stratum.closure()) || !set_equal(s.stratum.removed(), t.stratum.removed())) {
      throw Error(ErrorCode::StratumMismatch, "stratum " + s.id + " differs between F and its dual");
    }
    auto it = codims.find(s.id);
    if (it == codims.end()) throw Error(ErrorCode::MissingCodimension, "no codimension for stratum " + s.id);
    conormals.emplace(s.id, conormal_bundle_closure(s.stratum));
    int lo = std::min(s.min_degree(), t.min_degree()) - 1;
    int hi = std::max({s.max_degree(), t.max_degree(), it->second});
    k_min = first ? lo : std::min(k_min, lo);
    k_max = first ? hi : std::max(k_max, hi);
    first = false;
  }
  PerversityReport report;
  report.k_min = k_min;
  report.k_max = k_max;
  for (int k = k_min; k <= k_max && !f.strata.empty(); ++k) {
    auto bound = perverse_ssk(codims, conormals, k);
    auto both = conic_union(ssk_from_strata(f, k), ssk_from_strata(dual, k));
    if (!conic_contains(bound, both)) {
      report.perverse = false;
      report.first_failure = k;
      break;
    }
  }
  return report;
}

int piece_dimension(const ConicPiece& p) { return as_product(p).affine_dimension(); }

PruneReport prune_invariance(const ConicSubset& a, const ConicSubset& s) {
  if (a.dim() != s.dim()) throw Error(ErrorCode::DimensionMismatch, "A and S live in different spaces");
  if (!a.exact()) throw Error(ErrorCode::EstimateOnly, "A must be an exact descriptor");
  const auto n = static_cast<int>(a.dim());
  std::vector<ConvexPolyhedron> low;
  for (const auto& q : s.pieces()) {
    auto product = as_product(q);
    if (product.affine_dimension() >= n) {
      throw Error(ErrorCode::NotLowDimensional, "a piece of S has dimension " +
                                                    std::to_string(product.affine_dimension()) + " >= " +
                                                    std::to_string(n));
    }
    if (!product.is_empty()) low.push_back(std::move(product));
  }
  // A piece keeps its closure when every intersection with S is thin in it;
  // a piece with a thick intersection must be covered by the other pieces.
  std::vector<ConvexPolyhedron> good, bad;
  for (const auto& p : a.pieces()) {
    auto product = as_product(p);
    int d = product.affine_dimension();
    if (d < 0) continue;
    bool thin = std::all_of(low.begin(), low.end(),
                            [&](const ConvexPolyhedron& q) { return product.intersect(q).affine_dimension() < d; });
    (thin ? good : bad).push_back(std::move(product));
  }
  PruneReport report;
  if (bad.empty()) return report;
  PolyhedralSet kept(2 * a.dim(), good);
  for (const auto& p : bad) {
    if (!set_contains(kept, PolyhedralSet(2 * a.dim(), {p}))) {
      report.invariant = false;
      report.reason = "s_not_lower_dimensional_relative_to_a";
      break;
    }
  }
  return report;
}

}  // namespace microlocal
