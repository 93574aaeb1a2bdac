#include "microlocal/geometry.hpp"

#include "microlocal/errors.hpp"
#include "microlocal/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

namespace microlocal {

namespace {

using lp::LinearConstraint;
using lp::Relation;
using Constraints = std::vector<LinearConstraint>;

void check_dim(const Vec& v, std::size_t dim, const char* what) {
  if (v.size() != dim) throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": dimension mismatch");
}

LinearConstraint complement(const LinearConstraint& c) {
  // not (a.x >= b)  <=>  (-a).x > -b
  return {negate(c.a), -c.b, Relation::Gt};
}

Constraints joined(const Constraints& a, const Constraints& b) {
  Constraints out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Constraints joined(const Constraints& a, const LinearConstraint& c) {
  Constraints out = a;
  out.push_back(c);
  return out;
}

// Enumerates index subsets (increasing) of rows that are linearly independent,
// of size at most max_size, including the empty subset.
void for_each_independent_subset(const std::vector<Vec>& rows, std::size_t columns, std::size_t max_size,
                                 const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> chosen;
  linalg::Matrix current;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    visit(chosen);
    if (chosen.size() == max_size) return;
    for (std::size_t i = start; i < rows.size(); ++i) {
      if (is_zero(rows[i])) continue;
      current.push_back(rows[i]);
      if (linalg::rank(current, columns) == current.size()) {
        chosen.push_back(i);
        rec(i + 1);
        chosen.pop_back();
      }
      current.pop_back();
    }
  };
  rec(0);
}

// --- region coverage ------------------------------------------------------
//
// A region is a product of two convex pieces given by (possibly strict)
// constraint lists. Coverage of a region by a finite union of closed product
// pieces is decided by recursive splitting along the facets of one piece.

struct Region {
  Constraints base;
  Constraints fiber;
};

struct ProductPiece {
  Constraints base;
  Constraints fiber;
};

class CoverageSolver {
 public:
  CoverageSolver(std::size_t base_dim, std::size_t fiber_dim) : nb_(base_dim), nf_(fiber_dim) {}

  bool nonempty(const Region& q) const {
    return lp::feasible(nb_, q.base) && lp::feasible(nf_, q.fiber);
  }

  // Precondition: q nonempty.
  bool covered(const Region& q, const std::vector<const ProductPiece*>& candidates) const {
    std::vector<const ProductPiece*> meeting;
    for (const auto* c : candidates) {
      if (lp::feasible(nb_, joined(q.base, c->base)) && lp::feasible(nf_, joined(q.fiber, c->fiber))) {
        meeting.push_back(c);
      }
    }
    if (meeting.empty()) return false;
    for (const auto* c : meeting) {
      if (inside(q, *c)) return true;
    }
    const ProductPiece* first = meeting.front();
    std::vector<const ProductPiece*> rest(meeting.begin() + 1, meeting.end());
    Region current = q;
    for (const auto& h : first->base) {
      Region part{joined(current.base, complement(h)), current.fiber};
      if (lp::feasible(nb_, part.base) && !covered(part, rest)) return false;
      current.base.push_back(h);
    }
    for (const auto& h : first->fiber) {
      Region part{current.base, joined(current.fiber, complement(h))};
      if (lp::feasible(nf_, part.fiber) && !covered(part, rest)) return false;
      current.fiber.push_back(h);
    }
    return true;
  }

 private:
  bool inside(const Region& q, const ProductPiece& c) const {
    for (const auto& h : c.base) {
      if (lp::feasible(nb_, joined(q.base, complement(h)))) return false;
    }
    for (const auto& h : c.fiber) {
      if (lp::feasible(nf_, joined(q.fiber, complement(h)))) return false;
    }
    return true;
  }

  std::size_t nb_;
  std::size_t nf_;
};

bool union_contains(std::size_t nb, std::size_t nf, const std::vector<ProductPiece>& outer,
                    const std::vector<ProductPiece>& inner) {
  CoverageSolver solver(nb, nf);
  std::vector<const ProductPiece*> candidates;
  for (const auto& p : outer) candidates.push_back(&p);
  for (const auto& piece : inner) {
    Region q{piece.base, piece.fiber};
    if (!solver.nonempty(q)) continue;
    if (!solver.covered(q, candidates)) return false;
  }
  return true;
}

std::vector<ProductPiece> as_product_pieces(const PolyhedralSet& s) {
  std::vector<ProductPiece> out;
  for (const auto& p : s.pieces()) out.push_back({p.constraints(), {}});
  return out;
}

std::vector<ProductPiece> as_product_pieces(const ConicSubset& a) {
  std::vector<ProductPiece> out;
  for (const auto& p : a.pieces()) out.push_back({p.base.constraints(), p.fiber.constraints()});
  return out;
}

Rational random_rational(std::mt19937_64& rng, const Rational& bound, int steps = 1024) {
  std::uniform_int_distribution<int> dist(-steps, steps);
  return bound * ratio(dist(rng), steps);
}

}  // namespace

// --- ConvexPolyhedron -------------------------------------------------------

ConvexPolyhedron::ConvexPolyhedron(std::size_t dim, std::vector<Halfspace> halfspaces)
    : dim_(dim), halfspaces_(std::move(halfspaces)) {
  for (const auto& h : halfspaces_) check_dim(h.normal, dim_, "halfspace");
}

ConvexPolyhedron::ConvexPolyhedron(const ConvexPolyhedron& other)
    : dim_(other.dim_), halfspaces_(other.halfspaces_), empty_state_(other.empty_state_.load()) {}

ConvexPolyhedron::ConvexPolyhedron(ConvexPolyhedron&& other) noexcept
    : dim_(other.dim_), halfspaces_(std::move(other.halfspaces_)), empty_state_(other.empty_state_.load()) {}

ConvexPolyhedron& ConvexPolyhedron::operator=(const ConvexPolyhedron& other) {
  if (this != &other) {
    dim_ = other.dim_;
    halfspaces_ = other.halfspaces_;
    empty_state_.store(other.empty_state_.load());
  }
  return *this;
}

ConvexPolyhedron& ConvexPolyhedron::operator=(ConvexPolyhedron&& other) noexcept {
  dim_ = other.dim_;
  halfspaces_ = std::move(other.halfspaces_);
  empty_state_.store(other.empty_state_.load());
  return *this;
}

ConvexPolyhedron ConvexPolyhedron::whole(std::size_t dim) { return ConvexPolyhedron(dim, {}); }

ConvexPolyhedron ConvexPolyhedron::point(const Vec& x) {
  std::vector<Halfspace> hs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    hs.push_back({unit_vector(x.size(), i), x[i]});
    hs.push_back({negate(unit_vector(x.size(), i)), -x[i]});
  }
  return ConvexPolyhedron(x.size(), std::move(hs));
}

ConvexPolyhedron ConvexPolyhedron::box(const Vec& lo, const Vec& hi) {
  check_dim(hi, lo.size(), "box");
  std::vector<Halfspace> hs;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    hs.push_back({unit_vector(lo.size(), i), lo[i]});
    hs.push_back({negate(unit_vector(lo.size(), i)), -hi[i]});
  }
  return ConvexPolyhedron(lo.size(), std::move(hs));
}

ConvexPolyhedron ConvexPolyhedron::hyperplane(const Vec& a, const Rational& b) {
  return ConvexPolyhedron(a.size(), {{a, b}, {negate(a), -b}});
}

bool ConvexPolyhedron::contains(const Vec& x) const {
  check_dim(x, dim_, "point");
  for (const auto& h : halfspaces_) {
    if (dot(h.normal, x) < h.offset) return false;
  }
  return true;
}

std::vector<LinearConstraint> ConvexPolyhedron::constraints() const {
  std::vector<LinearConstraint> out;
  out.reserve(halfspaces_.size());
  for (const auto& h : halfspaces_) out.push_back({h.normal, h.offset, Relation::Ge});
  return out;
}

bool ConvexPolyhedron::is_empty() const {
  int state = empty_state_.load();
  if (state < 0) {
    state = lp::feasible(dim_, constraints()) ? 0 : 1;
    empty_state_.store(state);
  }
  return state == 1;
}

bool ConvexPolyhedron::is_bounded() const {
  if (is_empty()) return true;
  Constraints rec;
  for (const auto& h : halfspaces_) rec.push_back({h.normal, 0, Relation::Ge});
  for (std::size_t i = 0; i < dim_; ++i) {
    for (int s : {1, -1}) {
      Vec e = scale(unit_vector(dim_, i), s);
      if (lp::feasible(dim_, joined(rec, LinearConstraint{e, 0, Relation::Gt}))) return false;
    }
  }
  return true;
}

std::vector<std::size_t> ConvexPolyhedron::implicit_equalities() const {
  std::vector<std::size_t> out;
  const auto cs = constraints();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (!lp::feasible(dim_, joined(cs, LinearConstraint{cs[i].a, cs[i].b, Relation::Gt}))) out.push_back(i);
  }
  return out;
}

int ConvexPolyhedron::affine_dimension() const {
  if (is_empty()) return -1;
  linalg::Matrix rows;
  for (auto i : implicit_equalities()) rows.push_back(halfspaces_[i].normal);
  return static_cast<int>(dim_) - static_cast<int>(linalg::rank(rows, dim_));
}

std::optional<Vec> ConvexPolyhedron::relative_interior_point() const {
  if (is_empty()) return std::nullopt;
  auto eq = implicit_equalities();
  std::vector<bool> is_eq(halfspaces_.size(), false);
  for (auto i : eq) is_eq[i] = true;
  Constraints cs;
  for (std::size_t i = 0; i < halfspaces_.size(); ++i) {
    cs.push_back({halfspaces_[i].normal, halfspaces_[i].offset, is_eq[i] ? Relation::Eq : Relation::Gt});
  }
  return lp::find_point(dim_, cs);
}

ConvexPolyhedron ConvexPolyhedron::intersect(const ConvexPolyhedron& other) const {
  if (other.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "intersect: dimension mismatch");
  auto hs = halfspaces_;
  hs.insert(hs.end(), other.halfspaces_.begin(), other.halfspaces_.end());
  return ConvexPolyhedron(dim_, std::move(hs));
}

ConvexPolyhedron ConvexPolyhedron::with(Halfspace h) const {
  auto hs = halfspaces_;
  hs.push_back(std::move(h));
  return ConvexPolyhedron(dim_, std::move(hs));
}

ConvexPolyhedron ConvexPolyhedron::simplified() const {
  if (is_empty()) {
    ConvexPolyhedron out(dim_, {{zeros(dim_), 1}});
    out.empty_state_.store(1);
    return out;
  }
  // Scale each constraint so its first nonzero coefficient is +-1, drop trivial
  // and duplicate ones.
  std::vector<Halfspace> hs;
  std::vector<std::pair<Vec, Rational>> seen;
  for (const auto& h : halfspaces_) {
    if (is_zero(h.normal)) continue;
    Vec n = normalize_direction(h.normal);
    Rational factor;
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (sgn(h.normal[i]) != 0) {
        factor = n[i] / h.normal[i];
        break;
      }
    }
    Rational b = h.offset * factor;
    std::pair<Vec, Rational> key{n, b};
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    hs.push_back({std::move(n), std::move(b)});
  }
  for (std::size_t i = 0; i < hs.size();) {
    Constraints others;
    for (std::size_t j = 0; j < hs.size(); ++j) {
      if (j != i) others.push_back({hs[j].normal, hs[j].offset, Relation::Ge});
    }
    LinearConstraint c{hs[i].normal, hs[i].offset, Relation::Ge};
    if (!lp::feasible(dim_, joined(others, complement(c)))) {
      hs.erase(hs.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  ConvexPolyhedron out(dim_, std::move(hs));
  out.empty_state_.store(0);
  return out;
}

bool ConvexPolyhedron::contains_polyhedron(const ConvexPolyhedron& other) const {
  if (other.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "containment: dimension mismatch");
  const auto cs = other.constraints();
  for (const auto& h : halfspaces_) {
    if (lp::feasible(dim_, joined(cs, complement({h.normal, h.offset, Relation::Ge})))) return false;
  }
  return true;
}

// --- PolyhedralSet ----------------------------------------------------------

PolyhedralSet::PolyhedralSet(std::size_t dim, std::vector<ConvexPolyhedron> pieces)
    : dim_(dim), pieces_(std::move(pieces)) {
  for (const auto& p : pieces_) {
    if (p.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "polyhedral set: piece dimension mismatch");
  }
}

PolyhedralSet PolyhedralSet::whole(std::size_t dim) { return PolyhedralSet(dim, {ConvexPolyhedron::whole(dim)}); }

bool PolyhedralSet::contains(const Vec& x) const {
  check_dim(x, dim_, "point");
  return std::any_of(pieces_.begin(), pieces_.end(), [&](const ConvexPolyhedron& p) { return p.contains(x); });
}

bool PolyhedralSet::is_empty() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const ConvexPolyhedron& p) { return p.is_empty(); });
}

bool PolyhedralSet::is_bounded() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const ConvexPolyhedron& p) { return p.is_bounded(); });
}

// --- LocallyClosedPolyhedralSet ---------------------------------------------

LocallyClosedPolyhedralSet::LocallyClosedPolyhedralSet(PolyhedralSet closure, PolyhedralSet removed)
    : closure_(std::move(closure)), removed_(std::move(removed)) {
  if (removed_.dim() != closure_.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "locally closed set: dimension mismatch");
  }
  if (!set_contains(closure_, removed_)) {
    throw Error(ErrorCode::InvalidArgument, "locally closed set: removed part is not contained in the closure");
  }
}

LocallyClosedPolyhedralSet LocallyClosedPolyhedralSet::closed(PolyhedralSet s) {
  const auto n = s.dim();
  return LocallyClosedPolyhedralSet(std::move(s), PolyhedralSet::empty(n));
}

bool LocallyClosedPolyhedralSet::contains(const Vec& x) const {
  return closure_.contains(x) && !removed_.contains(x);
}

// --- ConvexCone --------------------------------------------------------------

ConvexCone::ConvexCone(std::size_t dim, std::vector<Vec> normals) : dim_(dim), normals_(std::move(normals)) {
  for (const auto& a : normals_) check_dim(a, dim_, "cone normal");
}

ConvexCone ConvexCone::zero(std::size_t dim) {
  std::vector<Vec> normals;
  for (std::size_t i = 0; i < dim; ++i) {
    normals.push_back(unit_vector(dim, i));
    normals.push_back(negate(unit_vector(dim, i)));
  }
  return ConvexCone(dim, std::move(normals));
}

ConvexCone ConvexCone::orthant(std::size_t dim) {
  std::vector<Vec> normals;
  for (std::size_t i = 0; i < dim; ++i) normals.push_back(unit_vector(dim, i));
  return ConvexCone(dim, std::move(normals));
}

ConvexCone ConvexCone::ray(const Vec& d) { return cone_from_generators(d.size(), {d}); }

ConvexCone ConvexCone::line(const Vec& d) { return cone_from_generators(d.size(), {d, negate(d)}); }

bool ConvexCone::contains(const Vec& v) const {
  check_dim(v, dim_, "cone vector");
  return std::all_of(normals_.begin(), normals_.end(), [&](const Vec& a) { return sgn(dot(a, v)) >= 0; });
}

bool ConvexCone::is_zero() const {
  const auto cs = constraints();
  for (std::size_t i = 0; i < dim_; ++i) {
    for (int s : {1, -1}) {
      if (lp::feasible(dim_, joined(cs, LinearConstraint{scale(unit_vector(dim_, i), s), 0, Relation::Gt}))) {
        return false;
      }
    }
  }
  return true;
}

ConvexPolyhedron ConvexCone::as_polyhedron() const {
  std::vector<Halfspace> hs;
  for (const auto& a : normals_) hs.push_back({a, 0});
  return ConvexPolyhedron(dim_, std::move(hs));
}

std::vector<LinearConstraint> ConvexCone::constraints() const {
  std::vector<LinearConstraint> out;
  for (const auto& a : normals_) out.push_back({a, 0, Relation::Ge});
  return out;
}

bool ConvexCone::contains_cone(const ConvexCone& other) const {
  if (other.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "cone containment: dimension mismatch");
  const auto cs = other.constraints();
  for (const auto& a : normals_) {
    if (lp::feasible(dim_, joined(cs, LinearConstraint{negate(a), 0, Relation::Gt}))) return false;
  }
  return true;
}

ConvexCone ConvexCone::intersect(const ConvexCone& other) const {
  if (other.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "cone intersection: dimension mismatch");
  auto normals = normals_;
  normals.insert(normals.end(), other.normals_.begin(), other.normals_.end());
  return ConvexCone(dim_, std::move(normals));
}

bool cones_equal(const ConvexCone& a, const ConvexCone& b) { return a.contains_cone(b) && b.contains_cone(a); }

// --- ConicSubset ---------------------------------------------------------------

ConicSubset::ConicSubset(std::size_t dim, std::vector<ConicPiece> pieces) : dim_(dim), pieces_(std::move(pieces)) {
  for (const auto& p : pieces_) {
    if (p.base.dim() != dim_ || p.fiber.dim() != dim_) {
      throw Error(ErrorCode::DimensionMismatch, "conic subset: piece dimension mismatch");
    }
  }
}

ConicSubset ConicSubset::from_samples(std::size_t dim, std::vector<CotangentPoint> samples) {
  ConicSubset out(dim, {});
  out.exact_ = false;
  for (const auto& s : samples) {
    check_dim(s.x, dim, "sample base");
    check_dim(s.xi, dim, "sample fiber");
  }
  out.samples_ = std::move(samples);
  return out;
}

ConicSubset ConicSubset::zero_section(const PolyhedralSet& s) {
  std::vector<ConicPiece> pieces;
  for (const auto& p : s.pieces()) pieces.push_back({p, ConvexCone::zero(s.dim())});
  return ConicSubset(s.dim(), std::move(pieces));
}

ConicSubset ConicSubset::with_samples(std::vector<CotangentPoint> samples) const {
  ConicSubset out = *this;
  for (const auto& s : samples) {
    check_dim(s.x, dim_, "sample base");
    check_dim(s.xi, dim_, "sample fiber");
  }
  out.samples_ = std::move(samples);
  return out;
}

// --- cones -------------------------------------------------------------------

ConvexCone cone_from_generators(std::size_t dim, const std::vector<Vec>& generators) {
  std::vector<Vec> gens;
  for (const auto& g : generators) {
    check_dim(g, dim, "generator");
    if (!is_zero(g)) gens.push_back(g);
  }
  if (gens.empty()) return ConvexCone::zero(dim);

  std::vector<Vec> normals;
  auto push_unique = [&normals](Vec v) {
    v = normalize_direction(v);
    if (std::find(normals.begin(), normals.end(), v) == normals.end()) normals.push_back(std::move(v));
  };

  // Equalities: the orthogonal complement of the span.
  linalg::Matrix perp = linalg::nullspace(gens, dim);
  for (const auto& w : perp) {
    push_unique(w);
    push_unique(negate(w));
  }
  const std::size_t d = dim - perp.size();

  // Facets within the span: normals orthogonal to d-1 independent generators.
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (chosen.size() + 1 == d) {
      linalg::Matrix rows = perp;
      for (auto i : chosen) rows.push_back(gens[i]);
      linalg::Matrix h = linalg::nullspace(rows, dim);
      if (h.size() != 1) return;
      bool pos = false, neg = false;
      for (const auto& g : gens) {
        int s = sgn(dot(h[0], g));
        pos = pos || s > 0;
        neg = neg || s < 0;
      }
      if (pos && neg) return;
      if (pos) push_unique(h[0]);
      if (neg) push_unique(negate(h[0]));
      return;
    }
    for (std::size_t i = start; i < gens.size(); ++i) {
      chosen.push_back(i);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
  return ConvexCone(dim, std::move(normals));
}

ConvexCone polar_cone(const ConvexCone& gamma) { return cone_from_generators(gamma.dim(), gamma.normals()); }

bool is_proper_cone(const ConvexCone& gamma) {
  return linalg::rank(gamma.normals(), gamma.dim()) == gamma.dim();
}

Vec interior_polar_direction(const ConvexCone& gamma) {
  if (!is_proper_cone(gamma)) throw Error(ErrorCode::NotProperCone, "cone is not proper");
  Vec v = zeros(gamma.dim());
  for (const auto& a : gamma.normals()) v = add(v, a);
  return v;
}

// --- distances ----------------------------------------------------------------

Projection dist_to_convex(const Vec& x, const ConvexPolyhedron& c) {
  check_dim(x, c.dim(), "point");
  if (c.contains(x)) return {0, 0.0, x};
  auto start = lp::find_point(c.dim(), c.constraints());
  if (!start) throw Error(ErrorCode::EmptyPolyhedron, "distance to an empty polyhedron");
  return dist_to_convex(x, c, *start);
}

Projection dist_to_convex(const Vec& x, const ConvexPolyhedron& c, const Vec& feasible_start) {
  check_dim(x, c.dim(), "point");
  check_dim(feasible_start, c.dim(), "start point");
  if (!c.contains(feasible_start)) throw Error(ErrorCode::NotInSet, "projection start point is not feasible");
  if (c.contains(x)) return {0, 0.0, x};
  // Primal active-set method for min |y - x|^2 subject to a_i . y >= b_i.
  const auto& hs = c.halfspaces();
  const std::size_t n = c.dim();
  Vec y = feasible_start;
  std::vector<std::size_t> working;
  linalg::Matrix rows;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (is_zero(hs[i].normal) || dot(hs[i].normal, y) != hs[i].offset) continue;
    rows.push_back(hs[i].normal);
    if (linalg::rank(rows, n) == rows.size()) {
      working.push_back(i);
    } else {
      rows.pop_back();
    }
  }
  for (std::size_t iteration = 0;; ++iteration) {
    if (iteration > 64 * (hs.size() + 1)) throw Error(ErrorCode::InvalidArgument, "projection did not converge");
    linalg::Matrix a;
    Vec b;
    for (auto i : working) {
      a.push_back(hs[i].normal);
      b.push_back(hs[i].offset);
    }
    Vec target = linalg::project_onto_affine(a, b, x);
    Vec step = sub(target, y);
    if (!is_zero(step)) {
      std::optional<Rational> alpha;
      std::size_t blocking = 0;
      for (std::size_t i = 0; i < hs.size(); ++i) {
        if (std::find(working.begin(), working.end(), i) != working.end()) continue;
        Rational slope = dot(hs[i].normal, step);
        if (sgn(slope) >= 0) continue;
        Rational t = (hs[i].offset - dot(hs[i].normal, y)) / slope;
        if (!alpha || t < *alpha) {
          alpha = t;
          blocking = i;
        }
      }
      if (alpha && *alpha < 1) {
        y = add(y, scale(step, *alpha));
        working.push_back(blocking);
        continue;
      }
      y = std::move(target);
    }
    // Multipliers: y - x = A_W^T lambda.
    if (working.empty()) break;
    linalg::Matrix gram(working.size(), zeros(working.size()));
    Vec rhs(working.size());
    const Vec residual = sub(y, x);
    for (std::size_t i = 0; i < working.size(); ++i) {
      for (std::size_t j = 0; j < working.size(); ++j) gram[i][j] = dot(hs[working[i]].normal, hs[working[j]].normal);
      rhs[i] = dot(hs[working[i]].normal, residual);
    }
    auto lambda = linalg::solve(gram, rhs, working.size());
    if (!lambda) throw Error(ErrorCode::InvalidArgument, "projection: dependent working set");
    std::optional<std::size_t> drop;
    for (std::size_t i = 0; i < working.size(); ++i) {
      if (sgn((*lambda)[i]) < 0 && (!drop || working[i] < working[*drop])) drop = i;
    }
    if (!drop) break;
    working.erase(working.begin() + static_cast<std::ptrdiff_t>(*drop));
  }
  Rational d2 = squared_norm(sub(x, y));
  return {d2, std::sqrt(to_double(d2)), std::move(y)};
}

std::optional<PolyhedraDistance> closest_points(const ConvexPolyhedron& p, const ConvexPolyhedron& q,
                                                const std::optional<Rational>& strict_bound) {
  if (p.dim() != q.dim()) throw Error(ErrorCode::DimensionMismatch, "distance: dimension mismatch");
  if (p.is_empty() || q.is_empty()) throw Error(ErrorCode::EmptyPolyhedron, "distance to an empty polyhedron");
  const std::size_t n = p.dim();

  struct Flat {
    Vec origin;
    linalg::Matrix directions;
    std::vector<std::size_t> active;
  };
  auto flats_of = [n](const ConvexPolyhedron& c) {
    std::vector<Vec> rows;
    Vec rhs;
    for (const auto& h : c.halfspaces()) {
      rows.push_back(h.normal);
      rhs.push_back(h.offset);
    }
    std::vector<Flat> out;
    for_each_independent_subset(rows, n, n, [&](const std::vector<std::size_t>& subset) {
      linalg::Matrix a;
      Vec b;
      for (auto i : subset) {
        a.push_back(rows[i]);
        b.push_back(rhs[i]);
      }
      auto origin = a.empty() ? std::optional<Vec>(zeros(n)) : linalg::solve(a, b, n);
      if (!origin) return;
      out.push_back({*origin, a.empty() ? linalg::nullspace({}, n) : linalg::nullspace(a, n), subset});
    });
    return out;
  };
  const auto fp = flats_of(p);
  const auto fq = flats_of(q);

  struct Candidate {
    Rational value;
    Vec residual;
  };
  std::vector<Candidate> candidates;
  for (const auto& a : fp) {
    for (const auto& b : fq) {
      linalg::Matrix span = a.directions;
      span.insert(span.end(), b.directions.begin(), b.directions.end());
      linalg::Matrix basis = linalg::row_reduce(span, n).reduced;
      Vec r = linalg::project_onto_affine(basis, zeros(basis.size()), sub(a.origin, b.origin));
      Rational v = squared_norm(r);
      candidates.push_back({std::move(v), std::move(r)});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& l, const Candidate& r) { return l.value < r.value; });

  Constraints base;
  for (const auto& h : p.halfspaces()) base.push_back({concat(h.normal, zeros(n)), h.offset, Relation::Ge});
  for (const auto& h : q.halfspaces()) base.push_back({concat(zeros(n), h.normal), h.offset, Relation::Ge});
  const Candidate* previous = nullptr;
  for (const auto& c : candidates) {
    if (strict_bound && c.value >= *strict_bound) return std::nullopt;
    if (previous && previous->residual == c.residual) continue;
    previous = &c;
    Constraints cs = base;
    for (std::size_t i = 0; i < n; ++i) {
      Vec a = zeros(2 * n);
      a[i] = 1;
      a[n + i] = -1;
      cs.push_back({std::move(a), c.residual[i], Relation::Eq});
    }
    if (auto zw = lp::find_point(2 * n, cs)) {
      Vec z(zw->begin(), zw->begin() + static_cast<std::ptrdiff_t>(n));
      Vec w(zw->begin() + static_cast<std::ptrdiff_t>(n), zw->end());
      return PolyhedraDistance{c.value, std::move(z), std::move(w)};
    }
  }
  throw Error(ErrorCode::InvalidArgument, "closest pair search failed");
}

// --- tangent and normal cones ---------------------------------------------------

std::vector<ConvexCone> tangent_cone(const PolyhedralSet& s, const Vec& x) {
  check_dim(x, s.dim(), "point");
  std::vector<ConvexCone> out;
  for (const auto& p : s.pieces()) {
    if (!p.contains(x)) continue;
    std::vector<Vec> normals;
    for (const auto& h : p.halfspaces()) {
      if (dot(h.normal, x) == h.offset && !is_zero(h.normal)) normals.push_back(h.normal);
    }
    out.emplace_back(s.dim(), std::move(normals));
  }
  if (out.empty()) throw Error(ErrorCode::NotInSet, "tangent cone: point is not in the set");
  return out;
}

SampledCone normal_cone_pair_sampled(const PolyhedralSet& s1, const PolyhedralSet& s2, const Vec& p,
                                     std::size_t budget, std::uint64_t seed, const Rational& radius) {
  if (s1.dim() != s2.dim()) throw Error(ErrorCode::DimensionMismatch, "normal cone: dimension mismatch");
  check_dim(p, s1.dim(), "point");
  std::vector<const ConvexPolyhedron*> near1, near2;
  for (const auto& c : s1.pieces()) {
    if (c.contains(p)) near1.push_back(&c);
  }
  for (const auto& c : s2.pieces()) {
    if (c.contains(p)) near2.push_back(&c);
  }
  if (near1.empty() || near2.empty()) {
    throw Error(ErrorCode::NotInSet, "normal cone: point is not adherent to both sets");
  }
  const std::size_t n = p.size();
  std::mt19937_64 rng(seed);
  SampledCone out;
  out.dim = n;
  std::set<Vec> seen;
  std::set<const ConvexPolyhedron*> singletons;
  for (const auto* c : near1) {
    if (c->affine_dimension() == 0) singletons.insert(c);
  }
  for (const auto* c : near2) {
    if (c->affine_dimension() == 0) singletons.insert(c);
  }
  for (std::size_t k = 0; k < budget; ++k) {
    Rational r = radius / Rational(mpz_class(1) << static_cast<unsigned>(k % 12));
    // A convex combination of up to three projections onto one piece: still a
    // point of that piece, and not confined to its boundary.
    auto sample = [&](const std::vector<const ConvexPolyhedron*>& pieces) {
      std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
      std::uniform_int_distribution<int> parts(1, 3), weight(1, 16);
      const ConvexPolyhedron& piece = *pieces[pick(rng)];
      if (singletons.count(&piece) != 0) return p;
      Vec y = zeros(n);
      int total = 0;
      for (int m = parts(rng); m > 0; --m) {
        Vec q(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = p[i] + random_rational(rng, r);
        int w = weight(rng);
        y = add(y, scale(dist_to_convex(q, piece, p).nearest, w));
        total += w;
      }
      return scale(y, Rational(1, total));
    };
    Vec v = sub(sample(near1), sample(near2));
    if (is_zero(v)) continue;
    v = normalize_direction(v);
    if (seen.insert(v).second) out.directions.push_back(std::move(v));
  }
  return out;
}

// --- conic subsets ----------------------------------------------------------------

ConicSubset antipodal(const ConicSubset& a) {
  std::vector<ConicPiece> pieces;
  for (const auto& p : a.pieces()) {
    std::vector<Vec> normals;
    for (const auto& n : p.fiber.normals()) normals.push_back(negate(n));
    pieces.push_back({p.base, ConvexCone(a.dim(), std::move(normals))});
  }
  std::vector<CotangentPoint> samples;
  for (const auto& s : a.samples()) samples.push_back({s.x, negate(s.xi)});
  if (!a.exact()) return ConicSubset::from_samples(a.dim(), std::move(samples));
  return ConicSubset(a.dim(), std::move(pieces)).with_samples(std::move(samples));
}

bool conic_membership(const ConicSubset& a, const CotangentPoint& p) {
  if (!a.exact()) throw Error(ErrorCode::EstimateOnly, "membership on a samples-only subset is an estimate only");
  check_dim(p.x, a.dim(), "point base");
  check_dim(p.xi, a.dim(), "point fiber");
  return std::any_of(a.pieces().begin(), a.pieces().end(),
                     [&](const ConicPiece& c) { return c.base.contains(p.x) && c.fiber.contains(p.xi); });
}

bool conic_contains(const ConicSubset& outer, const ConicSubset& inner) {
  if (!outer.exact() || !inner.exact()) {
    throw Error(ErrorCode::EstimateOnly, "containment needs exact descriptors");
  }
  if (outer.dim() != inner.dim()) throw Error(ErrorCode::DimensionMismatch, "containment: dimension mismatch");
  return union_contains(outer.dim(), outer.dim(), as_product_pieces(outer), as_product_pieces(inner));
}

bool conic_equal(const ConicSubset& a, const ConicSubset& b) { return conic_contains(a, b) && conic_contains(b, a); }

ConicSubset conic_union(const ConicSubset& a, const ConicSubset& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "union: dimension mismatch");
  auto samples = a.samples();
  samples.insert(samples.end(), b.samples().begin(), b.samples().end());
  if (!a.exact() || !b.exact()) return ConicSubset::from_samples(a.dim(), std::move(samples));
  auto pieces = a.pieces();
  pieces.insert(pieces.end(), b.pieces().begin(), b.pieces().end());
  return ConicSubset(a.dim(), std::move(pieces)).with_samples(std::move(samples));
}

ConvexPolyhedron polyhedron_product(const ConvexPolyhedron& a, const ConvexPolyhedron& b) {
  std::vector<Halfspace> hs;
  for (const auto& h : a.halfspaces()) hs.push_back({concat(h.normal, zeros(b.dim())), h.offset});
  for (const auto& h : b.halfspaces()) hs.push_back({concat(zeros(a.dim()), h.normal), h.offset});
  return ConvexPolyhedron(a.dim() + b.dim(), std::move(hs));
}

ConvexCone cone_product(const ConvexCone& a, const ConvexCone& b) {
  std::vector<Vec> normals;
  for (const auto& n : a.normals()) normals.push_back(concat(n, zeros(b.dim())));
  for (const auto& n : b.normals()) normals.push_back(concat(zeros(a.dim()), n));
  return ConvexCone(a.dim() + b.dim(), std::move(normals));
}

ConicSubset conic_product(const ConicSubset& a, const ConicSubset& b) {
  if (!a.exact() || !b.exact()) throw Error(ErrorCode::EstimateOnly, "product needs exact descriptors");
  std::vector<ConicPiece> pieces;
  for (const auto& p : a.pieces()) {
    for (const auto& q : b.pieces()) {
      pieces.push_back({polyhedron_product(p.base, q.base), cone_product(p.fiber, q.fiber)});
    }
  }
  return ConicSubset(a.dim() + b.dim(), std::move(pieces));
}

PolyhedralSet base_projection(const ConicSubset& a) {
  std::vector<ConvexPolyhedron> pieces;
  for (const auto& p : a.pieces()) {
    if (!p.base.is_empty()) pieces.push_back(p.base);
  }
  return PolyhedralSet(a.dim(), std::move(pieces));
}

bool set_contains(const PolyhedralSet& outer, const PolyhedralSet& inner) {
  if (outer.dim() != inner.dim()) throw Error(ErrorCode::DimensionMismatch, "containment: dimension mismatch");
  return union_contains(outer.dim(), 0, as_product_pieces(outer), as_product_pieces(inner));
}

bool set_equal(const PolyhedralSet& a, const PolyhedralSet& b) { return set_contains(a, b) && set_contains(b, a); }

PolyhedralSet set_product(const PolyhedralSet& a, const PolyhedralSet& b) {
  std::vector<ConvexPolyhedron> pieces;
  for (const auto& p : a.pieces()) {
    for (const auto& q : b.pieces()) pieces.push_back(polyhedron_product(p, q));
  }
  return PolyhedralSet(a.dim() + b.dim(), std::move(pieces));
}

ConicSubset sample_conic_subset(const ConicSubset& a, std::size_t count, std::uint64_t seed, const Rational& window) {
  if (!a.exact()) throw Error(ErrorCode::EstimateOnly, "sampling needs an exact descriptor");
  std::vector<const ConicPiece*> usable;
  for (const auto& p : a.pieces()) {
    if (!p.base.is_empty()) usable.push_back(&p);
  }
  const std::size_t n = a.dim();
  std::vector<CotangentPoint> samples;
  if (usable.empty()) return a.with_samples({});
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, usable.size() - 1);
  std::uniform_int_distribution<int> coeff(-4, 4);
  std::uniform_int_distribution<int> zero_pick(0, 7);
  for (std::size_t k = 0; k < count; ++k) {
    const ConicPiece& piece = *usable[pick(rng)];
    Vec q(n);
    for (auto& v : q) v = random_rational(rng, window);
    Vec x = dist_to_convex(q, piece.base).nearest;
    Vec xi = zeros(n);
    if (zero_pick(rng) != 0) {
      const ConvexPolyhedron fiber = piece.fiber.as_polyhedron();
      for (int attempt = 0; attempt < 8 && is_zero(xi); ++attempt) {
        Vec d(n);
        for (auto& v : d) v = coeff(rng);
        xi = dist_to_convex(d, fiber).nearest;
      }
      if (!is_zero(xi)) xi = scale(xi, approximate(1.0 / norm(xi), 20));
    }
    samples.push_back({std::move(x), std::move(xi)});
  }
  return a.with_samples(std::move(samples));
}

}  // namespace microlocal
