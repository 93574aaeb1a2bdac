#include "microlocal/normalcone.hpp"

#include "microlocal/errors.hpp"
#include "microlocal/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace microlocal {

using lp::LinearConstraint;
using lp::Relation;

namespace {

void require_dim(const Vec& v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has dimension " + std::to_string(v.size()) +
                                                  ", expected " + std::to_string(n));
  }
}

void require_member(const PolyhedralSet& s, const Vec& x) {
  require_dim(x, s.dim(), "point");
  if (!s.contains(x)) throw Error(ErrorCode::NotInSet, "point " + format_vector(x) + " is not in S");
}

int sign_of(const Rational& r) { return sgn(r) > 0 ? 1 : (sgn(r) < 0 ? -1 : 0); }

// A cone {v : <a_i, v> >= 0} lies in {<v, xi> >= 0} iff min <xi, v> over it is 0.
bool cone_in_halfspace(const ConvexCone& k, const Vec& xi) {
  auto cons = k.constraints();
  return lp::minimize(xi, k.dim(), cons).status == lp::Status::Optimal;
}

Rational squared_distance(const Vec& a, const Vec& b) { return squared_norm(sub(a, b)); }

// Hyperplane {<a, x> = b} scaled so that the first nonzero entry of a is 1.
struct Hyperplane {
  Vec a;
  Rational b;
  bool operator<(const Hyperplane& o) const { return a != o.a ? a < o.a : b < o.b; }
};

// Normalizes h and returns the sign of the factor removed.
std::pair<Hyperplane, int> normalized(const Halfspace& h) {
  for (const auto& c : h.normal) {
    if (sgn(c) != 0) {
      Rational f = c;
      return {Hyperplane{scale(h.normal, 1 / f), h.offset / f}, sgn(f) > 0 ? 1 : -1};
    }
  }
  return {Hyperplane{h.normal, h.offset}, 0};
}

constexpr int kBelow = 1, kOn = 2, kAbove = 4, kAll = 7;

LinearConstraint sign_constraint(const Hyperplane& h, int sign) {
  if (sign == 0) return {h.a, h.b, Relation::Eq};
  if (sign > 0) return {h.a, h.b, Relation::Gt};
  return {negate(h.a), -h.b, Relation::Gt};
}

std::vector<LinearConstraint> closed_version(std::vector<LinearConstraint> cons) {
  for (auto& c : cons) {
    if (c.rel == Relation::Gt) c.rel = Relation::Ge;
  }
  return cons;
}

struct Cell {
  std::vector<LinearConstraint> constraints;  // relatively open description
  Vec point;
};

// Relatively open cells of the arrangement of all facet hyperplanes, restricted
// to S; cells are deduplicated by sign vector.
std::vector<Cell> arrangement_cells(const PolyhedralSet& s) {
  std::size_t n = s.dim();
  std::vector<Hyperplane> planes;
  std::map<Hyperplane, std::size_t> index;
  std::vector<std::vector<std::pair<std::size_t, int>>> piece_planes;
  std::vector<const ConvexPolyhedron*> pieces;
  for (const auto& piece : s.pieces()) {
    if (piece.is_empty()) continue;
    pieces.push_back(&piece);
    std::vector<std::pair<std::size_t, int>> own;
    for (const auto& h : piece.halfspaces()) {
      auto [plane, orientation] = normalized(h);
      if (orientation == 0) continue;
      auto [it, inserted] = index.emplace(plane, planes.size());
      if (inserted) planes.push_back(plane);
      own.emplace_back(it->second, orientation);
    }
    piece_planes.push_back(std::move(own));
  }

  std::map<std::vector<int>, Cell> cells;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    std::vector<int> mask(planes.size(), kAll);
    for (auto [k, orientation] : piece_planes[p]) mask[k] &= orientation > 0 ? (kOn | kAbove) : (kOn | kBelow);

    // Hyperplanes that miss the closed piece, or contain it, have a fixed sign.
    auto piece_cons = pieces[p]->constraints();
    std::vector<int> fixed(planes.size(), 2);
    std::vector<std::size_t> order;
    for (auto [k, orientation] : piece_planes[p]) {
      if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);
    }
    for (std::size_t k = 0; k < planes.size(); ++k) {
      if (std::find(order.begin(), order.end(), k) != order.end()) continue;
      auto lo = lp::minimize(planes[k].a, n, piece_cons);
      auto hi = lp::maximize(planes[k].a, n, piece_cons);
      bool lo_finite = lo.status == lp::Status::Optimal;
      bool hi_finite = hi.status == lp::Status::Optimal;
      if (hi_finite && hi.value < planes[k].b) fixed[k] = -1;
      else if (lo_finite && lo.value > planes[k].b) fixed[k] = 1;
      else if (lo_finite && hi_finite && lo.value == planes[k].b && hi.value == planes[k].b) fixed[k] = 0;
      else order.push_back(k);
    }

    // Each node is a nonempty relatively open region given by equalities and
    // strict inequalities, with a known point of it.
    std::vector<int> signs(planes.size(), 2);
    std::vector<LinearConstraint> cons;
    linalg::Matrix equalities;
    std::function<void(std::size_t, const Vec&)> descend = [&](std::size_t depth, const Vec& point) {
      if (depth == order.size()) {
        std::vector<int> key = signs;
        for (std::size_t k = 0; k < planes.size(); ++k) {
          if (fixed[k] != 2) key[k] = fixed[k];
        }
        cells.try_emplace(std::move(key), Cell{cons, point});
        return;
      }
      std::size_t k = order[depth];
      const auto& h = planes[k];
      int here = sign_of(dot(h.a, point) - h.b);
      int allowed = here < 0 ? kBelow : (here == 0 ? kOn : kAbove);
      equalities.push_back(h.a);
      bool constant = linalg::rank(equalities, n) < equalities.size();
      equalities.pop_back();
      if (!constant) {
        if (here == 0) {
          allowed = kAll;
        } else {
          // The plane meets the region iff the far side of the closure reaches it.
          auto closed = closed_version(cons);
          auto opt = here > 0 ? lp::minimize(h.a, n, closed) : lp::maximize(h.a, n, closed);
          bool crosses = opt.status != lp::Status::Optimal || (here > 0 ? opt.value < h.b : opt.value > h.b);
          if (crosses) allowed = kAll;
        }
      }
      // A sign forced by the region is implied by its constraints, so only
      // splitting hyperplanes enter the description.
      bool split = allowed == kAll;
      allowed &= mask[k];
      for (int sign : {-1, 0, 1}) {
        int bit = sign < 0 ? kBelow : (sign == 0 ? kOn : kAbove);
        if (!(allowed & bit)) continue;
        signs[k] = sign;
        if (split) cons.push_back(sign_constraint(h, sign));
        if (split && sign == 0) equalities.push_back(h.a);
        if (sign == here) {
          descend(depth + 1, point);
        } else if (auto child = lp::find_point(n, cons)) {
          descend(depth + 1, *child);
        }
        if (split && sign == 0) equalities.pop_back();
        if (split) cons.pop_back();
      }
      signs[k] = 2;
    };
    descend(0, zeros(n));
  }

  std::vector<Cell> out;
  out.reserve(cells.size());
  for (auto& [key, cell] : cells) out.push_back(std::move(cell));
  return out;
}

// Polar of C_x(S): intersection over pieces containing x of the cone spanned
// by their active normals.
ConvexCone tangent_polar(const PolyhedralSet& s, const Vec& x) {
  std::size_t n = s.dim();
  std::vector<Vec> normals;
  bool any = false;
  for (const auto& piece : s.pieces()) {
    if (!piece.contains(x)) continue;
    any = true;
    std::vector<Vec> active;
    for (const auto& h : piece.halfspaces()) {
      if (dot(h.normal, x) == h.offset && !is_zero(h.normal)) active.push_back(h.normal);
    }
    if (active.empty()) return ConvexCone::zero(n);
    auto polar = cone_from_generators(n, active);
    normals.insert(normals.end(), polar.normals().begin(), polar.normals().end());
  }
  if (!any) throw Error(ErrorCode::NotInSet, "point " + format_vector(x) + " is not in S");
  return ConvexCone(n, std::move(normals));
}

ConvexPolyhedron polyhedron_of(std::size_t n, const std::vector<LinearConstraint>& cons) {
  std::vector<Halfspace> hs;
  for (const auto& c : cons) {
    hs.push_back({c.a, c.b});
    if (c.rel == Relation::Eq) hs.push_back({negate(c.a), -c.b});
  }
  return ConvexPolyhedron(n, std::move(hs));
}

// Every piece misses the open ball B(center, sqrt(r2)).
bool ball_misses(const PolyhedralSet& s, const std::vector<std::optional<Vec>>& starts, const Vec& center,
                 const Rational& r2) {
  for (std::size_t i = 0; i < s.pieces().size(); ++i) {
    const auto& piece = s.pieces()[i];
    if (piece.is_empty()) continue;
    auto proj = starts[i] ? dist_to_convex(center, piece, *starts[i]) : dist_to_convex(center, piece);
    if (proj.squared_distance < r2) return false;
  }
  return true;
}

bool ball_misses_floating(const PolyhedralSet& s, const std::vector<std::optional<Vec>>& starts, const Vec& center,
                          double radius) {
  for (std::size_t i = 0; i < s.pieces().size(); ++i) {
    const auto& piece = s.pieces()[i];
    if (piece.is_empty()) continue;
    auto proj = starts[i] ? dist_to_convex(center, piece, *starts[i]) : dist_to_convex(center, piece);
    if (proj.distance < radius * (1 - 1e-12)) return false;
  }
  return true;
}

// {z : <-a_i, z> >= <-a_i, apex>}, the translate apex + gamma^a.
ConvexPolyhedron antipodal_translate(const ConvexCone& gamma, const Vec& apex) {
  std::vector<Halfspace> hs;
  for (const auto& a : gamma.normals()) hs.push_back({negate(a), -dot(a, apex)});
  return ConvexPolyhedron(gamma.dim(), std::move(hs));
}

Rational l1_norm(const Vec& v) {
  Rational s = 0;
  for (const auto& c : v) s += abs(c);
  return s;
}

bool in_interior_of_cone(const ConvexCone& gamma, const Vec& v);

bool in_interior_of_polar(const ConvexCone& gamma, const Vec& xi) {
  return is_proper_cone(gamma) && in_interior_of_cone(polar_cone(gamma), xi);
}

bool in_interior_of_cone(const ConvexCone& gamma, const Vec& v) {
  if (!is_proper_cone(polar_cone(gamma))) return false;
  for (const auto& a : gamma.normals()) {
    if (!is_zero(a) && sgn(dot(a, v)) <= 0) return false;
  }
  return true;
}

}  // namespace

// --- tests ---------------------------------------------------------------------

BallTestParams BallTestParams::defaults() {
  BallTestParams p;
  Rational t = 1;
  for (int i = 0; i < 20; ++i) {
    t /= 2;
    p.t_grid.push_back(t);
  }
  return p;
}

void BallTestParams::validate() const {
  if (t_grid.empty()) throw Error(ErrorCode::InvalidArgument, "t_grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (sgn(t_grid[i]) <= 0) throw Error(ErrorCode::InvalidArgument, "t_grid entries must be positive");
    if (i > 0 && !(t_grid[i] < t_grid[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "t_grid must be strictly decreasing");
    }
  }
}

bool conormal0_halfspace_test(const PolyhedralSet& s, const Vec& x, const Vec& xi) {
  require_member(s, x);
  require_dim(xi, s.dim(), "covector");
  if (is_zero(xi)) return true;
  for (const auto& cone : tangent_cone(s, x)) {
    if (!cone_in_halfspace(cone, xi)) return false;
  }
  return true;
}

bool conormal0_ball_test(const PolyhedralSet& s, const Vec& x, const Vec& xi, const BallTestParams& params) {
  params.validate();
  require_member(s, x);
  require_dim(xi, s.dim(), "covector");
  if (is_zero(xi)) return true;

  std::vector<std::optional<Vec>> starts;
  for (const auto& piece : s.pieces()) starts.push_back(piece.contains(x) ? std::optional<Vec>(x) : std::nullopt);

  Rational xi2 = squared_norm(xi);
  double xi_norm = norm(xi);
  for (const auto& t : params.t_grid) {
    Vec center = sub(x, scale(xi, t));
    bool misses = params.mode == BallTestParams::Mode::Exact
                      ? ball_misses(s, starts, center, t * t * xi2)
                      : ball_misses_floating(s, starts, center, to_double(t) * xi_norm);
    if (misses) return true;
  }
  if (params.strict) return conormal0_halfspace_test(s, x, xi);
  return false;
}

ConicSubset conormal0(const PolyhedralSet& s) {
  std::size_t n = s.dim();
  std::vector<ConicPiece> out;
  for (const auto& piece : s.pieces()) {
    if (!piece.is_empty()) out.push_back({piece, ConvexCone::zero(n)});
  }
  for (const auto& cell : arrangement_cells(s)) {
    auto fiber = tangent_polar(s, cell.point);
    if (fiber.is_zero()) continue;
    out.push_back({polyhedron_of(n, closed_version(cell.constraints)), fiber});
  }
  return ConicSubset(n, std::move(out));
}

// --- sweep -----------------------------------------------------------------------

void SweepParams::validate() const {
  if (!is_proper_cone(gamma)) throw Error(ErrorCode::ParameterInconsistency, "gamma is not proper");
  if (sgn(epsilon) <= 0 || sgn(delta) <= 0 || sgn(rho) <= 0) {
    throw Error(ErrorCode::ParameterInconsistency, "epsilon, delta and rho must be positive");
  }
  require_dim(v, gamma.dim(), "v");
  if (!in_interior_of_cone(gamma, v)) throw Error(ErrorCode::ParameterInconsistency, "v is not in Int(gamma)");
}

bool ConicNeighborhood::contains(const CotangentPoint& p) const {
  if (is_zero(p.xi)) return false;
  return squared_distance(p.x, center) < radius * radius && fiber.contains(p.xi);
}

SweepSetup derive_sweep_setup(const PolyhedralSet& s, const CotangentPoint& p, const Rational& radius) {
  std::size_t n = s.dim();
  require_member(s, p.x);
  require_dim(p.xi, n, "covector");
  if (sgn(radius) <= 0) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (is_zero(p.xi)) throw Error(ErrorCode::InvalidArgument, "xi = 0: use the ball test directly");
  if (!conormal0_halfspace_test(s, p.x, p.xi)) {
    throw Error(ErrorCode::HypothesisViolated, "C_x(S) is not in the half-space of xi");
  }
  const Vec& x0 = p.x;
  const Vec& xi0 = p.xi;

  // gamma° is spanned by xi0 +- mu e_j; each generator pairs positively with xi0.
  Rational q = squared_norm(xi0);
  Rational mu = q / (2 * l1_norm(xi0));
  std::vector<Vec> gens;
  for (std::size_t j = 0; j < n; ++j) {
    for (int sign : {1, -1}) {
      Vec g = xi0;
      g[j] += sign * mu;
      gens.push_back(std::move(g));
    }
  }
  ConvexCone gamma(n, gens);
  ConvexCone polar = cone_from_generators(n, gens);  // gamma°; its normals span gamma
  const Vec& v = xi0;

  // kappa <= <e, xi0> / |e| over the extreme rays e of gamma.
  Rational kappa;
  bool first = true;
  for (const auto& e : polar.normals()) {
    Rational k = dot(e, xi0) / l1_norm(e);
    if (first || k < kappa) kappa = k;
    first = false;
  }
  Rational rho = radius * kappa / 2;
  auto localized = [&](const Rational& r) {
    // S cap closure(H_-) cap (x0 + gamma^a) cap {<x - x0, xi0> < 0} is empty.
    for (const auto& piece : s.pieces()) {
      if (piece.is_empty()) continue;
      auto cons = piece.constraints();
      for (const auto& a : gamma.normals()) cons.push_back({negate(a), -dot(a, x0), Relation::Ge});
      cons.push_back({xi0, dot(xi0, x0) - r, Relation::Ge});
      cons.push_back({negate(xi0), -dot(xi0, x0), Relation::Gt});
      if (lp::feasible(n, cons)) return false;
    }
    return true;
  };
  int tries = 0;
  while (!localized(rho)) {
    rho /= 2;
    if (++tries > 60) throw Error(ErrorCode::HypothesisViolated, "no localizing rho found");
  }
  Rational delta = rho / (2 * dot(v, xi0));

  Rational eps;
  first = true;
  for (const auto& a : gamma.normals()) {
    Rational e = dot(a, scale(v, delta)) / (2 * l1_norm(a));
    if (first || e < eps) eps = e;
    first = false;
  }
  Rational eps_ball = radius / (4 * (1 + l1_norm(xi0) / kappa));
  if (eps_ball < eps) eps = eps_ball;

  // Points of S_0 on the slab boundary stay at distance > eps from x0 + gamma^a.
  auto q0 = antipodal_translate(gamma, x0);
  auto separated = [&](const Rational& e) {
    for (const auto& piece : s.pieces()) {
      auto face = piece.with({xi0, dot(xi0, x0) - rho}).with({negate(xi0), rho - dot(xi0, x0)});
      if (face.is_empty()) continue;
      if (closest_points(face, q0, 4 * e * e)) return false;
    }
    return true;
  };
  tries = 0;
  while (!separated(eps)) {
    eps /= 2;
    if (++tries > 60) throw Error(ErrorCode::HypothesisViolated, "no admissible epsilon found");
  }

  SweepSetup setup;
  setup.params = SweepParams{gamma, eps, v, delta, rho};
  setup.neighborhood = ConicNeighborhood{x0, radius, polar};
  return setup;
}

SweepResult sweep_support_search(const PolyhedralSet& s, const CotangentPoint& p, const SweepParams& params,
                                 const ConicNeighborhood& u, int max_bisection_steps) {
  std::size_t n = s.dim();
  require_member(s, p.x);
  require_dim(p.xi, n, "covector");
  if (is_zero(p.xi)) throw Error(ErrorCode::InvalidArgument, "xi = 0: use the ball test directly");
  if (params.gamma.dim() != n) throw Error(ErrorCode::DimensionMismatch, "gamma has the wrong dimension");
  params.validate();
  if (!in_interior_of_polar(params.gamma, p.xi)) {
    throw Error(ErrorCode::ParameterInconsistency, "xi_0 is not in Int(gamma°)");
  }
  if (!conormal0_halfspace_test(s, p.x, p.xi)) {
    throw Error(ErrorCode::HypothesisViolated, "C_x(S) is not in the half-space of xi");
  }
  const Vec& x0 = p.x;
  const Vec& xi0 = p.xi;

  std::vector<ConvexPolyhedron> s0;
  for (const auto& piece : s.pieces()) {
    auto cut = piece.with({xi0, dot(xi0, x0) - params.rho});
    if (!cut.is_empty()) s0.push_back(std::move(cut));
  }
  Rational eps2 = params.epsilon * params.epsilon;
  auto apex = [&](const Rational& t) { return add(x0, scale(params.v, t)); };
  auto misses = [&](const Rational& t) {
    auto q = antipodal_translate(params.gamma, apex(t));
    for (const auto& piece : s0) {
      if (closest_points(piece, q, eps2)) return false;
    }
    return true;
  };

  Rational lo = -1;
  for (int i = 0; i < 64 && !misses(lo); ++i) lo *= 2;
  if (!misses(lo)) throw Error(ErrorCode::HypothesisViolated, "the sweep never separates from S_0");
  Rational hi = 0;
  SweepResult result;
  for (int i = 0; i < max_bisection_steps; ++i) {
    Rational mid = (lo + hi) / 2;
    if (misses(mid)) lo = mid;
    else hi = mid;
    ++result.bisection_steps;
  }

  auto q = antipodal_translate(params.gamma, apex(lo));
  std::optional<PolyhedraDistance> best;
  for (const auto& piece : s0) {
    auto d = closest_points(piece, q);
    if (d && (!best || d->squared_distance < best->squared_distance)) best = std::move(d);
  }
  if (!best) throw Error(ErrorCode::HypothesisViolated, "S_0 is empty");

  result.point = CotangentPoint{best->first, sub(best->first, best->second)};
  result.c_lower = lo;
  result.c_upper = hi;
  result.ball_center = best->second;
  result.squared_radius = best->squared_distance;
  result.ball_test = conormal0_ball_test(s, result.point.x, result.point.xi);
  if (!u.contains(result.point)) {
    throw Error(ErrorCode::ParameterInconsistency, "contact point " + format_vector(result.point.x) +
                                                       " left the neighborhood U");
  }
  return result;
}

// --- embedding -----------------------------------------------------------------

Vec AffineMap::apply(const Vec& x) const {
  require_dim(x, source_dim(), "point");
  Vec y = offset;
  for (std::size_t i = 0; i < linear.size(); ++i) y[i] += dot(linear[i], x);
  return y;
}

namespace {

struct Embedding {
  std::size_t m = 0, n = 0;
  linalg::Matrix l;    // n x m
  linalg::Matrix gram; // L^T L
  linalg::Matrix cokernel;  // basis of ker(L^T)
  Vec c;

  // L (L^T L)^{-1} a, the pullback of the functional a along the left inverse.
  Vec pull(const Vec& a) const {
    auto z = linalg::solve(gram, a, m);
    Vec u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = dot(l[i], *z);
    return u;
  }

  Vec push(const Vec& a) const {
    Vec u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = dot(l[i], a);
    return u;
  }

  ConvexPolyhedron image(const ConvexPolyhedron& p) const {
    std::vector<Halfspace> hs;
    for (const auto& h : p.halfspaces()) {
      Vec u = pull(h.normal);
      hs.push_back({u, h.offset + dot(u, c)});
    }
    for (const auto& w : cokernel) {
      hs.push_back({w, dot(w, c)});
      hs.push_back({negate(w), -dot(w, c)});
    }
    return ConvexPolyhedron(n, std::move(hs));
  }
};

Embedding make_embedding(const AffineMap& f) {
  Embedding e;
  e.n = f.target_dim();
  e.m = f.source_dim();
  if (f.offset.size() != e.n) throw Error(ErrorCode::DimensionMismatch, "offset has the wrong dimension");
  for (const auto& row : f.linear) require_dim(row, e.m, "row of the linear part");
  e.l = f.linear;
  e.c = f.offset;
  if (linalg::rank(e.l, e.m) != e.m) throw Error(ErrorCode::NotInjective, "linear part is not injective");
  auto lt = linalg::transpose(e.l, e.m);
  e.gram.assign(e.m, zeros(e.m));
  for (std::size_t i = 0; i < e.m; ++i) {
    for (std::size_t j = 0; j < e.m; ++j) e.gram[i][j] = dot(lt[i], lt[j]);
  }
  e.cokernel = linalg::nullspace(lt, e.n);
  return e;
}

}  // namespace

PolyhedralSet AffineMap::image(const PolyhedralSet& s) const {
  auto e = make_embedding(*this);
  if (s.dim() != e.m) throw Error(ErrorCode::DimensionMismatch, "set and map dimensions differ");
  std::vector<ConvexPolyhedron> pieces;
  for (const auto& piece : s.pieces()) pieces.push_back(e.image(piece));
  return PolyhedralSet(e.n, std::move(pieces));
}

ConicSubset embed_conormal(const PolyhedralSet& s, const AffineMap& f) {
  auto e = make_embedding(f);
  if (s.dim() != e.m) throw Error(ErrorCode::DimensionMismatch, "set and map dimensions differ");
  std::vector<ConicPiece> pieces;
  auto source = conormal0(s);
  for (const auto& piece : source.pieces()) {
    std::vector<Vec> normals;
    for (const auto& a : piece.fiber.normals()) normals.push_back(e.push(a));
    pieces.push_back({e.image(piece.base), ConvexCone(e.n, std::move(normals))});
  }
  return ConicSubset(e.n, std::move(pieces));
}

bool openness_criterion(const PolyhedralSet& s) {
  auto n0 = conormal0(s);
  for (const auto& piece : n0.pieces()) {
    if (!piece.base.is_empty() && !piece.fiber.is_zero()) return false;
  }
  return true;
}

// --- minimization ------------------------------------------------------------------

namespace {

bool positive_semidefinite(const std::vector<Vec>& q) {
  std::size_t n = q.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    linalg::Matrix minor;
    for (auto i : idx) {
      Vec row;
      for (auto j : idx) row.push_back(q[i][j]);
      minor.push_back(std::move(row));
    }
    if (sgn(linalg::determinant(minor)) < 0) return false;
  }
  return true;
}

// A KKT point of min 1/2 x^T Q x + <c, x> over the piece, if one exists.
std::optional<Vec> kkt_point(const QuadraticForm& f, const ConvexPolyhedron& piece) {
  std::size_t n = f.linear.size();
  const auto& hs = piece.halfspaces();
  std::size_t m = hs.size();
  std::optional<Vec> found;
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t, linalg::Matrix&)> search = [&](std::size_t start, linalg::Matrix& rows) {
    if (found) return;
    // Variables (x, lambda) with lambda indexed by `chosen`.
    std::size_t k = chosen.size();
    std::size_t dim = n + k;
    std::vector<LinearConstraint> cons;
    for (std::size_t i = 0; i < n; ++i) {
      Vec a = zeros(dim);
      for (std::size_t j = 0; j < n; ++j) a[j] = f.q[i][j];
      for (std::size_t t = 0; t < k; ++t) a[n + t] = -hs[chosen[t]].normal[i];
      cons.push_back({std::move(a), -f.linear[i], Relation::Eq});
    }
    for (std::size_t r = 0; r < m; ++r) {
      Vec a = zeros(dim);
      std::copy(hs[r].normal.begin(), hs[r].normal.end(), a.begin());
      bool active = std::find(chosen.begin(), chosen.end(), r) != chosen.end();
      cons.push_back({std::move(a), hs[r].offset, active ? Relation::Eq : Relation::Ge});
    }
    for (std::size_t t = 0; t < k; ++t) cons.push_back({unit_vector(dim, n + t), 0, Relation::Ge});
    if (auto sol = lp::find_point(dim, cons)) {
      found = Vec(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(n));
      return;
    }
    if (k == n) return;
    for (std::size_t r = start; r < m && !found; ++r) {
      rows.push_back(hs[r].normal);
      if (linalg::rank(rows, n) == rows.size()) {
        chosen.push_back(r);
        search(r + 1, rows);
        chosen.pop_back();
      }
      rows.pop_back();
    }
  };
  linalg::Matrix rows;
  search(0, rows);
  return found;
}

}  // namespace

MinPrincipleReport min_principle_check(const ScalarField& f, const PolyhedralSet& s) {
  std::size_t n = s.dim();
  if (f.uses_fiber_variables()) throw Error(ErrorCode::InvalidArgument, "f must depend on x only");
  if (f.dimension() > n) throw Error(ErrorCode::DimensionMismatch, "f uses more variables than S has");
  if (s.is_empty()) throw Error(ErrorCode::InvalidArgument, "S is empty");
  auto form = as_quadratic(f, n);
  if (!form) throw Error(ErrorCode::Unsupported, "only affine and quadratic f are supported");
  if (!positive_semidefinite(form->q)) throw Error(ErrorCode::Unsupported, "quadratic f is not convex");

  MinPrincipleReport report;
  bool have = false;
  for (const auto& piece : s.pieces()) {
    if (piece.is_empty()) continue;
    auto x = kkt_point(*form, piece);
    if (!x) throw Error(ErrorCode::UnboundedBelow, "f is unbounded below on S");
    Rational value = f.evaluate(*x, zeros(n));
    if (!have || value < report.min_value) {
      report.minimizer = *x;
      report.min_value = value;
      have = true;
    }
  }
  Vec grad = form->linear;
  for (std::size_t i = 0; i < n; ++i) grad[i] += dot(form->q[i], report.minimizer);
  report.differential = grad;
  report.in_conormal = conic_membership(conormal0(s), {report.minimizer, report.differential});
  return report;
}

ProperConeProbe proper_cone_probe(const PolyhedralSet& s, const ConvexCone& gamma) {
  std::size_t n = s.dim();
  if (gamma.dim() != n) throw Error(ErrorCode::DimensionMismatch, "gamma has the wrong dimension");
  if (!is_proper_cone(gamma)) throw Error(ErrorCode::NotProperCone, "gamma is not proper");
  ProperConeProbe probe;
  if (s.is_empty()) {
    probe.verified = true;
    return probe;
  }
  if (!s.is_bounded()) throw Error(ErrorCode::UnboundedSet, "S is not bounded");
  Vec direction = interior_polar_direction(gamma);
  std::optional<lp::Solution> best;
  for (const auto& piece : s.pieces()) {
    if (piece.is_empty()) continue;
    auto cons = piece.constraints();
    auto sol = lp::minimize(direction, n, cons);
    if (!best || sol.value < best->value) best = std::move(sol);
  }
  probe.witness = CotangentPoint{best->x, direction};
  probe.verified = in_interior_of_polar(gamma, direction) && conic_membership(conormal0(s), *probe.witness);
  return probe;
}

}  // namespace microlocal
