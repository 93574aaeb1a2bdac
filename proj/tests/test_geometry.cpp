#include "microlocal/errors.hpp"
#include "microlocal/geometry.hpp"
#include "microlocal/linalg.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace microlocal;
using namespace testing_support;

namespace {

// Brute-force polar membership: xi is in the polar iff <v, xi> >= 0 for all
// members v of gamma on an integer grid (which contains the extreme rays of
// the cones used here).
bool polar_by_sampling(const ConvexCone& gamma, const Vec& xi, int bound = 4) {
  const std::size_t n = gamma.dim();
  Vec v(n);
  std::function<bool(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) return !gamma.contains(v) || dot(v, xi) >= 0;
    for (int c = -bound; c <= bound; ++c) {
      v[i] = c;
      if (!rec(i + 1)) return false;
    }
    return true;
  };
  return rec(0);
}

// Vertices of a bounded planar polygon by pairwise line intersection (double).
std::vector<std::array<double, 2>> polygon_vertices(const ConvexPolyhedron& c) {
  std::vector<std::array<double, 2>> out;
  const auto& hs = c.halfspaces();
  for (std::size_t i = 0; i < hs.size(); ++i) {
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      double a = to_double(hs[i].normal[0]), b = to_double(hs[i].normal[1]);
      double d = to_double(hs[j].normal[0]), e = to_double(hs[j].normal[1]);
      double det = a * e - b * d;
      if (std::abs(det) < 1e-12) continue;
      double r1 = to_double(hs[i].offset), r2 = to_double(hs[j].offset);
      double x = (r1 * e - b * r2) / det, y = (a * r2 - r1 * d) / det;
      bool ok = true;
      for (const auto& h : hs) {
        if (to_double(h.normal[0]) * x + to_double(h.normal[1]) * y < to_double(h.offset) - 1e-9) ok = false;
      }
      if (ok) out.push_back({x, y});
    }
  }
  return out;
}

// Distance from p to the convex hull of vertices: min over segments and
// vertices, or 0 when p is inside.
double hull_distance(const std::array<double, 2>& p, const std::vector<std::array<double, 2>>& vs,
                     const ConvexPolyhedron& c) {
  bool inside = true;
  for (const auto& h : c.halfspaces()) {
    if (to_double(h.normal[0]) * p[0] + to_double(h.normal[1]) * p[1] < to_double(h.offset) - 1e-12) inside = false;
  }
  if (inside) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i; j < vs.size(); ++j) {
      double dx = vs[j][0] - vs[i][0], dy = vs[j][1] - vs[i][1];
      double len2 = dx * dx + dy * dy;
      double t = len2 > 0 ? ((p[0] - vs[i][0]) * dx + (p[1] - vs[i][1]) * dy) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      double qx = vs[i][0] + t * dx - p[0], qy = vs[i][1] + t * dy - p[1];
      best = std::min(best, std::sqrt(qx * qx + qy * qy));
    }
  }
  return best;
}

// Exhaustive face enumeration: project onto every affine hull of independent
// active sets and keep the closest feasible projection.
Rational enumerated_sq_distance(const Vec& x, const ConvexPolyhedron& c) {
  const auto& hs = c.halfspaces();
  const std::size_t n = c.dim();
  std::optional<Rational> best;
  if (c.contains(x)) return 0;
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (!chosen.empty()) {
      linalg::Matrix a;
      Vec b;
      for (auto i : chosen) {
        a.push_back(hs[i].normal);
        b.push_back(hs[i].offset);
      }
      if (linalg::rank(a, n) < a.size()) return;
      Vec y = linalg::project_onto_affine(a, b, x);
      if (c.contains(y)) {
        Rational d = squared_norm(sub(x, y));
        if (!best || d < *best) best = d;
      }
    }
    if (chosen.size() == n) return;
    for (std::size_t i = start; i < hs.size(); ++i) {
      chosen.push_back(i);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
  return *best;
}

ConvexCone random_cone(Rng& rng, std::size_t n) {
  std::vector<Vec> normals;
  const int count = uniform_int(rng, 0, static_cast<int>(n) + 2);
  for (int k = 0; k < count; ++k) normals.push_back(random_integer_vector(rng, n, 3));
  return ConvexCone(n, std::move(normals));
}

}  // namespace

TEST_CASE("polar_cone examples") {
  CHECK(polar_cone(ConvexCone::whole(3)).is_zero());
  CHECK(cones_equal(polar_cone(ConvexCone::orthant(3)), ConvexCone::orthant(3)));
  ConvexCone wedge(2, {{1, 1}, {-1, 1}});  // v2 >= |v1|
  ConvexCone polar = polar_cone(wedge);
  CHECK(cones_equal(polar, wedge));
  for (int a = -3; a <= 3; ++a) {
    for (int b = -3; b <= 3; ++b) {
      Vec xi{a, b};
      CHECK(polar.contains(xi) == polar_by_sampling(wedge, xi));
    }
  }
  CHECK(cones_equal(polar_cone(ConvexCone::zero(2)), ConvexCone::whole(2)));
}

TEST_CASE("polar_cone: double polar and sampled membership on random cones") {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = trial % 2 == 0 ? 2 : 3;
    ConvexCone gamma = random_cone(rng, n);
    ConvexCone polar = polar_cone(gamma);
    CHECK(cones_equal(polar_cone(polar), gamma));
    for (int q = 0; q < 10; ++q) {
      Vec xi = random_integer_vector(rng, n, 3, false);
      // Grid with bound 9 contains every extreme ray of cones with integer
      // normals in [-3,3] in dimension 2; in dimension 3 only check one side.
      if (n == 2) {
        CHECK(polar.contains(xi) == polar_by_sampling(gamma, xi, 9));
      } else if (polar.contains(xi)) {
        CHECK(polar_by_sampling(gamma, xi, 3));
      }
    }
  }
}

TEST_CASE("is_proper_cone") {
  CHECK(is_proper_cone(ConvexCone::zero(2)));
  CHECK_FALSE(is_proper_cone(ConvexCone(2, {{0, 1}})));
  CHECK(is_proper_cone(ConvexCone::orthant(2)));
  CHECK_FALSE(is_proper_cone(ConvexCone::whole(2)));
  Vec v = interior_polar_direction(ConvexCone::orthant(2));
  CHECK(v == Vec{1, 1});
}

TEST_CASE("dist_to_convex examples") {
  ConvexPolyhedron square = ConvexPolyhedron::box({0, 0}, {1, 1});
  auto inside = dist_to_convex({Rational(1, 2), Rational(1, 3)}, square);
  CHECK(inside.squared_distance == 0);
  ConvexPolyhedron left(2, {{{-1, 0}, 0}});
  auto p = dist_to_convex({3, 5}, left);
  CHECK(p.squared_distance == 9);
  CHECK(p.nearest == Vec{0, 5});
  ConvexPolyhedron negative(2, {{{-1, 0}, 0}, {{0, -1}, 0}});
  auto q = dist_to_convex({1, 2}, negative);
  CHECK(q.squared_distance == 5);
  CHECK(q.distance == doctest::Approx(std::sqrt(5.0)));
  CHECK(q.nearest == Vec{0, 0});
  CHECK_THROWS_AS(dist_to_convex({0, 0}, ConvexPolyhedron(2, {{{0, 0}, 1}})), Error);
}

TEST_CASE("dist_to_convex: variational inequality and segment oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    ConvexPolyhedron c = random_polyhedron(rng, 2);
    Vec x{uniform_rational(rng, -5, 5, 7), uniform_rational(rng, -5, 5, 7)};
    auto proj = dist_to_convex(x, c);
    REQUIRE(c.contains(proj.nearest));
    auto vertices = polygon_vertices(c);
    for (const auto& v : vertices) {
      double lhs = (to_double(x[0]) - to_double(proj.nearest[0])) * (v[0] - to_double(proj.nearest[0])) +
                   (to_double(x[1]) - to_double(proj.nearest[1])) * (v[1] - to_double(proj.nearest[1]));
      CHECK(lhs <= 1e-9);
    }
    double oracle = hull_distance({to_double(x[0]), to_double(x[1])}, vertices, c);
    CHECK(proj.distance == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(proj.squared_distance == enumerated_sq_distance(x, c));
  }
  for (int trial = 0; trial < 100; ++trial) {
    ConvexPolyhedron c = random_polyhedron(rng, 3, trial % 3 != 0);
    Vec x = random_integer_vector(rng, 3, 5, false);
    auto proj = dist_to_convex(x, c);
    REQUIRE(c.contains(proj.nearest));
    CHECK(proj.squared_distance == enumerated_sq_distance(x, c));
  }
}

TEST_CASE("closest_points between polyhedra") {
  ConvexPolyhedron a = ConvexPolyhedron::box({0, 0}, {1, 1});
  ConvexPolyhedron b = ConvexPolyhedron::box({3, 2}, {4, 5});
  auto d = closest_points(a, b);
  REQUIRE(d);
  CHECK(d->squared_distance == 5);
  CHECK(d->first == Vec{1, 1});
  CHECK(d->second == Vec{3, 2});
  CHECK_FALSE(closest_points(a, b, Rational(5)));
  CHECK(closest_points(a, b, Rational(6)));
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    ConvexPolyhedron p = random_polyhedron(rng, 2);
    ConvexPolyhedron q = random_polyhedron(rng, 2);
    auto r = closest_points(p, q);
    REQUIRE(r);
    CHECK(p.contains(r->first));
    CHECK(q.contains(r->second));
    // Oracle: distance from the returned point of q to p is the same value.
    CHECK(dist_to_convex(r->second, p).squared_distance == r->squared_distance);
    CHECK(dist_to_convex(r->first, q).squared_distance == r->squared_distance);
  }
}

TEST_CASE("polyhedron predicates") {
  ConvexPolyhedron seg(2, {{{0, 1}, 0}, {{0, -1}, 0}, {{1, 0}, 0}, {{-1, 0}, -1}});
  CHECK(seg.affine_dimension() == 1);
  CHECK(seg.is_bounded());
  auto ri = seg.relative_interior_point();
  REQUIRE(ri);
  CHECK((*ri)[1] == 0);
  CHECK((*ri)[0] > 0);
  CHECK((*ri)[0] < 1);
  CHECK(ConvexPolyhedron::point({1, 2}).affine_dimension() == 0);
  CHECK(ConvexPolyhedron(2, {{{1, 0}, 1}, {{-1, 0}, 0}}).affine_dimension() == -1);
  CHECK_FALSE(ConvexPolyhedron(2, {{{1, 0}, 0}}).is_bounded());
  ConvexPolyhedron redundant(2, {{{1, 0}, 0}, {{2, 0}, -1}, {{2, 0}, 0}, {{0, 1}, 0}});
  auto s = redundant.simplified();
  CHECK(s.halfspaces().size() == 2);
  CHECK(s.contains_polyhedron(redundant));
  CHECK(redundant.contains_polyhedron(s));
}

TEST_CASE("tangent_cone examples") {
  PolyhedralSet quadrant_union(2, {ConvexPolyhedron(2, {{{1, 0}, 0}}), ConvexPolyhedron(2, {{{0, 1}, 0}})});
  auto t = tangent_cone(quadrant_union, {0, 0});
  PolyhedralSet as_set(2, {});
  std::vector<ConvexPolyhedron> pieces;
  for (const auto& c : t) pieces.push_back(c.as_polyhedron());
  CHECK(set_equal(PolyhedralSet(2, pieces), quadrant_union));
  auto interior = tangent_cone(quadrant_union, {1, 1});
  REQUIRE(interior.size() == 2);
  CHECK(interior[0].normals().empty());
  auto square = tangent_cone(PolyhedralSet(2, {ConvexPolyhedron::box({0, 0}, {1, 1})}), {0, 0});
  REQUIRE(square.size() == 1);
  CHECK(cones_equal(square[0], ConvexCone::orthant(2)));
  CHECK_THROWS_AS(tangent_cone(quadrant_union, {-1, -1}), Error);
}

TEST_CASE("normal_cone_pair_sampled examples") {
  PolyhedralSet plane = PolyhedralSet::whole(2);
  auto dense = normal_cone_pair_sampled(plane, plane, {0, 0}, 400, 1);
  CHECK(dense.under_approximation);
  int quadrants[4] = {0, 0, 0, 0};
  for (const auto& v : dense.directions) quadrants[(v[0] >= 0 ? 0 : 1) + (v[1] >= 0 ? 0 : 2)]++;
  for (int q : quadrants) CHECK(q > 10);

  PolyhedralSet ray(2, {ConvexPolyhedron(2, {{{0, 1}, 0}, {{0, -1}, 0}, {{1, 0}, 0}})});
  auto flat = normal_cone_pair_sampled(ray, ray, {0, 0}, 200, 2);
  CHECK_FALSE(flat.directions.empty());
  for (const auto& v : flat.directions) CHECK(v[1] == 0);

  PolyhedralSet right(1, {ConvexPolyhedron(1, {{{1}, 0}})});
  PolyhedralSet left(1, {ConvexPolyhedron(1, {{{-1}, 0}})});
  auto line = normal_cone_pair_sampled(right, left, {0}, 200, 3);
  bool pos = false, neg = false;
  for (const auto& v : line.directions) {
    pos = pos || v[0] > 0;
    neg = neg || v[0] < 0;
  }
  // Brute force over a grid of pairs gives both signs too.
  bool grid_pos = false, grid_neg = false;
  for (int a = 0; a <= 4; ++a) {
    for (int b = -4; b <= 0; ++b) {
      grid_pos = grid_pos || a - b > 0;
      grid_neg = grid_neg || a - b < 0;
    }
  }
  CHECK(pos == grid_pos);
  CHECK(neg == grid_neg);
  CHECK_THROWS_AS(normal_cone_pair_sampled(right, left, {1}, 10, 1), Error);
}

TEST_CASE("tangent cone agrees with the sampled pair cone on a probe") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = trial % 2 == 0 ? 2 : 3;
    PolyhedralSet s = random_polyhedral_set(rng, n, 2);
    if (s.is_empty()) continue;
    Vec x = random_point_of(rng, s);
    auto cones = tangent_cone(s, x);
    auto sampled = normal_cone_pair_sampled(s, PolyhedralSet(n, {ConvexPolyhedron::point(x)}), x,
                                            n == 2 ? 600 : 2000, 100 + trial, Rational(1, 8));
    for (const auto& v : sampled.directions) {
      bool hit = false;
      for (const auto& c : cones) hit = hit || c.contains(v);
      CHECK(hit);
    }
    Rng probe_rng(7);
    for (int k = 0; k < 64; ++k) {
      Vec u = random_integer_vector(probe_rng, n, 3);
      bool in_cone = false;
      for (const auto& c : cones) {
        bool interior = true;
        for (const auto& a : c.normals()) interior = interior && dot(a, u) > 0;
        in_cone = in_cone || interior;
      }
      if (!in_cone) continue;
      double best = -2.0;
      for (const auto& v : sampled.directions) {
        best = std::max(best, to_double(dot(u, v)) / (norm(u) * norm(v)));
      }
      CHECK(best > std::cos(0.3));
    }
  }
}

TEST_CASE("conic subsets: antipodal, membership, scaling") {
  ConicSubset quad(2, {{ConvexPolyhedron::point({0, 0}), ConvexCone::orthant(2)}});
  ConicSubset neg = antipodal(quad);
  CHECK(conic_membership(neg, {{0, 0}, {-1, -2}}));
  CHECK_FALSE(conic_membership(neg, {{0, 0}, {1, 2}}));
  CHECK(conic_equal(antipodal(neg), quad));
  ConicSubset zero = ConicSubset::zero_section(PolyhedralSet::whole(2));
  CHECK(conic_equal(antipodal(zero), zero));
  auto samples = ConicSubset::from_samples(1, {{{1}, {2}}, {{0}, {-1}}});
  auto flipped = antipodal(samples);
  CHECK(flipped.samples()[0].xi == Vec{-2});
  CHECK(flipped.samples()[1].xi == Vec{1});
  CHECK_THROWS_AS(conic_membership(samples, {{1}, {2}}), Error);
  try {
    conic_membership(samples, {{1}, {2}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EstimateOnly);
  }

  Rng rng(23);
  for (int k = 0; k < 1000; ++k) {
    Vec x = random_integer_vector(rng, 2, 2, false);
    Vec xi = random_integer_vector(rng, 2, 3, false);
    Rational lambda = ratio(uniform_int(rng, 1, 20), uniform_int(rng, 1, 20));
    CHECK(conic_membership(quad, {x, xi}) == conic_membership(quad, {x, scale(xi, lambda)}));
  }
}

TEST_CASE("set equality by coverage") {
  // [0,2] = [0,1] u [1,2]
  PolyhedralSet whole(1, {ConvexPolyhedron::box({0}, {2})});
  PolyhedralSet split(1, {ConvexPolyhedron::box({0}, {1}), ConvexPolyhedron::box({1}, {2})});
  CHECK(set_equal(whole, split));
  PolyhedralSet gap(1, {ConvexPolyhedron::box({0}, {1}), ConvexPolyhedron::box({Rational(3, 2)}, {2})});
  CHECK_FALSE(set_contains(gap, whole));
  CHECK(set_contains(whole, gap));
  // A square covered by four triangles around its center.
  ConvexPolyhedron sq = ConvexPolyhedron::box({-1, -1}, {1, 1});
  std::vector<ConvexPolyhedron> tri;
  tri.push_back(sq.with({{1, -1}, 0}).with({{-1, -1}, 0}));
  tri.push_back(sq.with({{-1, 1}, 0}).with({{1, 1}, 0}));
  tri.push_back(sq.with({{1, 1}, 0}).with({{1, -1}, 0}));
  tri.push_back(sq.with({{-1, -1}, 0}).with({{-1, 1}, 0}));
  CHECK(set_equal(PolyhedralSet(2, {sq}), PolyhedralSet(2, tri)));
  tri.pop_back();
  CHECK_FALSE(set_contains(PolyhedralSet(2, tri), PolyhedralSet(2, {sq})));
}

TEST_CASE("conic equality by coverage: fiber split") {
  ConvexPolyhedron origin = ConvexPolyhedron::point({0, 0});
  ConicSubset full(2, {{origin, ConvexCone::whole(2)}});
  ConicSubset halves(2, {{origin, ConvexCone(2, {{1, 0}})}, {origin, ConvexCone(2, {{-1, 0}})}});
  CHECK(conic_equal(full, halves));
  ConicSubset three(2, {{origin, ConvexCone(2, {{1, 0}})}, {origin, ConvexCone(2, {{0, 1}})}});
  CHECK_FALSE(conic_contains(three, full));
  CHECK(conic_contains(full, three));
}

TEST_CASE("sampling respects membership") {
  ConicSubset a(2, {{ConvexPolyhedron(2, {{{1, 0}, 0}}), ConvexCone(2, {{1, 1}, {-1, 1}})},
                    {ConvexPolyhedron::point({-1, 0}), ConvexCone::whole(2)}});
  auto s = sample_conic_subset(a, 200, 9);
  REQUIRE(s.samples().size() == 200);
  int zero = 0;
  for (const auto& p : s.samples()) {
    CHECK(conic_membership(a, p));
    if (is_zero(p.xi)) {
      ++zero;
    } else {
      CHECK(norm(p.xi) == doctest::Approx(1.0).epsilon(1e-4));
    }
  }
  CHECK(zero > 0);
  CHECK(zero < 100);
}

TEST_CASE("products") {
  PolyhedralSet a(1, {ConvexPolyhedron::box({0}, {1})});
  PolyhedralSet b(1, {ConvexPolyhedron::box({2}, {3}), ConvexPolyhedron::box({5}, {6})});
  auto p = set_product(a, b);
  CHECK(p.pieces().size() == 2);
  CHECK(p.contains({Rational(1, 2), Rational(11, 2)}));
  CHECK_FALSE(p.contains({Rational(1, 2), 4}));
  CHECK_THROWS_AS(LocallyClosedPolyhedralSet(a, b), Error);
  LocallyClosedPolyhedralSet lc(b, PolyhedralSet(1, {ConvexPolyhedron::point({2})}));
  CHECK_FALSE(lc.contains({2}));
  CHECK(lc.contains({3}));
}
