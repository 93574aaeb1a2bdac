#include "microlocal/errors.hpp"
#include "microlocal/fixtures.hpp"
#include "microlocal/normalcone.hpp"
#include "microlocal/sheaf.hpp"
#include "microlocal/symplectic.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace microlocal;
using namespace testing_support;

namespace {

ConvexPolyhedron poly(std::size_t n, std::vector<Halfspace> hs) { return ConvexPolyhedron(n, std::move(hs)); }

StratifiedSheafDescription single_stratum(const PolyhedralSet& closed, ConicSubset lambda, std::vector<int> degrees) {
  StratifiedSheafDescription d;
  d.dim = closed.dim();
  StratumDatum s;
  s.id = "only";
  s.stratum = LocallyClosedPolyhedralSet::closed(closed);
  s.lambda = std::move(lambda);
  s.degrees = std::move(degrees);
  d.strata.push_back(std::move(s));
  return d;
}

}  // namespace

TEST_CASE("hand-written fixtures agree with conormal0") {
  CHECK(conic_equal(fixtures::union_conormal(), conormal0(fixtures::union_set())));
  for (const auto& f : fixtures::involutivity_catalog()) {
    CAPTURE(f.name);
    // Every polyhedral fixture that is an N*_0 is recomputed from its base.
    if (f.name == "union_ss1" || f.name == "open_half_line_ss0") continue;
    CHECK(conic_equal(f.set, conormal0(base_projection(f.set))));
  }
}

TEST_CASE("ssk_from_strata on the union example") {
  auto d = fixtures::union_strata();
  CHECK_NOTHROW(d.validate());
  CHECK(d.strata.size() == 4);
  CHECK(ssk_from_strata(d, -1).pieces().empty());
  auto ss0 = ssk_from_strata(d, 0);
  auto ss1 = ssk_from_strata(d, 1);
  CHECK(conic_equal(ss0, conormal0(fixtures::union_set())));
  CHECK(conic_equal(ss1, conic_union(ss0, fixtures::origin_quadrant())));
  CHECK_FALSE(conic_equal(ss0, ss1));
  CHECK(conic_membership(ss1, {Vec{0, 0}, Vec{1, 2}}));
  CHECK_FALSE(conic_membership(ss0, {Vec{0, 0}, Vec{1, 2}}));
  // Monotone in k and stable past the largest degree.
  for (int k = -2; k < 4; ++k) CHECK(conic_contains(ssk_from_strata(d, k + 1), ssk_from_strata(d, k)));
  CHECK(conic_equal(ssk_from_strata(d, 5), ss1));
}

TEST_CASE("ssk_from_strata of a single open stratum") {
  auto whole = PolyhedralSet::whole(2);
  auto d = single_stratum(whole, ConicSubset::zero_section(whole), {0});
  CHECK(ssk_from_strata(d, -1).pieces().empty());
  CHECK(conic_equal(ssk_from_strata(d, 0), ConicSubset::zero_section(whole)));
}

TEST_CASE("the open half-line") {
  auto d = fixtures::open_half_line_strata();
  CHECK_NOTHROW(d.validate());
  CHECK(conic_equal(ssk_from_strata(d, 0), fixtures::open_half_line_ss0()));
  // SS_0(k_Z) differs from N*_0 of the closure of Z.
  CHECK_FALSE(conic_equal(ssk_from_strata(d, 0), conormal0(fixtures::open_half_line().closure())));
  CHECK(conic_membership(ssk_from_strata(d, 1), {Vec{0}, Vec{-1}}));
}

TEST_CASE("description validation") {
  auto d = fixtures::union_strata();
  auto bad_fiber = d;
  bad_fiber.strata[1].lambda = ConicSubset(2, {{bad_fiber.strata[1].lambda.pieces()[0].base, ConvexCone::ray(Vec{1, 0})}});
  CHECK_THROWS_AS(bad_fiber.validate(), Error);
  auto overlap = d;
  overlap.strata[3].stratum = LocallyClosedPolyhedralSet::closed(PolyhedralSet(2, {ConvexPolyhedron::point(Vec{-1, 0})}));
  overlap.strata[3].lambda = ConicSubset(2, {{ConvexPolyhedron::point(Vec{-1, 0}), ConvexCone::orthant(2)}});
  CHECK_THROWS_AS(overlap.validate(), Error);
  auto duplicate = d;
  duplicate.strata[2].id = duplicate.strata[1].id;
  CHECK_THROWS_AS(duplicate.validate(), Error);
  auto no_degrees = d;
  no_degrees.strata[0].degrees.clear();
  CHECK_THROWS_AS(no_degrees.validate(), Error);
}

TEST_CASE("ss0_constant") {
  CHECK(conic_equal(ss0_constant(PolyhedralSet::whole(2)), ConicSubset::zero_section(PolyhedralSet::whole(2))));
  PolyhedralSet half(2, {poly(2, {{Vec{0, 1}, 0}})});
  ConicSubset expected(2, {{half.pieces()[0], ConvexCone::zero(2)},
                           {ConvexPolyhedron::hyperplane(Vec{0, 1}, 0), ConvexCone::ray(Vec{0, 1})}});
  CHECK(conic_equal(ss0_constant(half), expected));
  CHECK(ss0_constant(PolyhedralSet::empty(2)).pieces().empty());
}

TEST_CASE("perverse_ssk") {
  auto whole = PolyhedralSet::whole(2);
  auto line = PolyhedralSet(2, {ConvexPolyhedron::hyperplane(Vec{1, 0}, 0)});
  auto point = PolyhedralSet(2, {ConvexPolyhedron::point(Vec{0, 0})});
  std::map<std::string, ConicSubset> conormals{
      {"X", conormal_bundle_closure(LocallyClosedPolyhedralSet::closed(whole))},
      {"L", conormal_bundle_closure(LocallyClosedPolyhedralSet::closed(line))},
      {"P", conormal_bundle_closure(LocallyClosedPolyhedralSet::closed(point))},
  };
  std::map<std::string, int> codims{{"X", 0}, {"L", 1}, {"P", 2}};
  CHECK(conic_equal(conormals["L"], ConicSubset(2, {{line.pieces()[0], ConvexCone::line(Vec{1, 0})}})));
  CHECK(conic_equal(conormals["P"], ConicSubset(2, {{point.pieces()[0], ConvexCone::whole(2)}})));
  CHECK(perverse_ssk(codims, conormals, -1).pieces().empty());
  CHECK(conic_equal(perverse_ssk({{"X", 0}}, {{"X", conormals["X"]}}, 0), ConicSubset::zero_section(whole)));
  CHECK(conic_equal(perverse_ssk(codims, conormals, 1), conic_union(conormals["X"], conormals["L"])));
  CHECK(conic_equal(perverse_ssk(codims, conormals, 2),
                    conic_union(conic_union(conormals["X"], conormals["L"]), conormals["P"])));
  CHECK_THROWS_AS(perverse_ssk({{"X", 0}}, conormals, 1), Error);
}

TEST_CASE("perversity_check instances") {
  for (const auto& inst : fixtures::perversity_instances()) {
    CAPTURE(inst.name);
    CHECK(perversity_check(inst.f, inst.dual, inst.codims).perverse == inst.expected);
  }
  auto inst = fixtures::perversity_instances()[1];
  auto report = perversity_check(inst.f, inst.dual, inst.codims);
  CHECK(report.first_failure == 0);
  CHECK_THROWS_AS(perversity_check(inst.f, inst.dual, {}), Error);
  auto other = fixtures::perversity_instances()[0];
  CHECK_THROWS_AS(perversity_check(inst.f, other.dual, inst.codims), Error);
}

TEST_CASE("prune invariance") {
  auto ss1 = ssk_from_strata(fixtures::union_strata(), 1);
  ConicSubset diagonal_ray(2, {{ConvexPolyhedron::point(Vec{0, 0}), ConvexCone::ray(Vec{1, 1})}});
  CHECK(prune_invariance(ss1, diagonal_ray).invariant);

  PolyhedralSet half(2, {poly(2, {{Vec{1, 0}, 0}})});
  PolyhedralSet edge(2, {ConvexPolyhedron::hyperplane(Vec{1, 0}, 0)});
  CHECK(prune_invariance(ConicSubset::zero_section(half), ConicSubset::zero_section(edge)).invariant);

  ConicSubset ray1(1, {{ConvexPolyhedron::point(Vec{0}), ConvexCone::ray(Vec{1})}});
  CHECK_THROWS_AS(prune_invariance(ray1, ray1), Error);

  // An isolated thin piece of A is removed entirely by S.
  ConicSubset thin(2, {{ConvexPolyhedron::point(Vec{0, 0}), ConvexCone::ray(Vec{1, 0})}});
  auto report = prune_invariance(conic_union(ConicSubset::zero_section(half), thin), thin);
  CHECK_FALSE(report.invariant);
  CHECK(report.reason == "s_not_lower_dimensional_relative_to_a");

  // A non-involutive segment {(-1, t; 0, 0) : |t| <= 1} crossing SS_0.
  auto ss0 = ssk_from_strata(fixtures::union_strata(), 0);
  ConicSubset crossing(2, {{poly(2, {{Vec{1, 0}, -1}, {Vec{-1, 0}, 1}, {Vec{0, 1}, -1}, {Vec{0, -1}, -1}}),
                            ConvexCone::zero(2)}});
  CHECK(piece_dimension(crossing.pieces()[0]) == 1);
  CHECK(prune_invariance(ss0, crossing).invariant);
}

TEST_CASE("outputs are weakly involutive on the fixture catalog") {
  auto d = fixtures::union_strata();
  auto catalog = fixtures::involutivity_catalog();
  std::map<std::string, const fixtures::InvolutivityFixture*> by_name;
  for (const auto& f : catalog) by_name[f.name] = &f;
  for (int k = 0; k <= 1; ++k) {
    auto a = sample_conic_subset(ssk_from_strata(d, k), 500, 11 + static_cast<std::uint64_t>(k));
    const auto& gens = by_name[k == 0 ? "union_ss0" : "union_ss1"]->generators;
    for (const auto& f : gens) {
      for (const auto& g : gens) {
        CHECK(weak_involutivity_check(a, f, g).verdict == BracketReport::Verdict::Pass);
      }
    }
  }
}

TEST_CASE("the truncated microsupport of k_(0,oo) is not strongly involutive") {
  auto report = strong_involutivity_demo();
  CHECK(report.ss0_matches_expected);
  CHECK(report.oracle_agrees);
  CHECK(report.sampled_directions > 0);
  CHECK(report.cp_in_kernel);
  CHECK(report.hamiltonian == Vec{-1, 0});
  CHECK(report.hamiltonian_outside);
  CHECK(weak_involutivity_check(sample_conic_subset(report.ss0, 500, 3), ScalarField::xi(0), ScalarField::xi(0)).verdict ==
        BracketReport::Verdict::Pass);
}
