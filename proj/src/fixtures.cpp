#include "microlocal/fixtures.hpp"

namespace microlocal::fixtures {

namespace {

ConvexPolyhedron poly(std::size_t n, std::vector<Halfspace> hs) { return ConvexPolyhedron(n, std::move(hs)); }

// Cone generated by the given vectors (all of them extreme here).
ConvexCone span_of(std::size_t n, std::vector<Vec> gens) { return cone_from_generators(n, gens); }

ScalarField x(std::size_t i) { return ScalarField::x(i); }
ScalarField xi(std::size_t i) { return ScalarField::xi(i); }
ScalarField c(long v) { return ScalarField::constant(v); }

StratumDatum stratum(std::string id, LocallyClosedPolyhedralSet y, ConicSubset lambda, std::vector<int> degrees) {
  StratumDatum s;
  s.id = std::move(id);
  s.stratum = std::move(y);
  s.lambda = std::move(lambda);
  s.degrees = std::move(degrees);
  return s;
}

}  // namespace

PolyhedralSet union_set() {
  return PolyhedralSet(2, {poly(2, {{Vec{1, 0}, 0}}), poly(2, {{Vec{0, 1}, 0}})});
}

ConicSubset union_conormal() {
  auto s = union_set();
  return ConicSubset(2, {
                            {s.pieces()[0], ConvexCone::zero(2)},
                            {s.pieces()[1], ConvexCone::zero(2)},
                            {poly(2, {{Vec{0, 1}, 0}, {Vec{0, -1}, 0}, {Vec{-1, 0}, 0}}), ConvexCone::ray(Vec{0, 1})},
                            {poly(2, {{Vec{1, 0}, 0}, {Vec{-1, 0}, 0}, {Vec{0, -1}, 0}}), ConvexCone::ray(Vec{1, 0})},
                        });
}

ConicSubset origin_quadrant() {
  return ConicSubset(2, {{ConvexPolyhedron::point(Vec{0, 0}), ConvexCone::orthant(2)}});
}

StratifiedSheafDescription union_strata() {
  auto s = union_set();
  auto n0 = union_conormal();
  const auto& p = n0.pieces();
  auto origin = PolyhedralSet(2, {ConvexPolyhedron::point(Vec{0, 0})});
  PolyhedralSet boundary(2, {p[2].base, p[3].base});

  StratifiedSheafDescription d;
  d.dim = 2;
  d.strata.push_back(stratum("interior", LocallyClosedPolyhedralSet(s, boundary),
                             ConicSubset(2, {p[0], p[1]}), {0}));
  d.strata.push_back(stratum("ray_y0", LocallyClosedPolyhedralSet(PolyhedralSet(2, {p[2].base}), origin),
                             ConicSubset(2, {p[2]}), {0}));
  d.strata.push_back(stratum("ray_x0", LocallyClosedPolyhedralSet(PolyhedralSet(2, {p[3].base}), origin),
                             ConicSubset(2, {p[3]}), {0}));
  d.strata.push_back(stratum("origin", LocallyClosedPolyhedralSet::closed(origin), origin_quadrant(), {1}));
  return d;
}

LocallyClosedPolyhedralSet open_half_line() {
  return LocallyClosedPolyhedralSet(PolyhedralSet(1, {poly(1, {{Vec{1}, 0}})}),
                                    PolyhedralSet(1, {ConvexPolyhedron::point(Vec{0})}));
}

StratifiedSheafDescription open_half_line_strata() {
  auto z = open_half_line();
  StratifiedSheafDescription d;
  d.dim = 1;
  d.strata.push_back(stratum("half_line", z, ConicSubset::zero_section(z.closure()), {0}));
  d.strata.push_back(stratum("endpoint", LocallyClosedPolyhedralSet::closed(z.removed()),
                             ConicSubset(1, {{ConvexPolyhedron::point(Vec{0}), ConvexCone::ray(Vec{-1})}}), {1}));
  return d;
}

ConicSubset open_half_line_ss0() {
  return ConicSubset(1, {{poly(1, {{Vec{1}, 0}}), ConvexCone::zero(1)}});
}

std::vector<PerversityInstance> perversity_instances() {
  std::vector<PerversityInstance> out;
  {
    StratifiedSheafDescription d;
    d.dim = 2;
    auto whole = PolyhedralSet::whole(2);
    d.strata.push_back(stratum("X", LocallyClosedPolyhedralSet::closed(whole), ConicSubset::zero_section(whole), {0}));
    out.push_back({"constant_sheaf", d, d, {{"X", 0}}, true});
  }
  auto line = LocallyClosedPolyhedralSet::closed(PolyhedralSet(2, {ConvexPolyhedron::hyperplane(Vec{1, 0}, 0)}));
  ConicSubset conormal(2, {{line.closure().pieces()[0], ConvexCone::line(Vec{1, 0})}});
  for (int degree : {0, 1}) {
    StratifiedSheafDescription d;
    d.dim = 2;
    d.strata.push_back(stratum("Y", line, conormal, {degree}));
    out.push_back({degree == 0 ? "codim1_unshifted" : "codim1_shifted", d, d, {{"Y", 1}}, degree == 1});
  }
  return out;
}

std::vector<InvolutivityFixture> involutivity_catalog() {
  std::vector<InvolutivityFixture> out;
  const Vec e1{1, 0}, e2{0, 1};

  out.push_back({"zero_section_r2", ConicSubset::zero_section(PolyhedralSet::whole(2)), {xi(0), xi(1)}});

  out.push_back({"line_conormal",
                 ConicSubset(2, {{ConvexPolyhedron::hyperplane(e1, 0), ConvexCone::line(e1)}}),
                 {x(0), xi(1)}});

  out.push_back({"point_conormal_r2",
                 ConicSubset(2, {{ConvexPolyhedron::point(Vec{0, 0}), ConvexCone::whole(2)}}),
                 {x(0), x(1)}});

  out.push_back({"plane_conormal_r3",
                 ConicSubset(3, {{ConvexPolyhedron::hyperplane(Vec{0, 0, 1}, 0), ConvexCone::line(Vec{0, 0, 1})}}),
                 {x(2), xi(0), xi(1)}});

  out.push_back({"diagonal_conormal",
                 ConicSubset(2, {{ConvexPolyhedron::hyperplane(Vec{1, -1}, 0), ConvexCone::line(Vec{1, -1})}}),
                 {x(0) - x(1), xi(0) + xi(1)}});

  out.push_back({"closed_half_line",
                 ConicSubset(1, {{poly(1, {{Vec{1}, 0}}), ConvexCone::zero(1)},
                                 {ConvexPolyhedron::point(Vec{0}), ConvexCone::ray(Vec{1})}}),
                 {x(0) * xi(0)}});

  out.push_back({"half_plane",
                 ConicSubset(2, {{poly(2, {{e1, 0}}), ConvexCone::zero(2)},
                                 {ConvexPolyhedron::hyperplane(e1, 0), ConvexCone::ray(e1)}}),
                 {xi(1), x(0) * xi(0)}});

  out.push_back({"quadrant",
                 ConicSubset(2, {{ConvexPolyhedron(2, {{e1, 0}, {e2, 0}}), ConvexCone::zero(2)},
                                 {poly(2, {{e1, 0}, {negate(e1), 0}, {e2, 0}}), ConvexCone::ray(e1)},
                                 {poly(2, {{e2, 0}, {negate(e2), 0}, {e1, 0}}), ConvexCone::ray(e2)},
                                 {ConvexPolyhedron::point(Vec{0, 0}), ConvexCone::orthant(2)}}),
                 {x(0) * xi(0), x(1) * xi(1)}});

  out.push_back({"union_ss0", union_conormal(), {x(0) * xi(0), x(1) * xi(1), xi(0) * xi(1)}});

  out.push_back({"union_ss1", conic_union(union_conormal(), origin_quadrant()), {x(0) * xi(0), x(1) * xi(1)}});

  out.push_back({"open_half_line_ss0", open_half_line_ss0(), {xi(0)}});

  {
    auto square = ConvexPolyhedron::box(Vec{0, 0}, Vec{1, 1});
    auto edge = [&](const Vec& n, const Rational& b) {
      return square.with({n, b}).with({negate(n), -b});
    };
    ConicSubset set(2, {
                           {square, ConvexCone::zero(2)},
                           {edge(e1, 0), ConvexCone::ray(e1)},
                           {edge(e1, 1), ConvexCone::ray(negate(e1))},
                           {edge(e2, 0), ConvexCone::ray(e2)},
                           {edge(e2, 1), ConvexCone::ray(negate(e2))},
                           {ConvexPolyhedron::point(Vec{0, 0}), span_of(2, {e1, e2})},
                           {ConvexPolyhedron::point(Vec{1, 0}), span_of(2, {negate(e1), e2})},
                           {ConvexPolyhedron::point(Vec{0, 1}), span_of(2, {e1, negate(e2)})},
                           {ConvexPolyhedron::point(Vec{1, 1}), span_of(2, {negate(e1), negate(e2)})},
                       });
    out.push_back({"unit_square", set, {x(0) * (c(1) - x(0)) * xi(0), x(1) * (c(1) - x(1)) * xi(1)}});
  }

  out.push_back({"point_conormal_r3",
                 ConicSubset(3, {{ConvexPolyhedron::point(Vec{1, 2, 3}), ConvexCone::whole(3)}}),
                 {x(0) - c(1), x(1) - c(2), x(2) - c(3)}});

  {
    auto segment = poly(2, {{e2, 0}, {negate(e2), 0}, {e1, -1}, {negate(e1), -1}});
    ConicSubset set(2, {
                           {segment, ConvexCone::line(e2)},
                           {ConvexPolyhedron::point(Vec{1, 0}), ConvexCone(2, {negate(e1)})},
                           {ConvexPolyhedron::point(Vec{-1, 0}), ConvexCone(2, {e1})},
                       });
    out.push_back({"segment", set, {x(1), (c(1) - x(0) * x(0)) * xi(0)}});
  }
  return out;
}

}  // namespace microlocal::fixtures
