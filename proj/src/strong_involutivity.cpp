#include "microlocal/cohoracle.hpp"
#include "microlocal/fixtures.hpp"
#include "microlocal/sheaf.hpp"
#include "microlocal/symplectic.hpp"

#include <algorithm>

namespace microlocal {

StrongInvolutivityReport strong_involutivity_demo(std::uint64_t seed) {
  StrongInvolutivityReport report;
  const auto strata = fixtures::open_half_line_strata();
  strata.validate();
  report.ss0 = ssk_from_strata(strata, 0);

  // {(x; xi) : xi = 0, x >= 0}, also as a planar set in the (x, xi) plane.
  const ConvexPolyhedron ray(2, {{Vec{1, 0}, 0}, {Vec{0, 1}, 0}, {Vec{0, -1}, 0}});
  const ConicSubset expected(1, {{ConvexPolyhedron(1, {{Vec{1}, 0}}), ConvexCone::zero(1)}});
  report.ss0_matches_expected = conic_equal(report.ss0, expected);

  const auto probes = probe_grid(1, -1, 1, 41, probe_covectors(1, true));
  const auto verdicts = ssk_definition_test(fixtures::open_half_line(), 0, probes);
  report.oracle_agrees = true;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const bool in = verdicts[i].status == ProbeVerdict::Status::In;
    if (verdicts[i].status == ProbeVerdict::Status::Unstable || in != conic_membership(report.ss0, probes[i])) {
      report.oracle_agrees = false;
    }
  }

  const PolyhedralSet planar(2, {ray});
  const Vec p{0, 0};
  const auto sampled = normal_cone_pair_sampled(planar, planar, p, 400, seed);
  report.sampled_directions = sampled.directions.size();
  report.cp_in_kernel = !sampled.directions.empty() &&
                        std::all_of(sampled.directions.begin(), sampled.directions.end(),
                                    [](const Vec& v) { return sgn(v[1]) == 0; });

  // -d xi has components (0, -1) in (dx, d xi).
  report.hamiltonian = hamiltonian_vector(Vec{0, -1});
  const auto cones = tangent_cone(planar, p);
  report.hamiltonian_outside = std::none_of(cones.begin(), cones.end(),
                                            [&](const ConvexCone& c) { return c.contains(report.hamiltonian); });
  return report;
}

}  // namespace microlocal
