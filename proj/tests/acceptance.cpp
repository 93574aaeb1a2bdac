// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "microlocal/cohoracle.hpp"
#include "microlocal/fixtures.hpp"
#include "microlocal/normalcone.hpp"
#include "microlocal/sheaf.hpp"
#include "microlocal/symplectic.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace microlocal;
using namespace testing_support;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

int failures = 0;

void criterion(const char* id, const char* title, double budget_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (budget_seconds > 0) o.require(seconds < budget_seconds, "over the time budget");
  if (!o.pass) ++failures;
  std::printf("%s %s %s (%.2f s", id, o.pass ? "PASS" : "FAIL", title, seconds);
  if (budget_seconds > 0) std::printf(", budget %.0f s", budget_seconds);
  std::printf(") %s\n", o.detail.str().c_str());
  std::fflush(stdout);
}

LocallyClosedPolyhedralSet closed(PolyhedralSet s) { return LocallyClosedPolyhedralSet::closed(std::move(s)); }

// Counts ssk_definition_test(., 0) verdicts that contradict conormal0.
void oracle_agreement(Outcome& o, const PolyhedralSet& s, const std::vector<CotangentPoint>& probes,
                      const std::string& label, std::size_t& unstable_total) {
  const auto n0 = conormal0(s);
  const auto verdicts = ssk_definition_test(closed(s), 0, probes);
  std::size_t disagreements = 0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (verdicts[i].status == ProbeVerdict::Status::Unstable) {
      ++unstable_total;
      continue;
    }
    const bool in = verdicts[i].status == ProbeVerdict::Status::In;
    if (in != conic_membership(n0, probes[i])) ++disagreements;
  }
  o.require(disagreements == 0, label + ": " + std::to_string(disagreements) + " disagreements");
}

double central_difference(const ScalarField& f, const CotangentPoint& p, std::size_t k, double h = 1e-5) {
  auto x = to_doubles(p.x);
  auto xi = to_doubles(p.xi);
  const std::size_t n = x.size();
  auto& v = k < n ? x : xi;
  const std::size_t i = k < n ? k : k - n;
  const double base = v[i];
  v[i] = base + h;
  const double up = f.evaluate_double(x, xi);
  v[i] = base - h;
  const double down = f.evaluate_double(x, xi);
  return (up - down) / (2 * h);
}

// A random element of the ideal: sum of c_i * m_i * g_i with m_i in {1, x_j, xi_j}.
ScalarField ideal_combination(Rng& rng, const std::vector<ScalarField>& gens, std::size_t n) {
  ScalarField out;
  for (const auto& g : gens) {
    ScalarField term = ScalarField::constant(uniform_rational(rng, -2, 2, 3)) * g;
    const int pick = uniform_int(rng, 0, 2);
    const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(n) - 1));
    if (pick == 1) term = term * ScalarField::x(j);
    if (pick == 2) term = term * ScalarField::xi(j);
    out = out + term;
  }
  return out;
}

}  // namespace

int main() {
  const auto union_set = fixtures::union_set();

  criterion("AC1", "conormal0 of the two-half-plane union equals the hand-written three-part union", 1.0,
            [&](Outcome& o) {
              const auto n0 = conormal0(union_set);
              o.require(conic_equal(n0, fixtures::union_conormal()), "descriptor mismatch");
              o.detail << n0.pieces().size() << " computed pieces; ";
            });

  criterion("AC2", "SS_0 and SS_1 from the four-stratum description", 1.0, [&](Outcome& o) {
    const auto strata = fixtures::union_strata();
    const auto ss0 = ssk_from_strata(strata, 0);
    const auto ss1 = ssk_from_strata(strata, 1);
    const auto quadrant = fixtures::origin_quadrant();
    o.require(conic_equal(ss0, conormal0(union_set)), "SS_0 != conormal0(S)");
    o.require(conic_equal(ss1, conic_union(ss0, quadrant)), "SS_1 != SS_0 u quadrant");
    o.require(!conic_contains(ss0, quadrant), "quadrant already in SS_0");
    o.require(conic_equal(ssk_from_strata(strata, 5), ss1), "SS_k does not stabilize at SS_1");
  });

  criterion("AC3", "ssk_definition_test(S, 0) vs conormal0 on 41x41 x 16 probes, example + 20 random sets", 300.0,
            [&](Outcome& o) {
              const auto probes = probe_grid(2, -2, 2, 41, probe_covectors(2, false));
              std::size_t unstable = 0;
              oracle_agreement(o, union_set, probes, "union", unstable);
              Rng rng(2024);
              for (int trial = 0; trial < 20; ++trial) {
                oracle_agreement(o, random_lattice_set(rng), probes, "random set " + std::to_string(trial), unstable);
              }
              o.detail << 21 * probes.size() << " probes, " << unstable << " unstable; ";
            });

  criterion("AC4", "local cohomology table of the union example", 0, [&](Outcome& o) {
    const auto s = closed(union_set);
    struct Row {
      const char* regime;
      Vec x, xi;
      CohomologyRanks expected;
    };
    const std::vector<Row> rows{
        {"interior", Vec{1, 1}, Vec{0, 0}, {{0, 1}}},
        {"interior, nonzero covector", Vec{1, 1}, Vec{1, 0}, {}},
        {"ray y=0", Vec{-1, 0}, Vec{0, 1}, {{0, 1}}},
        {"ray y=0, wrong side", Vec{-1, 0}, Vec{0, -1}, {}},
        {"ray x=0", Vec{0, -1}, Vec{1, 0}, {{0, 1}}},
        {"ray x=0, wrong side", Vec{0, -1}, Vec{-1, 0}, {}},
        {"origin, quadrant covector", Vec{0, 0}, Vec{1, 1}, {{1, 1}}},
        {"origin, outside the quadrant", Vec{0, 0}, Vec{-1, 1}, {}},
    };
    for (const auto& row : rows) {
      const auto got = local_cohomology(s, row.x, row.xi).local;
      o.require(got == row.expected, row.regime);
    }
  });

  criterion("AC5", "open half-line: SS_0 probe grid and the strong-involutivity counterexample", 0, [&](Outcome& o) {
    const auto probes = probe_grid(1, -1, 1, 41, probe_covectors(1, true));
    const auto verdicts = ssk_definition_test(fixtures::open_half_line(), 0, probes);
    std::size_t marked = 0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const bool expected = is_zero(probes[i].xi) && sgn(probes[i].x[0]) >= 0;
      const bool in = verdicts[i].status == ProbeVerdict::Status::In;
      o.require(in == expected, "probe " + format_vector(probes[i].x) + "; " + format_vector(probes[i].xi));
      marked += in ? 1 : 0;
    }
    const auto demo = strong_involutivity_demo();
    o.require(demo.ss0_matches_expected, "SS_0 differs from {(x; 0) : x >= 0}");
    o.require(demo.cp_in_kernel, "C_p not in ker d(xi)");
    o.require(demo.hamiltonian_outside, "H(-d xi) lies in C_p");
    o.detail << marked << " of " << probes.size() << " probes marked; ";
  });

  criterion("AC6", "weak involutivity on the fixture catalog, 100 ideal pairs x 500 samples each", 120.0,
            [&](Outcome& o) {
              const auto catalog = fixtures::involutivity_catalog();
              o.require(catalog.size() >= 10, "fewer than 10 fixtures");
              Rng rng(606);
              double hyp = 0, bracket = 0;
              for (std::size_t idx = 0; idx < catalog.size(); ++idx) {
                const auto& fx = catalog[idx];
                const std::size_t n = fx.set.dim();
                const auto sampled = sample_conic_subset(fx.set, 500, 100 + idx);
                for (int pair = 0; pair < 100; ++pair) {
                  const auto f = ideal_combination(rng, fx.generators, n);
                  const auto g = ideal_combination(rng, fx.generators, n);
                  const auto r = weak_involutivity_check(sampled, f, g);
                  o.require(r.samples >= 500, fx.name + ": too few samples");
                  o.require(r.verdict == BracketReport::Verdict::Pass, fx.name + ": " + verdict_name(r.verdict));
                  hyp = std::max(hyp, r.hypothesis_max);
                  bracket = std::max(bracket, r.bracket_max);
                }
              }
              o.detail << catalog.size() << " fixtures, hypothesis max " << hyp << ", bracket max " << bracket << "; ";
            });

  criterion("AC7", "half-space test vs exterior-ball test on 10000 probes", 0, [&](Outcome& o) {
    Rng rng(707);
    std::size_t probes = 0, members = 0, disagreements = 0;
    while (probes < 10000) {
      const std::size_t n = probes < 8000 ? 2 : 3;
      const auto s = random_polyhedral_set(rng, n, 3);
      for (int k = 0; k < 20; ++k, ++probes) {
        const Vec x = random_point_of(rng, s);
        Vec xi = random_integer_vector(rng, n, 3, false);
        if (k % 2 == 0) {
          // Combinations of active normals land in the fiber more often.
          xi = zeros(n);
          for (const auto& piece : s.pieces()) {
            if (!piece.contains(x)) continue;
            for (const auto& h : piece.halfspaces()) {
              if (dot(h.normal, x) == h.offset) xi = add(xi, scale(h.normal, uniform_int(rng, 0, 2)));
            }
          }
        }
        const bool half = conormal0_halfspace_test(s, x, xi);
        if (half != conormal0_ball_test(s, x, xi)) ++disagreements;
        members += half ? 1 : 0;
      }
    }
    o.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
    o.detail << probes << " probes, " << members << " in the cone; ";
  });

  criterion("AC8", "product formula, embeddings, minimum principle, proper cone probe", 0, [&](Outcome& o) {
    Rng rng(808);
    for (int trial = 0; trial < 20; ++trial) {
      const auto s1 = random_polyhedral_set(rng, 1, 2);
      const auto s2 = random_polyhedral_set(rng, trial < 15 ? 1 : 2, 2);
      o.require(conic_equal(conormal0(set_product(s1, s2)), conic_product(conormal0(s1), conormal0(s2))),
                "product pair " + std::to_string(trial));
    }
    for (int trial = 0; trial < 10; ++trial) {
      const auto t = random_polyhedral_set(rng, 2, 2);
      AffineMap f{{Vec{1, 0}, Vec{0, 1}, Vec{uniform_int(rng, -2, 2), uniform_int(rng, -2, 2)}},
                  Vec{uniform_int(rng, -1, 1), 0, uniform_int(rng, -1, 1)}};
      o.require(conic_equal(embed_conormal(t, f), conormal0(f.image(t))), "embedding " + std::to_string(trial));
    }
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = trial < 14 ? 2 : 3;
      const auto s = random_polyhedral_set(rng, n, 3, trial % 2 == 0);
      ScalarField f;
      std::string label = "min principle " + std::to_string(trial);
      if (trial % 4 == 3) {
        // Affine objective, bounded below on a bounded set.
        const auto bounded = random_polyhedral_set(rng, n, 3, true);
        const Vec a = random_integer_vector(rng, n, 3);
        for (std::size_t i = 0; i < n; ++i) f = f + ScalarField::constant(a[i]) * ScalarField::x(i);
        const auto r = min_principle_check(f, bounded);
        o.require(r.in_conormal && bounded.contains(r.minimizer), label);
        continue;
      }
      const Vec c = random_integer_vector(rng, n, 5, false);
      for (std::size_t i = 0; i < n; ++i) f = f + pow(ScalarField::x(i) - ScalarField::constant(c[i]), 2);
      const auto r = min_principle_check(f, s);
      Rational best = -1;
      for (const auto& piece : s.pieces()) {
        const auto d = dist_to_convex(c, piece).squared_distance;
        if (best < 0 || d < best) best = d;
      }
      o.require(r.in_conormal && r.min_value == best && s.contains(r.minimizer), label);
    }
    const auto orthant = ConvexCone::orthant(2);
    o.require(!proper_cone_probe(PolyhedralSet::empty(2), orthant).witness, "empty set gave a witness");
    std::vector<PolyhedralSet> bounded{PolyhedralSet(2, {ConvexPolyhedron::box(Vec{0, 0}, Vec{1, 1})}),
                                       PolyhedralSet(2, {ConvexPolyhedron::point(Vec{3, -1})})};
    for (int trial = 0; trial < 10; ++trial) bounded.push_back(random_polyhedral_set(rng, 2, 3, true));
    for (const auto& s : bounded) {
      const auto probe = proper_cone_probe(s, orthant);
      o.require(probe.witness && probe.verified, "no verified witness");
    }
  });

  criterion("AC9", "perversity instances and perverse_ssk on five codimension profiles", 0, [&](Outcome& o) {
    for (const auto& inst : fixtures::perversity_instances()) {
      o.require(perversity_check(inst.f, inst.dual, inst.codims).perverse == inst.expected, inst.name);
    }
    auto conormal_of = [](PolyhedralSet s) { return conormal_bundle_closure(closed(std::move(s))); };
    const std::map<std::string, ConicSubset> conormals{
        {"X", conormal_of(PolyhedralSet::whole(2))},
        {"L1", conormal_of(PolyhedralSet(2, {ConvexPolyhedron::hyperplane(Vec{1, 0}, 0)}))},
        {"L2", conormal_of(PolyhedralSet(2, {ConvexPolyhedron::hyperplane(Vec{0, 1}, 0)}))},
        {"L3", conormal_of(PolyhedralSet(2, {ConvexPolyhedron::hyperplane(Vec{1, 1}, 1)}))},
        {"P", conormal_of(PolyhedralSet(2, {ConvexPolyhedron::point(Vec{0, 0})}))},
    };
    const std::vector<std::map<std::string, int>> profiles{
        {{"X", 0}, {"L1", 1}, {"L2", 1}, {"L3", 1}, {"P", 2}},
        {{"X", 0}, {"L1", 0}, {"L2", 0}, {"L3", 0}, {"P", 0}},
        {{"X", 2}, {"L1", 2}, {"L2", 1}, {"L3", 0}, {"P", 1}},
        {{"X", 1}, {"L1", 3}, {"L2", 2}, {"L3", 2}, {"P", 0}},
        {{"X", 0}, {"L1", 2}, {"L2", 1}, {"L3", 1}, {"P", 2}},
    };
    for (std::size_t idx = 0; idx < profiles.size(); ++idx) {
      for (int k = -1; k <= 4; ++k) {
        ConicSubset expected(2, {});
        for (const auto& [id, c] : profiles[idx]) {
          if (c <= k) expected = conic_union(expected, conormals.at(id));
        }
        o.require(conic_equal(perverse_ssk(profiles[idx], conormals, k), expected),
                  "profile " + std::to_string(idx) + ", k = " + std::to_string(k));
      }
    }
  });

  criterion("AC10", "Poisson algebra identities and gradients", 0, [&](Outcome& o) {
    Rng rng(1010);
    for (int point = 0; point < 200; ++point) {
      const auto f = random_tree(rng, 2, 3), g = random_tree(rng, 2, 3), h = random_tree(rng, 2, 3);
      const auto p = random_cotangent_point(rng, 2);
      o.require(poisson_bracket_at(f, g, p) + poisson_bracket_at(g, f, p) == 0, "antisymmetry");
      const auto lhs = poisson_bracket(f, g * h, 2).evaluate(p.x, p.xi);
      const auto rhs = (poisson_bracket(f, g, 2) * h + g * poisson_bracket(f, h, 2)).evaluate(p.x, p.xi);
      o.require(lhs == rhs, "Leibniz");
    }
    double jacobi_max = 0;
    for (int point = 0; point < 100; ++point) {
      const auto f = random_tree(rng, 2, 2), g = random_tree(rng, 2, 2), h = random_tree(rng, 2, 2);
      const auto jacobi = poisson_bracket(f, poisson_bracket(g, h, 2), 2) +
                          poisson_bracket(g, poisson_bracket(h, f, 2), 2) +
                          poisson_bracket(h, poisson_bracket(f, g, 2), 2);
      const auto p = random_cotangent_point(rng, 2);
      jacobi_max = std::max(jacobi_max, std::abs(jacobi.evaluate_double(to_doubles(p.x), to_doubles(p.xi))));
    }
    o.require(jacobi_max <= 1e-9, "Jacobi");
    double gradient_max = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto f = random_tree(rng, 2, 4);
      const auto p = random_cotangent_point(rng, 2);
      const auto grad = f.value_and_gradient(p.x, p.xi).second;
      for (std::size_t k = 0; k < 4; ++k) {
        const double exact = to_double(grad[k]);
        gradient_max = std::max(gradient_max, std::abs(exact - central_difference(f, p, k)) /
                                                  std::max(1.0, std::abs(exact)));
      }
    }
    o.require(gradient_max <= 1e-6, "gradient");
    o.detail << "Jacobi max " << jacobi_max << ", gradient relative error max " << gradient_max << "; ";
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
