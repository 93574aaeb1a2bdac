#include "cli.hpp"

#include "microlocal/cohoracle.hpp"
#include "microlocal/errors.hpp"
#include "microlocal/fixtures.hpp"
#include "microlocal/io.hpp"
#include "microlocal/normalcone.hpp"
#include "microlocal/sheaf.hpp"
#include "microlocal/symplectic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace microlocal::cli {

namespace {

using io::Json;

struct CheckFailed {};

std::string type_of(const Json& j) {
  if (!j.is_object()) return "";
  if (auto it = j.find("type"); it != j.end() && it->is_string()) return it->get<std::string>();
  if (j.contains("closure")) return "locally_closed_set";
  if (j.contains("strata")) return "stratified_sheaf";
  if (j.contains("pieces") && j["pieces"].is_array() && !j["pieces"].empty() && j["pieces"][0].contains("base")) {
    return "conic_subset";
  }
  return "polyhedral_set";
}

void need(const std::string& value, const char* flag, const std::string& command) {
  if (value.empty()) throw Error(ErrorCode::Schema, std::string(flag) + ": required by " + command);
}

PolyhedralSet closed_set(const RunConfig& c) {
  need(c.set, "--set", c.command);
  const Json j = io::read_file(c.set);
  const auto t = type_of(j);
  if (t == "locally_closed_set") {
    auto s = io::locally_closed_from(j, "set");
    if (!s.removed().is_empty()) throw Error(ErrorCode::InvalidArgument, "set: this command needs a closed set");
    return s.closure();
  }
  return io::polyhedral_set_from(j, "set");
}

ConicSubset conic_set(const RunConfig& c) {
  need(c.set, "--set", c.command);
  const Json j = io::read_file(c.set);
  if (type_of(j) == "conic_subset") return io::conic_subset_from(j, "set");
  return conormal0(closed_set(c));
}

CotangentPoint point(const RunConfig& c) {
  need(c.x, "--x", c.command);
  need(c.xi, "--xi", c.command);
  return {io::parse_vector_text(c.x), io::parse_vector_text(c.xi)};
}

std::vector<CotangentPoint> grid_probes(const RunConfig& c, std::size_t n) {
  Rational lo = -1, hi = 1;
  int steps = n == 1 ? 41 : 21;
  if (!c.grid.empty()) {
    auto v = io::parse_vector_text(c.grid);
    if (v.size() != 3 || v[2].get_den() != 1 || v[2] < 2) {
      throw Error(ErrorCode::Schema, "grid: expected \"lo,hi,steps\" with integer steps >= 2");
    }
    lo = v[0];
    hi = v[1];
    steps = static_cast<int>(v[2].get_num().get_si());
  }
  return probe_grid(n, lo, hi, steps, probe_covectors(n, true));
}

Json verdict_json(bool ok, const char* pass = "match", const char* fail = "mismatch") { return ok ? pass : fail; }

// --- commands ------------------------------------------------------------------

Json cmd_conormal(const RunConfig& c, bool& failed) {
  const auto s = closed_set(c);
  const auto n0 = conormal0(s);
  Json out{{"command", "conormal"}, {"set", io::to_json(s)}, {"conormal", io::to_json(n0)}};
  if (!c.expect.empty()) {
    const bool ok = conic_equal(n0, io::conic_subset_from(io::read_file(c.expect), "expect"));
    out["verdict"] = verdict_json(ok);
    failed = !ok;
  }
  return out;
}

Json cmd_ball_test(const RunConfig& c, bool& failed) {
  const auto s = closed_set(c);
  const auto p = point(c);
  auto params = BallTestParams::defaults();
  if (c.mode == "floating") {
    params.mode = BallTestParams::Mode::Floating;
  } else if (c.mode != "exact") {
    throw Error(ErrorCode::Schema, "mode: expected \"exact\" or \"floating\"");
  }
  params.strict = c.strict;
  const bool half = conormal0_halfspace_test(s, p.x, p.xi);
  const bool ball = conormal0_ball_test(s, p.x, p.xi, params);
  failed = half != ball;
  return Json{{"command", "ball-test"}, {"point", io::to_json(p)}, {"mode", c.mode},
              {"ball", ball},           {"halfspace", half},       {"verdict", verdict_json(!failed, "agree", "disagree")}};
}

Json cmd_sweep(const RunConfig& c, bool& failed) {
  const auto s = closed_set(c);
  const auto p = point(c);
  const Rational radius = c.radius.empty() ? Rational(1) : parse_rational(c.radius);
  const auto setup = derive_sweep_setup(s, p, radius);
  const auto r = sweep_support_search(s, p, setup.params, setup.neighborhood);
  const bool inside = setup.neighborhood.contains(r.point);
  failed = !(r.ball_test && inside);
  return Json{{"command", "sweep"},
              {"point", io::to_json(p)},
              {"params",
               {{"gamma", io::to_json(setup.params.gamma)},
                {"epsilon", io::to_json(setup.params.epsilon)},
                {"v", io::to_json(setup.params.v)},
                {"delta", io::to_json(setup.params.delta)},
                {"rho", io::to_json(setup.params.rho)}}},
              {"neighborhood",
               {{"center", io::to_json(setup.neighborhood.center)},
                {"radius", io::to_json(setup.neighborhood.radius)},
                {"fiber", io::to_json(setup.neighborhood.fiber)}}},
              {"result",
               {{"point", io::to_json(r.point)},
                {"c_lower", io::to_json(r.c_lower)},
                {"c_upper", io::to_json(r.c_upper)},
                {"ball_center", io::to_json(r.ball_center)},
                {"squared_radius", io::to_json(r.squared_radius)},
                {"ball_test", r.ball_test},
                {"in_neighborhood", inside},
                {"bisection_steps", r.bisection_steps}}},
              {"verdict", verdict_json(!failed, "pass", "fail")}};
}

Json cmd_poisson(const RunConfig& c) {
  need(c.f, "--f", c.command);
  need(c.g, "--g", c.command);
  const auto f = io::field_from(Json(c.f), "f");
  const auto g = io::field_from(Json(c.g), "g");
  const auto bracket = poisson_bracket(f, g);
  Json out{{"command", "poisson"}, {"f", f.to_string()}, {"g", g.to_string()}, {"bracket", bracket.to_string()},
           {"constant", bracket.is_constant()}};
  if (bracket.is_constant()) out["value"] = io::to_json(bracket.constant_value());
  if (!c.x.empty() || !c.xi.empty()) {
    const auto p = point(c);
    out["at"] = Json{{"point", io::to_json(p)}, {"value", io::to_json(poisson_bracket_at(f, g, p))}};
  }
  return out;
}

Json cmd_involutivity(const RunConfig& c, bool& failed) {
  need(c.f, "--f", c.command);
  need(c.g, "--g", c.command);
  const auto a = sample_conic_subset(conic_set(c), c.samples, c.seed);
  InvolutivityOptions options;
  options.tol = c.tol;
  options.hypothesis_tol = c.hypothesis_tol;
  options.floating = c.floating;
  const auto report = weak_involutivity_check(a, io::field_from(Json(c.f), "f"), io::field_from(Json(c.g), "g"), options);
  failed = report.verdict == BracketReport::Verdict::Fail;
  Json out{{"command", "involutivity"}, {"f", c.f}, {"g", c.g}, {"seed", c.seed}};
  out["report"] = io::to_json(report);
  return out;
}

Json cmd_ssk(const RunConfig& c, bool& failed) {
  if (!c.k) throw Error(ErrorCode::Schema, "--k: required by ssk");
  const int k = *c.k;
  Json out{{"command", "ssk"}, {"k", k}};
  std::optional<ConicSubset> reference;
  if (!c.sheaf.empty()) {
    const auto d = io::sheaf_from(io::read_file(c.sheaf), "sheaf");
    d.validate();
    reference = ssk_from_strata(d, k);
    out["ssk"] = io::to_json(*reference);
    if (!c.expect.empty()) {
      const bool ok = conic_equal(*reference, io::conic_subset_from(io::read_file(c.expect), "expect"));
      out["verdict"] = verdict_json(ok);
      failed = !ok;
    }
  }
  if (!c.set.empty()) {
    const auto s = io::locally_closed_from(io::read_file(c.set), "set");
    if (!reference && k == 0 && s.removed().is_empty() && s.dim() <= 2) reference = conormal0(s.closure());
    const auto probes = grid_probes(c, s.dim());
    SskTestOptions options;
    if (!c.stencil_radius.empty()) options.stencil_radius = parse_rational(c.stencil_radius);
    const auto verdicts = ssk_definition_test(s, k, probes, options);
    Json list = Json::array();
    std::size_t in = 0, outside = 0, unstable = 0, disagreements = 0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      Json e{{"x", io::to_json(probes[i].x)}, {"xi", io::to_json(probes[i].xi)}, {"status", status_name(verdicts[i].status)}};
      if (verdicts[i].first_degree) e["first_degree"] = *verdicts[i].first_degree;
      list.push_back(std::move(e));
      switch (verdicts[i].status) {
        case ProbeVerdict::Status::In: ++in; break;
        case ProbeVerdict::Status::Out: ++outside; break;
        case ProbeVerdict::Status::Unstable: ++unstable; break;
      }
      if (reference && verdicts[i].status != ProbeVerdict::Status::Unstable &&
          (verdicts[i].status == ProbeVerdict::Status::In) != conic_membership(*reference, probes[i])) {
        ++disagreements;
      }
    }
    out["membership"] = Json{{"label", "evidence"},
                             {"summary", {{"in", in}, {"out", outside}, {"unstable", unstable}}},
                             {"probes", list}};
    if (reference) {
      out["oracle"] = Json{{"disagreements", disagreements}, {"verdict", verdict_json(disagreements == 0, "agree", "disagree")}};
      failed = failed || disagreements != 0;
    }
  }
  if (c.sheaf.empty() && c.set.empty()) throw Error(ErrorCode::Schema, "ssk: give --sheaf, --set, or both");
  return out;
}

Json cmd_localcoh(const RunConfig& c) {
  need(c.set, "--set", c.command);
  need(c.x, "--x", c.command);
  const auto s = io::locally_closed_from(io::read_file(c.set), "set");
  const Vec x = io::parse_vector_text(c.x);
  LocalCohomologyOptions options;
  if (!c.radius.empty()) options.radius = parse_rational(c.radius);
  if (!c.inner_radius.empty()) options.inner_radius = parse_rational(c.inner_radius);
  LocalCohomology lc;
  Json out{{"command", "localcoh"}, {"x", io::to_json(x)}};
  if (!c.phi.empty()) {
    lc = local_cohomology(s, x, io::field_from(Json(c.phi), "phi"), options);
    out["phi"] = c.phi;
  } else {
    need(c.xi, "--xi or --phi", c.command);
    const Vec xi = io::parse_vector_text(c.xi);
    lc = local_cohomology(s, x, xi, options);
    out["xi"] = io::to_json(xi);
  }
  out["local"] = io::to_json(lc.local);
  out["ball"] = io::to_json(lc.ball);
  out["complement"] = io::to_json(lc.complement);
  out["radius"] = io::to_json(lc.radius);
  return out;
}

Json perversity_json(const io::PerversityInstanceData& inst, bool& failed) {
  const auto report = perversity_check(inst.sheaf, inst.dual, inst.codims);
  Json out{{"name", inst.name}, {"perverse", report.perverse}, {"k_min", report.k_min}, {"k_max", report.k_max}};
  if (!report.perverse) out["first_failure"] = report.first_failure;
  if (inst.expected) out["expected"] = *inst.expected;
  failed = !report.perverse;
  return out;
}

Json cmd_perversity(const RunConfig& c, bool& failed) {
  need(c.instance, "--instance", c.command);
  const auto inst = io::perversity_instance_from(io::read_file(c.instance), "instance");
  Json out{{"command", "perversity"}};
  out["result"] = perversity_json(inst, failed);
  out["verdict"] = verdict_json(!failed, "perverse", "not_perverse");
  return out;
}

Json cmd_paper_example(const RunConfig& c, bool& failed) {
  Json out{{"command", "paper-example"}, {"which", c.which}};
  bool ok = true;
  if (c.which == "conormal") {
    const auto n0 = conormal0(fixtures::union_set());
    out["set"] = io::to_json(fixtures::union_set());
    out["conormal"] = io::to_json(n0);
    out["expected"] = io::to_json(fixtures::union_conormal());
    ok = conic_equal(n0, fixtures::union_conormal());
  } else if (c.which == "ssk") {
    const auto d = fixtures::union_strata();
    d.validate();
    const auto ss0 = ssk_from_strata(d, 0), ss1 = ssk_from_strata(d, 1);
    out["sheaf"] = io::to_json(d);
    out["ss0"] = io::to_json(ss0);
    out["ss1"] = io::to_json(ss1);
    ok = conic_equal(ss0, conormal0(fixtures::union_set())) &&
         conic_equal(ss1, conic_union(ss0, fixtures::origin_quadrant())) && !conic_equal(ss0, ss1);
  } else if (c.which == "localcoh") {
    const auto s = LocallyClosedPolyhedralSet::closed(fixtures::union_set());
    struct Row {
      const char* regime;
      Vec x, xi;
      CohomologyRanks expected;
    };
    const std::vector<Row> rows{{"interior k_X", Vec{1, 1}, Vec{0, 0}, {{0, 1}}},
                                {"ray y=0 k_{y=0}", Vec{-1, 0}, Vec{0, 1}, {{0, 1}}},
                                {"ray x=0 k_{x=0}", Vec{0, -1}, Vec{1, 0}, {{0, 1}}},
                                {"origin k_{(0,0)}[-1]", Vec{0, 0}, Vec{1, 1}, {{1, 1}}}};
    Json table = Json::array();
    for (const auto& r : rows) {
      const auto lc = local_cohomology(s, r.x, r.xi);
      ok = ok && lc.local == r.expected;
      table.push_back(Json{{"regime", r.regime}, {"x", io::to_json(r.x)}, {"xi", io::to_json(r.xi)},
                           {"local", io::to_json(lc.local)}, {"expected", io::to_json(r.expected)}});
    }
    out["table"] = table;
  } else if (c.which == "remark") {
    const auto r = strong_involutivity_demo(c.seed);
    out["ss0"] = io::to_json(r.ss0);
    out["ss0_matches_expected"] = r.ss0_matches_expected;
    out["oracle_agrees"] = r.oracle_agrees;
    out["sampled_directions"] = r.sampled_directions;
    out["cp_in_kernel"] = r.cp_in_kernel;
    out["hamiltonian"] = io::to_json(r.hamiltonian);
    out["hamiltonian_outside"] = r.hamiltonian_outside;
    ok = r.ss0_matches_expected && r.oracle_agrees && r.cp_in_kernel && r.hamiltonian_outside;
  } else if (c.which == "perversity") {
    Json list = Json::array();
    for (const auto& inst : fixtures::perversity_instances()) {
      bool not_perverse = false;
      auto entry = perversity_json({inst.name, inst.f, inst.dual, inst.codims, inst.expected}, not_perverse);
      ok = ok && (!not_perverse == inst.expected);
      list.push_back(std::move(entry));
    }
    out["instances"] = list;
  } else {
    throw Error(ErrorCode::Schema, "which: expected conormal, ssk, localcoh, remark or perversity");
  }
  out["verdict"] = verdict_json(ok);
  failed = !ok;
  return out;
}

// --- SVG -------------------------------------------------------------------------

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << std::fixed << v;
  return s.str();
}

Json cmd_plot(const RunConfig& c) {
  need(c.svg, "--svg", c.command);
  const auto a = conic_set(c);
  if (a.dim() != 2) throw Error(ErrorCode::Unsupported, "plot draws planar bases");
  const auto w = io::parse_vector_text(c.window);
  if (w.size() != 2 || w[0] >= w[1]) throw Error(ErrorCode::Schema, "window: expected \"lo,hi\" with lo < hi");
  const double lo = to_double(w[0]), hi = to_double(w[1]), size = 480;
  auto sx = [&](const Rational& v) { return fmt((to_double(v) - lo) / (hi - lo) * size); };
  auto sy = [&](const Rational& v) { return fmt(size - (to_double(v) - lo) / (hi - lo) * size); };
  const std::vector<Vec> box{Vec{w[0], w[0]}, Vec{w[1], w[0]}, Vec{w[1], w[1]}, Vec{w[0], w[1]}};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
      << size << " " << size << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::size_t drawn = 0;
  for (const auto& piece : a.pieces()) {
    const auto k = PlanarComplex::arrangement(box, piece.base.halfspaces());
    const PolyhedralSet base(2, {piece.base});
    const auto cells = k.cells_in(base);
    const bool zero_fiber = piece.fiber.is_zero();
    const char* colour = zero_fiber ? "#9ecae1" : "#de2d26";
    for (std::size_t f = 0; f < k.faces.size(); ++f) {
      if (!cells[2][f]) continue;
      svg << "<polygon fill=\"" << colour << "\" fill-opacity=\"0.35\" stroke=\"none\" points=\"";
      for (const auto& [e, sign] : k.faces[f]) {
        const auto& v = k.vertices[k.edges[e][sign > 0 ? 0 : 1]];
        svg << sx(v[0]) << "," << sy(v[1]) << " ";
      }
      svg << "\"/>\n";
    }
    for (std::size_t e = 0; e < k.edges.size(); ++e) {
      if (!cells[1][e]) continue;
      const auto& p = k.vertices[k.edges[e][0]];
      const auto& q = k.vertices[k.edges[e][1]];
      svg << "<line x1=\"" << sx(p[0]) << "\" y1=\"" << sy(p[1]) << "\" x2=\"" << sx(q[0]) << "\" y2=\"" << sy(q[1])
          << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    }
    for (std::size_t v = 0; v < k.vertices.size(); ++v) {
      if (!cells[0][v]) continue;
      svg << "<circle cx=\"" << sx(k.vertices[v][0]) << "\" cy=\"" << sy(k.vertices[v][1]) << "\" r=\"3\" fill=\"" << colour
          << "\"/>\n";
    }
    // Fiber fan at a relative interior point of the base, clipped to the window.
    if (!zero_fiber) {
      auto at = piece.base.relative_interior_point();
      if (at && (*at)[0] >= w[0] && (*at)[0] <= w[1] && (*at)[1] >= w[0] && (*at)[1] <= w[1]) {
        const Rational len = (w[1] - w[0]) / 12;
        for (const auto& d : probe_covectors(2)) {
          if (!piece.fiber.contains(d)) continue;
          const Vec tip = add(*at, scale(d, len / Rational(static_cast<long>(std::max<double>(1.0, std::abs(to_double(d[0])) + std::abs(to_double(d[1])))))));
          svg << "<line x1=\"" << sx((*at)[0]) << "\" y1=\"" << sy((*at)[1]) << "\" x2=\"" << sx(tip[0]) << "\" y2=\""
              << sy(tip[1]) << "\" stroke=\"#31a354\" stroke-width=\"1.5\"/>\n";
        }
      }
    }
    ++drawn;
  }
  svg << "</svg>\n";
  std::ofstream file(c.svg);
  if (!file) throw Error(ErrorCode::Parse, "cannot write " + c.svg);
  file << svg.str();
  return Json{{"command", "plot"}, {"svg", c.svg}, {"pieces", drawn}, {"window", io::to_json(w)}};
}

// --- configuration -------------------------------------------------------------

template <typename T>
void read_into(const Json& j, const char* key, const std::string& path, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::Schema, path + "." + key + ": wrong type");
  }
}

void read_text(const Json& j, const char* key, const std::string& path, std::string& target) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (v.is_string()) {
    target = v.get<std::string>();
  } else if (v.is_array() || v.is_object()) {
    target = v.dump();
  } else {
    throw Error(ErrorCode::Schema, path + "." + key + ": expected a string");
  }
}

}  // namespace

RunConfig load_config(const std::string& path) {
  const Json j = io::read_file(path);
  io::require_fields(j, "config",
                     {"command", "inputs", "tolerances", "grid", "output", "svg", "seed", "samples", "f", "g", "phi",
                      "x", "xi", "k", "which", "mode", "strict", "radius", "inner_radius", "stencil_radius",
                      "floating", "window"});
  RunConfig c;
  read_into(j, "command", "config", c.command);
  if (j.contains("inputs")) {
    const auto& in = j["inputs"];
    io::require_fields(in, "config.inputs", {"set", "sheaf", "instance", "expect"});
    read_into(in, "set", "config.inputs", c.set);
    read_into(in, "sheaf", "config.inputs", c.sheaf);
    read_into(in, "instance", "config.inputs", c.instance);
    read_into(in, "expect", "config.inputs", c.expect);
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    io::require_fields(t, "config.tolerances", {"tol", "hypothesis_tol"});
    read_into(t, "tol", "config.tolerances", c.tol);
    read_into(t, "hypothesis_tol", "config.tolerances", c.hypothesis_tol);
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    io::require_fields(g, "config.grid", {"lo", "hi", "steps"}, {"lo", "hi", "steps"});
    c.grid = to_string(io::rational_from(g["lo"], "config.grid.lo")) + "," +
             to_string(io::rational_from(g["hi"], "config.grid.hi")) + "," +
             to_string(io::rational_from(g["steps"], "config.grid.steps"));
  }
  read_into(j, "output", "config", c.output);
  read_into(j, "svg", "config", c.svg);
  read_into(j, "seed", "config", c.seed);
  read_into(j, "samples", "config", c.samples);
  read_text(j, "f", "config", c.f);
  read_text(j, "g", "config", c.g);
  read_text(j, "phi", "config", c.phi);
  read_text(j, "x", "config", c.x);
  read_text(j, "xi", "config", c.xi);
  if (j.contains("k")) {
    int k = 0;
    read_into(j, "k", "config", k);
    c.k = k;
  }
  read_into(j, "which", "config", c.which);
  read_into(j, "mode", "config", c.mode);
  read_into(j, "strict", "config", c.strict);
  read_text(j, "radius", "config", c.radius);
  read_text(j, "inner_radius", "config", c.inner_radius);
  read_text(j, "stencil_radius", "config", c.stencil_radius);
  read_into(j, "floating", "config", c.floating);
  read_text(j, "window", "config", c.window);
  return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") c = load_config(args[i + 1]);
    }
  } catch (const Error& e) {
    err << io::Json{{"error", error_code_name(e.code())}, {"message", e.what()}}.dump() << "\n";
    return kExitInput;
  }

  CLI::App app{"Microlocal geometry of polyhedral sets: 0-conormals, truncated microsupports, involutivity."};
  app.set_help_all_flag("--help-all");
  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration (unknown fields rejected)");
  app.require_subcommand(0, 1);
  const std::vector<std::string> names{"conormal", "ball-test", "sweep",       "poisson", "involutivity",
                                       "ssk",      "localcoh",  "perversity",  "paper-example", "plot"};
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : names) {
    auto* s = app.add_subcommand(name);
    s->add_option("--set", c.set, "set file (JSON)");
    s->add_option("--output", c.output, "write the JSON report here");
    s->add_option("--seed", c.seed, "random seed");
    subs[name] = s;
  }
  subs["conormal"]->description("N*_0 of a closed polyhedral set");
  subs["conormal"]->add_option("--expect", c.expect, "expected conic subset; exit 2 on mismatch");
  for (const char* name : {"ball-test", "sweep", "poisson", "localcoh"}) {
    subs[name]->add_option("--x", c.x, "base point \"a,b\"");
    subs[name]->add_option("--xi", c.xi, "covector \"a,b\"");
  }
  subs["ball-test"]->description("exterior-ball test against the half-space test");
  subs["ball-test"]->add_option("--mode", c.mode, "exact or floating");
  subs["ball-test"]->add_flag("--strict", c.strict, "fall back to the half-space test");
  subs["sweep"]->description("constructive support search near (x; xi)");
  subs["sweep"]->add_option("--radius", c.radius, "neighbourhood radius");
  for (const char* name : {"poisson", "involutivity"}) {
    subs[name]->add_option("--f", c.f, "scalar field");
    subs[name]->add_option("--g", c.g, "scalar field");
  }
  subs["poisson"]->description("Poisson bracket {f, g}");
  subs["involutivity"]->description("weak involutivity harness on samples of a conic set");
  subs["involutivity"]->add_option("--samples", c.samples, "sample count");
  subs["involutivity"]->add_option("--tol", c.tol, "bracket tolerance");
  subs["involutivity"]->add_option("--hypothesis-tol", c.hypothesis_tol, "hypothesis tolerance");
  subs["involutivity"]->add_flag("--floating", c.floating, "evaluate in floating point");
  subs["ssk"]->description("SS_k from strata, and the cohomological oracle on a probe grid");
  subs["ssk"]->add_option("--sheaf", c.sheaf, "stratified sheaf file");
  subs["ssk"]->add_option("--k", c.k, "truncation degree");
  subs["ssk"]->add_option("--grid", c.grid, "\"lo,hi,steps\"");
  subs["ssk"]->add_option("--stencil-radius", c.stencil_radius, "stencil radius");
  subs["ssk"]->add_option("--expect", c.expect, "expected SS_k; exit 2 on mismatch");
  subs["localcoh"]->description("local cohomology of k_S with supports in {phi >= 0}");
  subs["localcoh"]->add_option("--phi", c.phi, "affine test function");
  subs["localcoh"]->add_option("--radius", c.radius, "outer window radius");
  subs["localcoh"]->add_option("--inner-radius", c.inner_radius, "inner window radius");
  subs["perversity"]->description("perversity criterion on a sheaf and its dual");
  subs["perversity"]->add_option("--instance", c.instance, "perversity instance file");
  subs["paper-example"]->description("built-in worked examples with a self-check");
  subs["paper-example"]->add_option("--which", c.which, "conormal, ssk, localcoh, remark or perversity");
  subs["plot"]->description("SVG of base pieces and fiber fans");
  subs["plot"]->add_option("--svg", c.svg, "SVG output path");
  subs["plot"]->add_option("--window", c.window, "\"lo,hi\" square window");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  for (const auto& [name, s] : subs) {
    if (s->parsed()) c.command = name;
  }
  if (c.command.empty()) {
    err << app.help();
    return kExitInput;
  }
  if (std::find(names.begin(), names.end(), c.command) == names.end()) {
    err << io::Json{{"error", "schema_violation"}, {"message", "command: unknown command " + c.command}}.dump() << "\n";
    return kExitInput;
  }

  try {
    bool failed = false;
    Json report;
    if (c.command == "conormal") report = cmd_conormal(c, failed);
    else if (c.command == "ball-test") report = cmd_ball_test(c, failed);
    else if (c.command == "sweep") report = cmd_sweep(c, failed);
    else if (c.command == "poisson") report = cmd_poisson(c);
    else if (c.command == "involutivity") report = cmd_involutivity(c, failed);
    else if (c.command == "ssk") report = cmd_ssk(c, failed);
    else if (c.command == "localcoh") report = cmd_localcoh(c);
    else if (c.command == "perversity") report = cmd_perversity(c, failed);
    else if (c.command == "paper-example") report = cmd_paper_example(c, failed);
    else report = cmd_plot(c);
    report["schema"] = io::kSchemaVersion;
    const std::string text = report.dump(2) + "\n";
    if (c.output.empty()) {
      out << text;
    } else {
      std::ofstream file(c.output);
      if (!file) throw Error(ErrorCode::Parse, "cannot write " + c.output);
      file << text;
    }
    return failed ? kExitCheck : kExitOk;
  } catch (const Error& e) {
    err << io::Json{{"error", error_code_name(e.code())}, {"message", e.what()}}.dump() << "\n";
    return kExitInput;
  }
}

}  // namespace microlocal::cli
