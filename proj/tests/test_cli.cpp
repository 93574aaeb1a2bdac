#include <doctest.h>

#include "cli.hpp"
#include "microlocal/fixtures.hpp"
#include "microlocal/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace microlocal;
using microlocal::io::Json;

namespace {

const std::string kFixtures = std::string(MICROLOCAL_SOURCE_DIR) + "/fixtures/";

struct Outcome {
  int code;
  std::string out;
  std::string err;
  Json report() const { return Json::parse(out); }
  Json error() const { return Json::parse(err); }
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return kFixtures + name; }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("microlocal_cli_test_" + name)).string();
}

std::string write_temp(const std::string& name, const Json& j) {
  const std::string path = temp_path(name);
  std::ofstream(path) << j.dump(2);
  return path;
}

}  // namespace

TEST_CASE("conormal of the union matches the hand-written fixture") {
  auto r = run({"conormal", "--set", fixture("union_set.json"), "--expect", fixture("union_conormal.json")});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.report()["verdict"] == "match");
  CHECK(r.report()["schema"] == io::kSchemaVersion);
  CHECK(conic_equal(io::conic_subset_from(r.report()["conormal"], "conormal"), fixtures::union_conormal()));

  auto wrong = run({"conormal", "--set", fixture("union_set.json"), "--expect", fixture("union_ss1.json")});
  CHECK(wrong.code == cli::kExitCheck);
  CHECK(wrong.report()["verdict"] == "mismatch");
}

TEST_CASE("ssk of the union strata at k = 1 adds the origin quadrant") {
  auto r = run({"ssk", "--sheaf", fixture("union_strata.json"), "--k", "1", "--expect", fixture("union_ss1.json")});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.report()["verdict"] == "match");
  auto r0 = run({"ssk", "--sheaf", fixture("union_strata.json"), "--k", "0", "--expect", fixture("union_ss1.json")});
  CHECK(r0.code == cli::kExitCheck);
}

TEST_CASE("ssk grid oracle agrees on the open half-line") {
  auto r = run({"ssk", "--sheaf", fixture("open_half_line_strata.json"), "--set", fixture("open_half_line.json"), "--k",
                "0", "--grid", "-1,1,9"});
  REQUIRE(r.code == cli::kExitOk);
  const Json report = r.report();
  CHECK(report["oracle"]["disagreements"] == 0);
  CHECK(report["membership"]["label"] == "evidence");
  CHECK(report["membership"]["summary"]["unstable"] == 0);
}

TEST_CASE("poisson bracket of x1 and xi1") {
  auto r = run({"poisson", "--f", "x1", "--g", "xi1"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.report()["constant"] == true);
  CHECK(r.report()["value"] == "-1");

  auto at = run({"poisson", "--f", "(* x1 xi2)", "--g", "x2", "--x", "1,2", "--xi", "3,4"});
  REQUIRE(at.code == cli::kExitOk);
  CHECK(at.report()["at"]["value"] == "1");
}

TEST_CASE("ball test and sweep on the union") {
  auto ball = run({"ball-test", "--set", fixture("union_set.json"), "--x", "-1,0", "--xi", "0,1"});
  REQUIRE(ball.code == cli::kExitOk);
  CHECK(ball.report()["ball"] == true);
  CHECK(ball.report()["verdict"] == "agree");

  auto sweep = run({"sweep", "--set", fixture("union_set.json"), "--x", "-1,0", "--xi", "0,1"});
  REQUIRE(sweep.code == cli::kExitOk);
  CHECK(sweep.report()["verdict"] == "pass");

  auto violated = run({"sweep", "--set", fixture("union_set.json"), "--x", "-1,0", "--xi", "0,-1"});
  CHECK(violated.code == cli::kExitInput);
  CHECK(violated.error()["error"] == "hypothesis_violated");
}

TEST_CASE("involutivity on a conormal passes and is reproducible") {
  const std::vector<std::string> args{"involutivity", "--set", fixture("line_conormal.json"), "--f", "x1",
                                      "--g", "xi2", "--samples", "200", "--seed", "7"};
  auto a = run(args);
  auto b = run(args);
  REQUIRE(a.code == cli::kExitOk);
  CHECK(a.out == b.out);
}

TEST_CASE("local cohomology at the union corner sits in degree 1") {
  auto r = run({"localcoh", "--set", fixture("union_set.json"), "--x", "0,0", "--xi", "1,1"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.report()["local"] == Json{{"1", 1}});

  auto outside = run({"localcoh", "--set", fixture("union_set.json"), "--x", "-1,-1", "--xi", "1,1"});
  CHECK(outside.code == cli::kExitInput);
  CHECK(outside.error()["error"] == "not_in_set");
}

TEST_CASE("perversity instances") {
  CHECK(run({"perversity", "--instance", fixture("perversity_constant_sheaf.json")}).code == cli::kExitOk);
  CHECK(run({"perversity", "--instance", fixture("perversity_codim1_shifted.json")}).code == cli::kExitOk);
  auto bad = run({"perversity", "--instance", fixture("perversity_codim1_unshifted.json")});
  CHECK(bad.code == cli::kExitCheck);
  CHECK(bad.report()["verdict"] == "not_perverse");
}

TEST_CASE("every built-in example reproduces") {
  for (const char* which : {"conormal", "ssk", "localcoh", "remark", "perversity"}) {
    CAPTURE(which);
    auto r = run({"paper-example", "--which", which});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.report()["verdict"] == "match");
  }
}

TEST_CASE("input errors exit 1 with a JSON error") {
  auto missing = run({"conormal", "--set", fixture("no_such_file.json")});
  CHECK(missing.code == cli::kExitInput);
  CHECK(missing.error().contains("message"));

  auto expr = run({"poisson", "--f", "(+ x1", "--g", "xi1"});
  CHECK(expr.code == cli::kExitInput);

  auto unknown = run({"frobnicate"});
  CHECK(unknown.code == cli::kExitInput);

  auto no_k = run({"ssk", "--sheaf", fixture("union_strata.json")});
  CHECK(no_k.code == cli::kExitInput);

  Json bad_set = io::read_file(fixture("union_set.json"));
  bad_set["pieces"][0]["extra"] = 1;
  auto field = run({"conormal", "--set", write_temp("bad_set.json", bad_set)});
  CHECK(field.code == cli::kExitInput);
  CHECK(field.error()["message"].get<std::string>().find("pieces[0]") != std::string::npos);
}

TEST_CASE("config files match flags and reject unknown fields") {
  const Json config{{"command", "conormal"},
                    {"inputs", {{"set", fixture("union_set.json")}, {"expect", fixture("union_conormal.json")}}}};
  auto from_config = run({"--config", write_temp("config.json", config)});
  auto from_flags = run({"conormal", "--set", fixture("union_set.json"), "--expect", fixture("union_conormal.json")});
  CHECK(from_config.code == cli::kExitOk);
  CHECK(from_config.out == from_flags.out);

  Json bogus = config;
  bogus["bogus"] = true;
  auto rejected = run({"--config", write_temp("bogus.json", bogus)});
  CHECK(rejected.code == cli::kExitInput);
  CHECK(rejected.error()["message"].get<std::string>().find("config.bogus") != std::string::npos);
}

TEST_CASE("--output writes the report to a file") {
  const std::string path = temp_path("report.json");
  std::filesystem::remove(path);
  auto r = run({"poisson", "--f", "x2", "--g", "xi2", "--output", path});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.empty());
  CHECK(io::read_file(path)["value"] == "-1");
}

TEST_CASE("plot writes an SVG") {
  const std::string path = temp_path("plot.svg");
  auto r = run({"plot", "--set", fixture("union_set.json"), "--svg", path});
  REQUIRE(r.code == cli::kExitOk);
  std::ifstream in(path);
  std::string head;
  std::getline(in, head);
  CHECK(head.find("<svg") != std::string::npos);
}

TEST_CASE("fixture files round-trip to the built-in instances") {
  auto same = [](const Json& a, const Json& b) { return a.dump() == b.dump(); };
  auto file = [](const char* name) { return io::read_file(fixture(name)); };

  CHECK(set_equal(io::polyhedral_set_from(file("union_set.json"), "f"), fixtures::union_set()));
  CHECK(conic_equal(io::conic_subset_from(file("union_conormal.json"), "f"), fixtures::union_conormal()));
  CHECK(conic_equal(io::conic_subset_from(file("union_ss1.json"), "f"),
                    conic_union(fixtures::union_conormal(), fixtures::origin_quadrant())));
  CHECK(conic_equal(io::conic_subset_from(file("open_half_line_ss0.json"), "f"), fixtures::open_half_line_ss0()));
  CHECK(same(io::to_json(io::sheaf_from(file("union_strata.json"), "f")), io::to_json(fixtures::union_strata())));
  CHECK(same(io::to_json(io::sheaf_from(file("open_half_line_strata.json"), "f")),
             io::to_json(fixtures::open_half_line_strata())));
  CHECK(same(io::to_json(io::locally_closed_from(file("open_half_line.json"), "f")),
             io::to_json(fixtures::open_half_line())));
  for (const auto& p : fixtures::perversity_instances()) {
    CAPTURE(p.name);
    const auto parsed = io::perversity_instance_from(file(("perversity_" + p.name + ".json").c_str()), "f");
    CHECK(parsed.expected == p.expected);
    CHECK(parsed.codims == p.codims);
    CHECK(same(io::to_json(parsed.sheaf), io::to_json(p.f)));
  }
}
