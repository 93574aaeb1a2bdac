// Writes the built-in instances to <dir>/*.json.

#include "microlocal/fixtures.hpp"
#include "microlocal/io.hpp"

#include <fstream>
#include <iostream>
#include <string>

using namespace microlocal;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: microlocal-fixtures <dir>\n";
    return 1;
  }
  const std::string dir = argv[1];
  bool ok = true;
  auto write = [&](const std::string& name, const io::Json& j) {
    std::ofstream file(dir + "/" + name);
    file << j.dump(2) << "\n";
    ok = ok && static_cast<bool>(file);
  };
  write("union_set.json", io::to_json(fixtures::union_set()));
  write("union_conormal.json", io::to_json(fixtures::union_conormal()));
  write("union_strata.json", io::to_json(fixtures::union_strata()));
  write("union_ss1.json", io::to_json(conic_union(fixtures::union_conormal(), fixtures::origin_quadrant())));
  write("open_half_line.json", io::to_json(fixtures::open_half_line()));
  write("open_half_line_strata.json", io::to_json(fixtures::open_half_line_strata()));
  write("open_half_line_ss0.json", io::to_json(fixtures::open_half_line_ss0()));
  for (const auto& f : fixtures::involutivity_catalog()) {
    if (f.name == "line_conormal") write("line_conormal.json", io::to_json(f.set));
  }
  for (const auto& p : fixtures::perversity_instances()) {
    write("perversity_" + p.name + ".json",
          io::to_json(io::PerversityInstanceData{p.name, p.f, p.dual, p.codims, p.expected}));
  }
  if (!ok) std::cerr << "cannot write to " << dir << "\n";
  return ok ? 0 : 1;
}
