#include "microlocal/io.hpp"

#include "microlocal/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace microlocal::io {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Schema, path + ": " + what);
}

const Json& field(const Json& j, const char* name, const std::string& path) {
  auto it = j.find(name);
  if (it == j.end()) schema_error(path, std::string("missing field \"") + name + "\"");
  return *it;
}

std::size_t dim_from(const Json& j, const std::string& path) {
  const auto& d = field(j, "dim", path);
  if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) schema_error(path + ".dim", "expected a positive integer");
  return d.get<std::size_t>();
}

void check_type(const Json& j, const std::string& path, const char* expected) {
  if (auto it = j.find("type"); it != j.end() && (!it->is_string() || it->get<std::string>() != expected)) {
    schema_error(path + ".type", std::string("expected \"") + expected + "\"");
  }
}

const Json& array_field(const Json& j, const char* name, const std::string& path) {
  const auto& a = field(j, name, path);
  if (!a.is_array()) schema_error(path + "." + name, "expected an array");
  return a;
}

std::vector<ConvexPolyhedron> pieces_from(const Json& a, const std::string& path, std::size_t n) {
  if (!a.is_array()) schema_error(path, "expected an array");
  std::vector<ConvexPolyhedron> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(polyhedron_from(a[i], path + "[" + std::to_string(i) + "]", n));
  return out;
}

Json pieces_json(const PolyhedralSet& s) {
  Json out = Json::array();
  for (const auto& p : s.pieces()) out.push_back(to_json(p));
  return out;
}

Json conic_pieces_json(const std::vector<ConicPiece>& pieces) {
  Json out = Json::array();
  for (const auto& p : pieces) out.push_back(Json{{"base", to_json(p.base)}, {"fiber", to_json(p.fiber)}});
  return out;
}

std::vector<ConicPiece> conic_pieces_from(const Json& a, const std::string& path, std::size_t n) {
  if (!a.is_array()) schema_error(path, "expected an array");
  std::vector<ConicPiece> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    require_fields(a[i], p, {"base", "fiber"}, {"base", "fiber"});
    out.push_back({polyhedron_from(a[i]["base"], p + ".base", n), cone_from(a[i]["fiber"], p + ".fiber", n)});
  }
  return out;
}

}  // namespace

void require_fields(const Json& j, const std::string& path, std::initializer_list<const char*> allowed,
                    std::initializer_list<const char*> required) {
  if (!j.is_object()) schema_error(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      schema_error(path + "." + key, "unknown field");
    }
  }
  for (const char* r : required) field(j, r, path);
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
}

Json to_json(const Rational& r) { return to_string(r); }

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (const auto& c : v) out.push_back(to_json(c));
  return out;
}

Json to_json(const ConvexPolyhedron& p) {
  Json hs = Json::array();
  for (const auto& h : p.halfspaces()) hs.push_back(Json{{"normal", to_json(h.normal)}, {"offset", to_json(h.offset)}});
  return Json{{"halfspaces", hs}};
}

Json to_json(const PolyhedralSet& s) {
  return Json{{"type", "polyhedral_set"}, {"dim", s.dim()}, {"pieces", pieces_json(s)}};
}

Json to_json(const LocallyClosedPolyhedralSet& s) {
  return Json{{"type", "locally_closed_set"},
              {"dim", s.dim()},
              {"closure", pieces_json(s.closure())},
              {"removed", pieces_json(s.removed())}};
}

Json to_json(const ConvexCone& c) {
  Json normals = Json::array();
  for (const auto& n : c.normals()) normals.push_back(to_json(n));
  return Json{{"normals", normals}};
}

Json to_json(const ConicSubset& a) {
  Json out{{"type", "conic_subset"}, {"dim", a.dim()}, {"pieces", conic_pieces_json(a.pieces())}};
  return out;
}

Json to_json(const CotangentPoint& p) { return Json{{"x", to_json(p.x)}, {"xi", to_json(p.xi)}}; }

Json to_json(const StratumDatum& s) {
  Json degrees = Json::array();
  for (int d : s.degrees) degrees.push_back(d);
  Json ranks = Json::object();
  for (const auto& [d, r] : s.rank_by_degree) ranks[std::to_string(d)] = r;
  return Json{{"id", s.id},
              {"closure", pieces_json(s.stratum.closure())},
              {"removed", pieces_json(s.stratum.removed())},
              {"lambda", conic_pieces_json(s.lambda.pieces())},
              {"degrees", degrees},
              {"ranks", ranks}};
}

Json to_json(const StratifiedSheafDescription& d) {
  Json strata = Json::array();
  for (const auto& s : d.strata) strata.push_back(to_json(s));
  return Json{{"type", "stratified_sheaf"},
              {"dim", d.dim},
              {"covers_microsupport", d.covers_microsupport},
              {"strata", strata}};
}

Json to_json(const CohomologyRanks& r) {
  Json out = Json::object();
  for (const auto& [d, rank] : r) out[std::to_string(d)] = rank;
  return out;
}

Json to_json(const BracketReport& r) {
  return Json{{"verdict", verdict_name(r.verdict)},
              {"hypothesis_max", r.hypothesis_max},
              {"bracket_max", r.bracket_max},
              {"tol", r.tol},
              {"hypothesis_tol", r.hypothesis_tol},
              {"samples", r.samples}};
}

Json to_json(const PerversityInstanceData& p) {
  Json codims = Json::object();
  for (const auto& [id, c] : p.codims) codims[id] = c;
  Json out{{"type", "perversity_instance"}, {"name", p.name}, {"sheaf", to_json(p.sheaf)},
           {"dual", to_json(p.dual)},       {"codims", codims}};
  if (p.expected) out["expected"] = *p.expected;
  return out;
}

Rational rational_from(const Json& j, const std::string& path) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
  schema_error(path, "expected a rational string \"p/q\" or an integer");
}

Vec vec_from(const Json& j, const std::string& path, std::size_t n) {
  if (!j.is_array()) schema_error(path, "expected an array of rationals");
  if (n != 0 && j.size() != n) schema_error(path, "expected " + std::to_string(n) + " entries");
  Vec out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rational_from(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

ConvexPolyhedron polyhedron_from(const Json& j, const std::string& path, std::size_t n) {
  require_fields(j, path, {"halfspaces"}, {"halfspaces"});
  const auto& hs = array_field(j, "halfspaces", path);
  std::vector<Halfspace> out;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const std::string p = path + ".halfspaces[" + std::to_string(i) + "]";
    require_fields(hs[i], p, {"normal", "offset"}, {"normal", "offset"});
    out.push_back({vec_from(hs[i]["normal"], p + ".normal", n), rational_from(hs[i]["offset"], p + ".offset")});
  }
  return ConvexPolyhedron(n, std::move(out));
}

PolyhedralSet polyhedral_set_from(const Json& j, const std::string& path) {
  require_fields(j, path, {"type", "dim", "pieces", "name"}, {"dim", "pieces"});
  check_type(j, path, "polyhedral_set");
  const std::size_t n = dim_from(j, path);
  return PolyhedralSet(n, pieces_from(j["pieces"], path + ".pieces", n));
}

LocallyClosedPolyhedralSet locally_closed_from(const Json& j, const std::string& path) {
  if (j.is_object() && j.contains("pieces")) return LocallyClosedPolyhedralSet::closed(polyhedral_set_from(j, path));
  require_fields(j, path, {"type", "dim", "closure", "removed", "name"}, {"dim", "closure"});
  check_type(j, path, "locally_closed_set");
  const std::size_t n = dim_from(j, path);
  PolyhedralSet closure(n, pieces_from(j["closure"], path + ".closure", n));
  PolyhedralSet removed = j.contains("removed") ? PolyhedralSet(n, pieces_from(j["removed"], path + ".removed", n))
                                                : PolyhedralSet::empty(n);
  return LocallyClosedPolyhedralSet(std::move(closure), std::move(removed));
}

ConvexCone cone_from(const Json& j, const std::string& path, std::size_t n) {
  require_fields(j, path, {"normals", "generators"});
  if (j.contains("normals") == j.contains("generators")) {
    schema_error(path, "give exactly one of \"normals\" and \"generators\"");
  }
  const char* key = j.contains("normals") ? "normals" : "generators";
  const auto& a = array_field(j, key, path);
  std::vector<Vec> vs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    vs.push_back(vec_from(a[i], path + "." + key + "[" + std::to_string(i) + "]", n));
  }
  return j.contains("normals") ? ConvexCone(n, std::move(vs)) : cone_from_generators(n, vs);
}

ConicSubset conic_subset_from(const Json& j, const std::string& path) {
  require_fields(j, path, {"type", "dim", "pieces", "name"}, {"dim", "pieces"});
  check_type(j, path, "conic_subset");
  const std::size_t n = dim_from(j, path);
  return ConicSubset(n, conic_pieces_from(j["pieces"], path + ".pieces", n));
}

StratifiedSheafDescription sheaf_from(const Json& j, const std::string& path) {
  require_fields(j, path, {"type", "dim", "strata", "covers_microsupport", "name"}, {"dim", "strata"});
  check_type(j, path, "stratified_sheaf");
  StratifiedSheafDescription d;
  d.dim = dim_from(j, path);
  if (j.contains("covers_microsupport")) {
    if (!j["covers_microsupport"].is_boolean()) schema_error(path + ".covers_microsupport", "expected a boolean");
    d.covers_microsupport = j["covers_microsupport"].get<bool>();
  }
  const auto& strata = array_field(j, "strata", path);
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const std::string p = path + ".strata[" + std::to_string(i) + "]";
    const auto& s = strata[i];
    require_fields(s, p, {"id", "closure", "removed", "lambda", "degrees", "ranks"}, {"id", "closure", "lambda", "degrees"});
    StratumDatum datum;
    if (!s["id"].is_string()) schema_error(p + ".id", "expected a string");
    datum.id = s["id"].get<std::string>();
    PolyhedralSet closure(d.dim, pieces_from(s["closure"], p + ".closure", d.dim));
    PolyhedralSet removed = s.contains("removed") ? PolyhedralSet(d.dim, pieces_from(s["removed"], p + ".removed", d.dim))
                                                  : PolyhedralSet::empty(d.dim);
    datum.stratum = LocallyClosedPolyhedralSet(std::move(closure), std::move(removed));
    datum.lambda = ConicSubset(d.dim, conic_pieces_from(s["lambda"], p + ".lambda", d.dim));
    const auto& degrees = array_field(s, "degrees", p);
    for (const auto& deg : degrees) {
      if (!deg.is_number_integer()) schema_error(p + ".degrees", "expected integers");
      datum.degrees.push_back(deg.get<int>());
    }
    if (s.contains("ranks")) {
      if (!s["ranks"].is_object()) schema_error(p + ".ranks", "expected an object");
      for (const auto& [key, value] : s["ranks"].items()) {
        if (!value.is_number_integer()) schema_error(p + ".ranks." + key, "expected an integer");
        try {
          datum.rank_by_degree[std::stoi(key)] = value.get<int>();
        } catch (const std::exception&) {
          schema_error(p + ".ranks." + key, "degree keys must be integers");
        }
      }
    }
    d.strata.push_back(std::move(datum));
  }
  return d;
}

ScalarField field_from(const Json& j, const std::string& path) {
  try {
    if (j.is_string()) return ScalarField::parse(j.get<std::string>());
    if (j.is_object()) return ScalarField::from_json_text(j.dump());
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
  schema_error(path, "expected an expression string or expression object");
}

PerversityInstanceData perversity_instance_from(const Json& j, const std::string& path) {
  require_fields(j, path, {"type", "name", "sheaf", "dual", "codims", "expected"}, {"sheaf", "codims"});
  check_type(j, path, "perversity_instance");
  PerversityInstanceData out;
  if (j.contains("name")) {
    if (!j["name"].is_string()) schema_error(path + ".name", "expected a string");
    out.name = j["name"].get<std::string>();
  }
  out.sheaf = sheaf_from(j["sheaf"], path + ".sheaf");
  out.dual = j.contains("dual") ? sheaf_from(j["dual"], path + ".dual") : out.sheaf;
  if (!j["codims"].is_object()) schema_error(path + ".codims", "expected an object");
  for (const auto& [id, c] : j["codims"].items()) {
    if (!c.is_number_integer()) schema_error(path + ".codims." + id, "expected an integer");
    out.codims[id] = c.get<int>();
  }
  if (j.contains("expected")) {
    if (!j["expected"].is_boolean()) schema_error(path + ".expected", "expected a boolean");
    out.expected = j["expected"].get<bool>();
  }
  return out;
}

Vec parse_vector_text(const std::string& text) {
  std::string t = text;
  t.erase(std::remove_if(t.begin(), t.end(), [](char c) { return c == '[' || c == ']' || c == ' ' || c == '"'; }),
          t.end());
  Vec out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw Error(ErrorCode::Parse, "empty entry in vector \"" + text + "\"");
    out.push_back(parse_rational(item));
  }
  if (out.empty()) throw Error(ErrorCode::Parse, "empty vector \"" + text + "\"");
  return out;
}

}  // namespace microlocal::io
