#pragma once

// JSON encoding of the domain types. Rationals are strings "p/q"; readers
// reject unknown fields with a Schema error naming the offending path.

#include "microlocal/cohoracle.hpp"
#include "microlocal/geometry.hpp"
#include "microlocal/normalcone.hpp"
#include "microlocal/scalar_field.hpp"
#include "microlocal/sheaf.hpp"
#include "microlocal/symplectic.hpp"

#include <json.hpp>

#include <string>

namespace microlocal::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "microlocal/v1";

/// Parses a file; Parse errors carry the path.
Json read_file(const std::string& path);

Json to_json(const Rational& r);
Json to_json(const Vec& v);
Json to_json(const ConvexPolyhedron& p);
Json to_json(const PolyhedralSet& s);
Json to_json(const LocallyClosedPolyhedralSet& s);
Json to_json(const ConvexCone& c);
Json to_json(const ConicSubset& a);
Json to_json(const CotangentPoint& p);
Json to_json(const StratumDatum& s);
Json to_json(const StratifiedSheafDescription& d);
Json to_json(const CohomologyRanks& r);
Json to_json(const BracketReport& r);

Rational rational_from(const Json& j, const std::string& path);
Vec vec_from(const Json& j, const std::string& path, std::size_t n = 0);
ConvexPolyhedron polyhedron_from(const Json& j, const std::string& path, std::size_t n);
PolyhedralSet polyhedral_set_from(const Json& j, const std::string& path);
/// Accepts a locally closed set or a plain (closed) polyhedral set.
LocallyClosedPolyhedralSet locally_closed_from(const Json& j, const std::string& path);
ConvexCone cone_from(const Json& j, const std::string& path, std::size_t n);
ConicSubset conic_subset_from(const Json& j, const std::string& path);
StratifiedSheafDescription sheaf_from(const Json& j, const std::string& path);
ScalarField field_from(const Json& j, const std::string& path);

struct PerversityInstanceData {
  std::string name;
  StratifiedSheafDescription sheaf;
  StratifiedSheafDescription dual;
  std::map<std::string, int> codims;
  std::optional<bool> expected;
};

Json to_json(const PerversityInstanceData& p);
PerversityInstanceData perversity_instance_from(const Json& j, const std::string& path);

/// Throws Schema unless every key of `j` is listed.
void require_fields(const Json& j, const std::string& path, std::initializer_list<const char*> allowed,
                    std::initializer_list<const char*> required = {});

/// "a,b,c" or a JSON array of rationals.
Vec parse_vector_text(const std::string& text);

}  // namespace microlocal::io
