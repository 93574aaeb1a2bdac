#include "microlocal/cohoracle.hpp"

#include "microlocal/errors.hpp"
#include "microlocal/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>

namespace microlocal {

namespace {

using Polygon = std::vector<Vec>;

Rational side(const Halfspace& h, const Vec& p) { return dot(h.normal, p) - h.offset; }

std::vector<Polygon> split(const std::vector<Polygon>& polygons, const Halfspace& line) {
  std::vector<Polygon> out;
  out.reserve(polygons.size() + 4);
  for (const auto& p : polygons) {
    const std::size_t m = p.size();
    std::vector<Rational> value(m);
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < m; ++i) {
      value[i] = side(line, p[i]);
      pos = pos || sgn(value[i]) > 0;
      neg = neg || sgn(value[i]) < 0;
    }
    if (!pos || !neg) {
      out.push_back(p);
      continue;
    }
    Polygon upper, lower;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = (i + 1) % m;
      const int si = sgn(value[i]), sj = sgn(value[j]);
      if (si >= 0) upper.push_back(p[i]);
      if (si <= 0) lower.push_back(p[i]);
      if (si * sj < 0) {
        Rational t = value[i] / (value[i] - value[j]);
        Vec q = add(p[i], scale(sub(p[j], p[i]), t));
        upper.push_back(q);
        lower.push_back(std::move(q));
      }
    }
    out.push_back(std::move(upper));
    out.push_back(std::move(lower));
  }
  return out;
}

// Lines are identified up to a nonzero rescaling of (a, b).
std::vector<Halfspace> distinct_lines(const std::vector<Halfspace>& lines) {
  std::set<Vec> seen;
  std::vector<Halfspace> out;
  for (const auto& h : lines) {
    if (is_zero(h.normal)) continue;
    Vec key = h.normal;
    key.push_back(h.offset);
    auto first = std::find_if(key.begin(), key.end(), [](const Rational& r) { return sgn(r) != 0; });
    if (sgn(*first) < 0) key = negate(key);
    key = normalize_direction(key);
    if (seen.insert(key).second) out.push_back(h);
  }
  return out;
}

PlanarComplex from_polygons(const std::vector<Polygon>& polygons) {
  PlanarComplex k;
  std::map<Vec, std::size_t> vertex_index;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;
  auto vertex = [&](const Vec& v) {
    auto [it, inserted] = vertex_index.emplace(v, k.vertices.size());
    if (inserted) {
      k.vertices.push_back(v);
      k.samples[0].push_back(v);
    }
    return it->second;
  };
  for (const auto& p : polygons) {
    std::vector<std::size_t> ids;
    Vec centroid = zeros(2);
    for (const auto& v : p) {
      ids.push_back(vertex(v));
      centroid = add(centroid, v);
    }
    std::vector<std::pair<std::size_t, int>> face;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::size_t a = ids[i], b = ids[(i + 1) % ids.size()];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_index.emplace(std::pair{key.first, key.second}, k.edges.size());
      if (inserted) {
        k.edges.push_back({key.first, key.second});
        k.samples[1].push_back(scale(add(k.vertices[a], k.vertices[b]), ratio(1, 2)));
      }
      face.push_back({it->second, a < b ? 1 : -1});
    }
    k.faces.push_back(std::move(face));
    k.samples[2].push_back(scale(centroid, ratio(1, static_cast<long>(p.size()))));
  }
  return k;
}

void require_subcomplex(const PlanarComplex& k, const CellMask& m, const char* what) {
  for (std::size_t e = 0; e < k.edges.size(); ++e) {
    if (m[1][e] && (!m[0][k.edges[e][0]] || !m[0][k.edges[e][1]])) {
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " is not a subcomplex");
    }
  }
  for (std::size_t f = 0; f < k.faces.size(); ++f) {
    if (!m[2][f]) continue;
    for (const auto& [e, sign] : k.faces[f]) {
      if (!m[1][e]) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is not a subcomplex");
    }
  }
}

CellMask mask_and(const CellMask& a, const CellMask& b) {
  CellMask out;
  for (std::size_t d = 0; d < 3; ++d) {
    out[d].resize(a[d].size());
    for (std::size_t i = 0; i < a[d].size(); ++i) out[d][i] = a[d][i] && b[d][i];
  }
  return out;
}

CellMask mask_or(const CellMask& a, const CellMask& b) {
  CellMask out;
  for (std::size_t d = 0; d < 3; ++d) {
    out[d].resize(a[d].size());
    for (std::size_t i = 0; i < a[d].size(); ++i) out[d][i] = a[d][i] || b[d][i];
  }
  return out;
}

std::vector<Halfspace> boundary_lines(const LocallyClosedPolyhedralSet& s) {
  std::vector<Halfspace> lines;
  for (const auto* set : {&s.closure(), &s.removed()}) {
    for (const auto& p : set->pieces()) {
      for (const auto& h : p.halfspaces()) lines.push_back(h);
    }
  }
  return distinct_lines(lines);
}

PolyhedralSet times_line(const PolyhedralSet& s) {
  std::vector<ConvexPolyhedron> pieces;
  for (const auto& p : s.pieces()) {
    std::vector<Halfspace> hs;
    for (const auto& h : p.halfspaces()) hs.push_back({Vec{h.normal[0], 0}, h.offset});
    pieces.emplace_back(2, std::move(hs));
  }
  return PolyhedralSet(2, std::move(pieces));
}

// Relative cohomology of the window pair at one radius; phi = <a, . - x>.
LocalCohomology local_at(const LocallyClosedPolyhedralSet& s, const std::vector<Halfspace>& lines, const Vec& x,
                         const Vec& a, const Rational& radius) {
  std::vector<Polygon> polygons{regular_window(x, radius)};
  for (const auto& line : lines) polygons = split(polygons, line);
  const Rational phi_x = dot(a, x);
  std::optional<Rational> delta;
  if (!is_zero(a)) {
    for (const auto& p : polygons) {
      for (const auto& v : p) {
        Rational value = dot(a, v) - phi_x;
        if (sgn(value) < 0 && (!delta || -value < *delta)) delta = -value;
      }
    }
  }
  if (delta) {
    *delta /= 2;
    polygons = split(polygons, Halfspace{a, phi_x - *delta});
  }
  const PlanarComplex k = from_polygons(polygons);
  const CellMask closure = k.cells_in(s.closure());
  const CellMask removed = mask_and(k.cells_in(s.removed()), closure);
  CellMask below;
  for (std::size_t d = 0; d < 3; ++d) {
    below[d].resize(k.samples[d].size());
    for (std::size_t i = 0; i < below[d].size(); ++i) {
      below[d][i] = delta && dot(a, k.samples[d][i]) - phi_x <= -*delta;
    }
  }
  const CellMask closure_below = mask_and(closure, below);
  LocalCohomology out;
  out.ball = pair_cohomology(k, closure, removed);
  out.complement = pair_cohomology(k, closure_below, mask_and(removed, below));
  out.local = pair_cohomology(k, closure, mask_or(removed, closure_below));
  out.radius = radius;
  return out;
}

std::optional<int> first_degree(const CohomologyRanks& r) {
  if (r.empty()) return std::nullopt;
  return r.begin()->first;
}

// The germ of S at x up to translation: the active normals of every piece
// of the closure and of the removed set containing x.
Vec germ_key(const LocallyClosedPolyhedralSet& s, const Vec& x, const Vec& xi) {
  Vec key = normalize_direction(xi);
  for (const auto* set : {&s.closure(), &s.removed()}) {
    std::set<std::vector<Vec>> pieces;
    for (const auto& p : set->pieces()) {
      if (!p.contains(x)) continue;
      std::vector<Vec> active;
      for (const auto& h : p.halfspaces()) {
        if (dot(h.normal, x) == h.offset) active.push_back(normalize_direction(h.normal));
      }
      std::sort(active.begin(), active.end());
      active.erase(std::unique(active.begin(), active.end()), active.end());
      pieces.insert(std::move(active));
    }
    key.push_back(static_cast<long>(pieces.size()));
    for (const auto& p : pieces) {
      key.push_back(static_cast<long>(p.size()));
      for (const auto& v : p) key.insert(key.end(), v.begin(), v.end());
    }
  }
  return key;
}

struct GermResult {
  std::optional<int> first;
  bool unstable = false;
};

}  // namespace

bool all_zero(const CohomologyRanks& r) {
  return std::all_of(r.begin(), r.end(), [](const auto& e) { return e.second == 0; });
}

long euler_characteristic(const CohomologyRanks& r) {
  long chi = 0;
  for (const auto& [degree, rank] : r) chi += (degree % 2 == 0 ? 1 : -1) * static_cast<long>(rank);
  return chi;
}

PlanarComplex PlanarComplex::arrangement(const std::vector<Vec>& window, const std::vector<Halfspace>& lines) {
  if (window.size() < 3) throw Error(ErrorCode::InvalidArgument, "a window needs at least three vertices");
  for (const auto& v : window) {
    if (v.size() != 2) throw Error(ErrorCode::DimensionMismatch, "window vertices must be planar");
  }
  std::vector<Polygon> polygons{window};
  for (const auto& line : distinct_lines(lines)) {
    if (line.normal.size() != 2) throw Error(ErrorCode::DimensionMismatch, "arrangement lines must be planar");
    polygons = split(polygons, line);
  }
  return from_polygons(polygons);
}

CellMask PlanarComplex::cells_in(const PolyhedralSet& s) const {
  CellMask m;
  for (std::size_t d = 0; d < 3; ++d) {
    m[d].resize(samples[d].size());
    for (std::size_t i = 0; i < samples[d].size(); ++i) m[d][i] = s.contains(samples[d][i]);
  }
  return m;
}

bool PlanarComplex::boundary_squared_zero() const {
  for (const auto& face : faces) {
    std::map<std::size_t, int> total;
    for (const auto& [e, sign] : face) {
      total[edges[e][1]] += sign;
      total[edges[e][0]] -= sign;
    }
    for (const auto& [v, c] : total) {
      if (c != 0) return false;
    }
  }
  return true;
}

long PlanarComplex::euler_characteristic() const {
  return static_cast<long>(vertices.size()) - static_cast<long>(edges.size()) + static_cast<long>(faces.size());
}

CohomologyRanks pair_cohomology(const PlanarComplex& k, const CellMask& a, const CellMask& b) {
  for (std::size_t d = 0; d < 3; ++d) {
    if (a[d].size() != k.cell_count(static_cast<int>(d)) || b[d].size() != a[d].size()) {
      throw Error(ErrorCode::DimensionMismatch, "cell masks do not match the complex");
    }
    for (std::size_t i = 0; i < a[d].size(); ++i) {
      if (b[d][i] && !a[d][i]) throw Error(ErrorCode::InvalidArgument, "B is not contained in A");
    }
  }
  require_subcomplex(k, a, "A");
  require_subcomplex(k, b, "B");
  std::array<std::vector<long>, 3> index;
  std::array<std::size_t, 3> count{};
  for (std::size_t d = 0; d < 3; ++d) {
    index[d].assign(a[d].size(), -1);
    for (std::size_t i = 0; i < a[d].size(); ++i) {
      if (a[d][i] && !b[d][i]) index[d][i] = static_cast<long>(count[d]++);
    }
  }
  linalg::Matrix d1, d2;
  for (std::size_t e = 0; e < k.edges.size(); ++e) {
    if (index[1][e] < 0) continue;
    Vec row = zeros(count[0]);
    if (index[0][k.edges[e][1]] >= 0) row[static_cast<std::size_t>(index[0][k.edges[e][1]])] += 1;
    if (index[0][k.edges[e][0]] >= 0) row[static_cast<std::size_t>(index[0][k.edges[e][0]])] -= 1;
    d1.push_back(std::move(row));
  }
  for (std::size_t f = 0; f < k.faces.size(); ++f) {
    if (index[2][f] < 0) continue;
    Vec row = zeros(count[1]);
    for (const auto& [e, sign] : k.faces[f]) {
      if (index[1][e] >= 0) row[static_cast<std::size_t>(index[1][e])] += sign;
    }
    d2.push_back(std::move(row));
  }
  const std::size_t r1 = d1.empty() ? 0 : linalg::rank(d1, count[0]);
  const std::size_t r2 = d2.empty() ? 0 : linalg::rank(d2, count[1]);
  CohomologyRanks out;
  const std::array<std::size_t, 3> h{count[0] - r1, count[1] - r1 - r2, count[2] - r2};
  for (int j = 0; j < 3; ++j) {
    if (h[static_cast<std::size_t>(j)] != 0) out[j] = h[static_cast<std::size_t>(j)];
  }
  return out;
}

std::vector<Vec> regular_window(const Vec& center, const Rational& radius) {
  if (center.size() != 2) throw Error(ErrorCode::DimensionMismatch, "windows are planar");
  if (sgn(radius) <= 0) throw Error(ErrorCode::InvalidArgument, "window radius must be positive");
  // Rational points on the unit circle near 0, 22.5, 45 and 67.5 degrees.
  const std::vector<Vec> quadrant{Vec{1, 0}, Vec{ratio(12, 13), ratio(5, 13)}, Vec{ratio(119, 169), ratio(120, 169)},
                                  Vec{ratio(5, 13), ratio(12, 13)}};
  std::vector<Vec> out;
  for (int turn = 0; turn < 4; ++turn) {
    for (auto v : quadrant) {
      for (int r = 0; r < turn; ++r) v = Vec{-v[1], v[0]};
      out.push_back(add(center, scale(v, radius)));
    }
  }
  return out;
}

CohomologyRanks pair_cohomology(const PolyhedralSet& a, const PolyhedralSet& b, const std::vector<Vec>& window) {
  if (a.dim() != 2 || b.dim() != 2) throw Error(ErrorCode::Unsupported, "pair cohomology is planar");
  std::vector<Halfspace> lines;
  for (const auto* set : {&a, &b}) {
    for (const auto& p : set->pieces()) {
      for (const auto& h : p.halfspaces()) lines.push_back(h);
    }
  }
  const auto k = PlanarComplex::arrangement(window, lines);
  const auto ma = k.cells_in(a);
  const auto mb = k.cells_in(b);
  for (std::size_t d = 0; d < 3; ++d) {
    for (std::size_t i = 0; i < ma[d].size(); ++i) {
      if (mb[d][i] && !ma[d][i]) throw Error(ErrorCode::InvalidArgument, "B is not contained in A");
    }
  }
  return pair_cohomology(k, ma, mb);
}

Rational feature_radius(const LocallyClosedPolyhedralSet& s, const Vec& x) {
  std::optional<Rational> nearest;
  for (const auto& h : boundary_lines(s)) {
    Rational gap = dot(h.normal, x) - h.offset;
    if (sgn(gap) == 0) continue;
    Rational d2 = gap * gap / squared_norm(h.normal);
    if (!nearest || d2 < *nearest) nearest = d2;
  }
  Rational radius = 1;
  while (nearest && 4 * radius * radius > *nearest) radius /= 2;
  return radius;
}

LocalCohomology local_cohomology(const LocallyClosedPolyhedralSet& s, const Vec& x, const Vec& covector,
                                 const LocalCohomologyOptions& options) {
  const std::size_t n = s.dim();
  if (n == 0 || n > 2) throw Error(ErrorCode::Unsupported, "local cohomology is implemented in dimensions 1 and 2");
  if (x.size() != n || covector.size() != n) throw Error(ErrorCode::DimensionMismatch, "point or covector dimension");
  if (!s.closure().contains(x)) throw Error(ErrorCode::NotInSet, "x is not in the closure of S");
  LocallyClosedPolyhedralSet planar = s;
  Vec x2 = x, a = covector;
  if (n == 1) {
    planar = LocallyClosedPolyhedralSet(times_line(s.closure()), times_line(s.removed()));
    x2 = Vec{x[0], 0};
    a = Vec{covector[0], 0};
  }
  const auto lines = boundary_lines(planar);
  Rational outer = options.radius ? *options.radius : feature_radius(planar, x2);
  Rational inner = options.inner_radius ? *options.inner_radius : outer / 2;
  if (sgn(inner) <= 0 || inner >= outer) throw Error(ErrorCode::InvalidArgument, "radii must satisfy 0 < inner < outer");
  for (int attempt = 0; attempt <= options.retries; ++attempt) {
    auto big = local_at(planar, lines, x2, a, outer);
    auto small = local_at(planar, lines, x2, a, inner);
    if (big.local == small.local && big.ball == small.ball && big.complement == small.complement) return small;
    outer = inner;
    inner = inner / 2;
  }
  throw Error(ErrorCode::Unstable, "local cohomology did not stabilize; shrink the radius");
}

LocalCohomology local_cohomology(const LocallyClosedPolyhedralSet& s, const Vec& x, const ScalarField& phi,
                                 const LocalCohomologyOptions& options) {
  const std::size_t n = s.dim();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  auto affine = as_affine(phi, n);
  if (!affine) throw Error(ErrorCode::InvalidArgument, "phi must be affine in the base variables");
  if (dot(affine->linear, x) + affine->offset != 0) throw Error(ErrorCode::InvalidArgument, "phi(x) must vanish");
  return local_cohomology(s, x, affine->linear, options);
}

const char* status_name(ProbeVerdict::Status s) {
  switch (s) {
    case ProbeVerdict::Status::In: return "in";
    case ProbeVerdict::Status::Out: return "out";
    case ProbeVerdict::Status::Unstable: return "unstable";
  }
  return "out";
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("MICROLOCAL_THREADS")) {
    try {
      int value = std::stoi(env);
      if (value > 0) return static_cast<unsigned>(value);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ProbeVerdict> ssk_definition_test(const LocallyClosedPolyhedralSet& s, int k,
                                              const std::vector<CotangentPoint>& probes,
                                              const SskTestOptions& options) {
  const std::size_t n = s.dim();
  if (n == 0 || n > 2) throw Error(ErrorCode::Unsupported, "the definition test is implemented in dimensions 1 and 2");
  for (const auto& p : probes) {
    if (p.x.size() != n || p.xi.size() != n) throw Error(ErrorCode::DimensionMismatch, "probe dimension");
  }
  const Rational h = options.stencil_radius;
  std::vector<Vec> directions = n == 1 ? std::vector<Vec>{Vec{1}, Vec{-1}} : options.stencil_directions;

  std::mutex mutex;
  std::map<Vec, GermResult> cache;
  auto germ = [&](const Vec& x, const Vec& xi) -> GermResult {
    if (!s.closure().contains(x)) return {};
    Vec key = germ_key(s, x, xi);
    {
      std::lock_guard lock(mutex);
      if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    GermResult result;
    try {
      LocalCohomologyOptions lc;
      lc.retries = options.retries;
      result.first = first_degree(local_cohomology(s, x, xi, lc).local);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Unstable) throw;
      result.unstable = true;
    }
    std::lock_guard lock(mutex);
    cache.emplace(std::move(key), result);
    return result;
  };

  std::vector<ProbeVerdict> out(probes.size());
  auto evaluate = [&](std::size_t i) {
    const auto& p = probes[i];
    std::vector<std::pair<Vec, Vec>> stencil{{p.x, p.xi}};
    for (const auto& d : directions) stencil.push_back({add(p.x, scale(d, h)), p.xi});
    if (n == 2 && !is_zero(p.xi)) {
      Vec perp{-p.xi[1], p.xi[0]};
      stencil.push_back({p.x, add(p.xi, scale(perp, h))});
      stencil.push_back({p.x, sub(p.xi, scale(perp, h))});
    }
    bool unstable = false;
    ProbeVerdict verdict;
    for (const auto& [x, xi] : stencil) {
      auto g = germ(x, xi);
      unstable = unstable || g.unstable;
      if (g.first && (!verdict.first_degree || *g.first < *verdict.first_degree)) verdict.first_degree = g.first;
    }
    if (verdict.first_degree && *verdict.first_degree <= k) {
      verdict.status = ProbeVerdict::Status::In;
    } else {
      verdict.status = unstable ? ProbeVerdict::Status::Unstable : ProbeVerdict::Status::Out;
    }
    out[i] = verdict;
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads ? options.threads : default_thread_count(),
                                                          static_cast<unsigned>(probes.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < probes.size(); i = next++) evaluate(i);
    } catch (...) {
      std::lock_guard lock(mutex);
      if (!failure) failure = std::current_exception();
      next = probes.size();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<Vec> probe_covectors(std::size_t n, bool with_zero) {
  std::vector<Vec> out;
  if (with_zero) out.push_back(zeros(n));
  if (n == 1) {
    out.push_back(Vec{1});
    out.push_back(Vec{-1});
    return out;
  }
  if (n != 2) throw Error(ErrorCode::Unsupported, "probe covectors are defined on the line and the plane");
  const std::vector<Vec> octant{Vec{1, 0}, Vec{2, 1}, Vec{1, 1}, Vec{1, 2}};
  for (int turn = 0; turn < 4; ++turn) {
    for (auto v : octant) {
      for (int r = 0; r < turn; ++r) v = Vec{-v[1], v[0]};
      out.push_back(v);
    }
  }
  return out;
}

std::vector<CotangentPoint> probe_grid(std::size_t n, const Rational& lo, const Rational& hi, int steps,
                                       const std::vector<Vec>& covectors) {
  if (n == 0 || n > 2) throw Error(ErrorCode::Unsupported, "probe grids are defined on the line and the plane");
  if (steps < 2 || hi <= lo) throw Error(ErrorCode::InvalidArgument, "a probe grid needs hi > lo and two steps");
  std::vector<Rational> axis;
  for (int i = 0; i < steps; ++i) axis.push_back(lo + (hi - lo) * ratio(i, steps - 1));
  std::vector<Vec> bases;
  if (n == 1) {
    for (const auto& a : axis) bases.push_back(Vec{a});
  } else {
    for (const auto& a : axis) {
      for (const auto& b : axis) bases.push_back(Vec{a, b});
    }
  }
  std::vector<CotangentPoint> out;
  for (const auto& x : bases) {
    for (const auto& xi : covectors) out.push_back({x, xi});
  }
  return out;
}

}  // namespace microlocal
