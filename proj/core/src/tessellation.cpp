#include "tesslab/tessellation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

namespace tesslab::tess {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

double wrap_positive(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

double cross2(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
Vec2 sub(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct WindowGeom {
  bool is_disk = false;
  double R = 0.0;  // disk radius
  double n = 0.0;  // square half side

  static WindowGeom from(const plp::Window& w) {
    WindowGeom g;
    if (std::holds_alternative<plp::DiskWindow>(w)) {
      g.is_disk = true;
      g.R = std::get<plp::DiskWindow>(w).radius;
    } else {
      g.n = std::get<plp::SquareWindow>(w).half_side;
    }
    return g;
  }

  double area() const { return is_disk ? kPi * R * R : 4.0 * n * n; }

  bool on_boundary(Vec2 p, double tol) const {
    if (is_disk) return std::abs(std::hypot(p.x, p.y) - R) <= tol;
    return std::max(std::abs(p.x), std::abs(p.y)) >= n - tol;
  }

  /// Position along the boundary, CCW. Disk: angle. Square: perimeter
  /// parameter starting at the corner (n, -n).
  double boundary_param(Vec2 p) const {
    if (is_disk) return wrap_positive(std::atan2(p.y, p.x));
    if (std::abs(p.x - n) <= std::abs(p.y - n) && std::abs(p.x - n) <= std::abs(p.x + n) &&
        std::abs(p.x - n) <= std::abs(p.y + n))
      return p.y + n;  // right side, y from -n to n
    if (std::abs(p.y - n) <= std::abs(p.x + n) && std::abs(p.y - n) <= std::abs(p.y + n))
      return 2.0 * n + (n - p.x);  // top, x from n to -n
    if (std::abs(p.x + n) <= std::abs(p.y + n)) return 4.0 * n + (n - p.y);  // left
    return 6.0 * n + (p.x + n);                                              // bottom
  }
};

struct VertexStore {
  std::vector<Vec2> points;
  std::vector<bool> boundary;
  std::unordered_map<std::uint64_t, std::vector<int>> grid;
  double cell;

  explicit VertexStore(double tol) : cell(std::max(4.0 * tol, 1e-7)) {}

  static std::uint64_t key(long long ix, long long iy) {
    return static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ULL +
           static_cast<std::uint64_t>(iy) * 0xC2B2AE3D27D4EB4FULL;
  }

  int find(Vec2 p, double tol) const {
    const long long cx = static_cast<long long>(std::floor(p.x / cell));
    const long long cy = static_cast<long long>(std::floor(p.y / cell));
    for (long long ix = cx - 1; ix <= cx + 1; ++ix) {
      for (long long iy = cy - 1; iy <= cy + 1; ++iy) {
        auto it = grid.find(key(ix, iy));
        if (it == grid.end()) continue;
        for (int id : it->second) {
          if (dist(points[static_cast<std::size_t>(id)], p) <= tol) return id;
        }
      }
    }
    return -1;
  }

  int insert(Vec2 p, bool on_bnd) {
    const int id = static_cast<int>(points.size());
    points.push_back(p);
    boundary.push_back(on_bnd);
    const long long ix = static_cast<long long>(std::floor(p.x / cell));
    const long long iy = static_cast<long long>(std::floor(p.y / cell));
    grid[key(ix, iy)].push_back(id);
    return id;
  }
};

struct EdgeGeom {
  bool is_arc = false;
  double delta = 0.0;  // CCW angular extent for boundary arcs
};

}  // namespace

long Arrangement::bounded_face_count() const {
  long c = 0;
  for (const auto& f : faces)
    if (!f.outer) ++c;
  return c;
}

long Arrangement::interior_face_count() const {
  long c = 0;
  for (const auto& f : faces)
    if (!f.outer && !f.touches_boundary) ++c;
  return c;
}

std::vector<Segment> clip_lines(const plp::LineSample& sample) {
  std::vector<Segment> out;
  const WindowGeom geom = WindowGeom::from(sample.window);
  for (const auto& line : sample.lines) {
    const double c = std::cos(line.theta), s = std::sin(line.theta);
    if (geom.is_disk) {
      if (std::abs(line.r) >= geom.R) continue;
      const double a = std::acos(line.r / geom.R);
      const Vec2 p{geom.R * std::cos(line.theta + a), geom.R * std::sin(line.theta + a)};
      const Vec2 q{geom.R * std::cos(line.theta - a), geom.R * std::sin(line.theta - a)};
      out.push_back({p, q});
    } else {
      // Liang-Barsky clip of {base + t dir} to the square.
      const Vec2 base{line.r * c, line.r * s};
      const Vec2 dir{-s, c};
      double t0 = -1e18, t1 = 1e18;
      bool ok = true;
      const double lo[2] = {-geom.n, -geom.n}, hi[2] = {geom.n, geom.n};
      const double b[2] = {base.x, base.y}, d[2] = {dir.x, dir.y};
      for (int axis = 0; axis < 2 && ok; ++axis) {
        if (std::abs(d[axis]) < 1e-15) {
          if (b[axis] < lo[axis] || b[axis] > hi[axis]) ok = false;
          continue;
        }
        double ta = (lo[axis] - b[axis]) / d[axis];
        double tb = (hi[axis] - b[axis]) / d[axis];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
      }
      if (!ok || t0 >= t1) continue;
      out.push_back({{base.x + t0 * dir.x, base.y + t0 * dir.y},
                     {base.x + t1 * dir.x, base.y + t1 * dir.y}});
    }
  }
  return out;
}

Arrangement build_arrangement(const std::vector<Segment>& segments, const plp::Window& window,
                              double tol) {
  const WindowGeom geom = WindowGeom::from(window);
  Arrangement arr;
  arr.window = window;
  arr.window_area = geom.area();

  VertexStore store(tol);
  std::vector<std::array<int, 3>> degeneracies;
  const int nseg = static_cast<int>(segments.size());

  // Segment endpoints. A fresh endpoint merging into an existing vertex is a
  // shared-endpoint degeneracy for random chord input.
  std::vector<int> end_a(nseg), end_b(nseg);
  std::vector<std::array<int, 2>> vertex_source;  // first (i, j) creating each vertex
  auto add_point = [&](Vec2 p, bool bnd, int si, int sj) {
    int id = store.find(p, tol);
    if (id >= 0) {
      const auto& src = vertex_source[static_cast<std::size_t>(id)];
      if (src[0] != si || src[1] != sj) degeneracies.push_back({si, sj, src[0]});
      return id;
    }
    id = store.insert(p, bnd);
    vertex_source.push_back({si, sj});
    return id;
  };
  for (int i = 0; i < nseg; ++i) {
    end_a[i] = add_point(segments[static_cast<std::size_t>(i)].a,
                         geom.on_boundary(segments[static_cast<std::size_t>(i)].a, tol), i, -1);
    end_b[i] = add_point(segments[static_cast<std::size_t>(i)].b,
                         geom.on_boundary(segments[static_cast<std::size_t>(i)].b, tol), i, -2);
  }

  // Pairwise intersections. The geometry is evaluated with the two segments
  // in a canonical endpoint order, so an input permutation reproduces
  // bit-identical vertex coordinates.
  auto lex_less = [](const Segment& s, const Segment& t) {
    if (s.a.x != t.a.x) return s.a.x < t.a.x;
    if (s.a.y != t.a.y) return s.a.y < t.a.y;
    if (s.b.x != t.b.x) return s.b.x < t.b.x;
    return s.b.y < t.b.y;
  };
  std::vector<std::vector<std::pair<double, int>>> splits(static_cast<std::size_t>(nseg));
  for (int i = 0; i < nseg; ++i) {
    for (int j = i + 1; j < nseg; ++j) {
      const bool swap_roles = lex_less(segments[static_cast<std::size_t>(j)], segments[static_cast<std::size_t>(i)]);
      const int fi = swap_roles ? j : i;
      const int fj = swap_roles ? i : j;
      const Vec2 ai = segments[static_cast<std::size_t>(fi)].a;
      const Vec2 u = sub(segments[static_cast<std::size_t>(fi)].b, ai);
      const Vec2 aj = segments[static_cast<std::size_t>(fj)].a;
      const Vec2 v = sub(segments[static_cast<std::size_t>(fj)].b, aj);
      const double denom = cross2(u, v);
      const double scale = std::hypot(u.x, u.y) * std::hypot(v.x, v.y);
      if (std::abs(denom) < 1e-14 * scale) continue;  // parallel within tolerance
      const Vec2 w = sub(aj, ai);
      const double t = cross2(w, v) / denom;
      const double s = cross2(w, u) / denom;
      if (t < -1e-12 || t > 1.0 + 1e-12 || s < -1e-12 || s > 1.0 + 1e-12) continue;
      const Vec2 p{ai.x + t * u.x, ai.y + t * u.y};
      const double end_clear =
          std::min(std::min(dist(p, segments[static_cast<std::size_t>(i)].a), dist(p, segments[static_cast<std::size_t>(i)].b)),
                   std::min(dist(p, segments[static_cast<std::size_t>(j)].a), dist(p, segments[static_cast<std::size_t>(j)].b)));
      if (end_clear <= tol) {
        // Meets at (or within tolerance of) an endpoint: not an interior
        // crossing; flag only if it is a genuine T-junction.
        if (t > tol && t < 1.0 - tol && s > tol && s < 1.0 - tol) degeneracies.push_back({i, j, -1});
        continue;
      }
      const int existing = store.find(p, tol);
      if (existing >= 0) {
        const auto& src = vertex_source[static_cast<std::size_t>(existing)];
        degeneracies.push_back({i, j, src[0]});
        continue;
      }
      const int id = store.insert(p, false);
      vertex_source.push_back({fi, fj});
      splits[static_cast<std::size_t>(fi)].push_back({t, id});
      splits[static_cast<std::size_t>(fj)].push_back({s, id});
    }
  }
  if (!degeneracies.empty())
    throw DegeneracyError("arrangement: near-degenerate intersections", std::move(degeneracies));

  // Window corners (square) or an anchor vertex (empty disk boundary).
  std::vector<int> corner_ids;
  if (!geom.is_disk) {
    const double n = geom.n;
    for (Vec2 c : {Vec2{n, -n}, Vec2{n, n}, Vec2{-n, n}, Vec2{-n, -n}}) {
      int id = store.find(c, tol);
      if (id < 0) {
        id = store.insert(c, true);
        vertex_source.push_back({-3, -3});
      }
      corner_ids.push_back(id);
    }
  }

  std::vector<EdgeGeom> edge_geom;
  auto add_straight_edge = [&](int u, int v, bool bnd) {
    const Vec2 pu = store.points[static_cast<std::size_t>(u)];
    const Vec2 pv = store.points[static_cast<std::size_t>(v)];
    arr.map.add_edge(u, std::atan2(pv.y - pu.y, pv.x - pu.x), v, std::atan2(pu.y - pv.y, pu.x - pv.x));
    arr.edge_on_boundary.push_back(bnd);
    edge_geom.push_back({false, 0.0});
  };

  // Interior edges from split segments.
  for (int i = 0; i < nseg; ++i) {
    auto& cuts = splits[static_cast<std::size_t>(i)];
    cuts.push_back({0.0, end_a[i]});
    cuts.push_back({1.0, end_b[i]});
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      if (cuts[c].second == cuts[c + 1].second) continue;
      add_straight_edge(cuts[c].second, cuts[c + 1].second, false);
    }
  }

  // Boundary edges between consecutive boundary vertices, CCW.
  std::vector<std::pair<double, int>> bverts;
  for (int id = 0; id < static_cast<int>(store.points.size()); ++id) {
    if (store.boundary[static_cast<std::size_t>(id)])
      bverts.push_back({geom.boundary_param(store.points[static_cast<std::size_t>(id)]), id});
  }
  if (geom.is_disk && bverts.empty()) {
    const int id = store.insert({geom.R, 0.0}, true);
    vertex_source.push_back({-3, -3});
    bverts.push_back({0.0, id});
  }
  std::sort(bverts.begin(), bverts.end());
  const std::size_t nb = bverts.size();
  for (std::size_t b = 0; b < nb; ++b) {
    const int u = bverts[b].second;
    const int v = bverts[(b + 1) % nb].second;
    if (geom.is_disk) {
      const double pu = bverts[b].first;
      const double pv = bverts[(b + 1) % nb].first;
      double delta = wrap_positive(pv - pu);
      if (nb == 1) delta = kTwoPi;  // single anchor vertex: full-circle loop
      arr.map.add_edge(u, pu + kPi / 2.0, v, pv - kPi / 2.0);
      arr.edge_on_boundary.push_back(true);
      edge_geom.push_back({true, delta});
    } else {
      if (u == v) continue;  // merged corner/endpoint
      add_straight_edge(u, v, true);
    }
  }

  arr.vertices = store.points;
  arr.on_boundary = store.boundary;
  arr.map.vertex_count = static_cast<int>(arr.vertices.size());
  arr.map.build_rotation();

  // Overlapping edges make the rotation ambiguous.
  for (int d = 0; d < arr.map.dart_count(); ++d) {
    const int nx = arr.map.sigma[static_cast<std::size_t>(d)];
    if (nx == d) continue;
    if (std::abs(wrap_positive(arr.map.angle[static_cast<std::size_t>(d)]) -
                 wrap_positive(arr.map.angle[static_cast<std::size_t>(nx)])) < 1e-12)
      throw DegeneracyError("arrangement: coincident dart angles (overlapping edges)");
  }

  // Faces with signed areas (shoelace plus circular-segment corrections).
  // Orbits are rotated to a canonical starting dart so the floating-point
  // summation order is independent of the input segment order.
  for (auto& orbit : arr.map.face_orbits()) {
    std::size_t best = 0;
    for (std::size_t d = 1; d < orbit.size(); ++d) {
      const Vec2 pb = arr.vertices[static_cast<std::size_t>(arr.map.vertex_of[static_cast<std::size_t>(orbit[best])])];
      const Vec2 pd = arr.vertices[static_cast<std::size_t>(arr.map.vertex_of[static_cast<std::size_t>(orbit[d])])];
      const double ab = wrap_positive(arr.map.angle[static_cast<std::size_t>(orbit[best])]);
      const double ad = wrap_positive(arr.map.angle[static_cast<std::size_t>(orbit[d])]);
      if (std::tie(pd.x, pd.y, ad) < std::tie(pb.x, pb.y, ab)) best = d;
    }
    std::rotate(orbit.begin(), orbit.begin() + static_cast<std::ptrdiff_t>(best), orbit.end());
    ArrangementFace face;
    face.darts = std::move(orbit);
    face.k = static_cast<int>(face.darts.size());
    double area = 0.0;
    bool touches = false;
    for (int d : face.darts) {
      const int u = arr.map.vertex_of[static_cast<std::size_t>(d)];
      const int v = arr.map.vertex_of[static_cast<std::size_t>(d ^ 1)];
      const Vec2 pu = arr.vertices[static_cast<std::size_t>(u)];
      const Vec2 pv = arr.vertices[static_cast<std::size_t>(v)];
      area += 0.5 * cross2(pu, pv);
      const EdgeGeom& eg = edge_geom[static_cast<std::size_t>(d / 2)];
      if (eg.is_arc) {
        const double seg = 0.5 * geom.R * geom.R * (eg.delta - std::sin(eg.delta));
        area += (d % 2 == 0) ? seg : -seg;
      }
      touches = touches || arr.on_boundary[static_cast<std::size_t>(u)];
    }
    face.area = area;
    face.outer = area < 0.0;
    face.touches_boundary = touches;
    arr.faces.push_back(std::move(face));
  }

  arr.components = arr.map.component_count();
  const int euler = arr.vertex_count() - arr.edge_count() + arr.face_count();
  if (euler != 2 * arr.components)
    throw std::logic_error("arrangement: orbit Euler identity violated");
  return arr;
}

namespace {

/// Perturb an endpoint by ~1e-8. Boundary endpoints slide along the window
/// boundary so chords stay chords; interior endpoints jitter freely.
void jitter_point(Vec2& p, const WindowGeom& geom, Rng& rng) {
  const double eps = rng.uniform(-1e-8, 1e-8);
  if (geom.is_disk) {
    if (std::abs(std::hypot(p.x, p.y) - geom.R) < 1e-9) {
      const double phi = std::atan2(p.y, p.x) + eps / geom.R;
      p = {geom.R * std::cos(phi), geom.R * std::sin(phi)};
      return;
    }
  } else if (std::max(std::abs(p.x), std::abs(p.y)) > geom.n - 1e-9) {
    if (std::abs(p.x) >= std::abs(p.y)) {
      p.x = p.x > 0.0 ? geom.n : -geom.n;
      p.y = std::clamp(p.y + eps, -geom.n, geom.n);
    } else {
      p.y = p.y > 0.0 ? geom.n : -geom.n;
      p.x = std::clamp(p.x + eps, -geom.n, geom.n);
    }
    return;
  }
  p.x += eps;
  p.y += rng.uniform(-1e-8, 1e-8);
}

}  // namespace

Arrangement build_arrangement_jittered(std::vector<Segment> segments, const plp::Window& window,
                                       std::uint64_t jitter_seed, double tol) {
  const WindowGeom geom = WindowGeom::from(window);
  for (int attempt = 0;; ++attempt) {
    try {
      return build_arrangement(segments, window, tol);
    } catch (const DegeneracyError&) {
      if (attempt >= 3) throw;
      Rng rng = Rng::for_replicate(jitter_seed, static_cast<std::uint64_t>(attempt));
      for (auto& s : segments) {
        jitter_point(s.a, geom, rng);
        jitter_point(s.b, geom, rng);
      }
    }
  }
}

std::map<int, double> weighted_k_fractions(const FaceCensus& census) {
  std::map<int, double> out;
  if (census.window_half <= 0.0) return out;
  const double side = 2.0 * census.window_half * census.scale;
  double total = 0.0;
  std::map<int, double> mass;
  for (const auto& f : census.faces) {
    if (f.boundary) continue;
    const double w = 1.0 / ((side - f.bbox_w) * (side - f.bbox_h));
    mass[f.k] += w;
    total += w;
  }
  if (total <= 0.0) return out;
  for (const auto& [k, m] : mass) out[k] = m / total;
  return out;
}

FaceCensus face_census(const Arrangement& arr, double scale) {
  FaceCensus census;
  census.scale = scale;
  census.window_area = arr.window_area * scale * scale;
  const WindowGeom geom = WindowGeom::from(arr.window);
  census.window_half = geom.is_disk ? 0.0 : geom.n;
  for (const auto& face : arr.faces) {
    if (face.outer) continue;
    FaceRecord rec;
    rec.k = face.k;
    rec.area = face.area * scale * scale;
    rec.boundary = face.touches_boundary;
    rec.side_lengths.reserve(face.darts.size());
    rec.angles.reserve(face.darts.size());
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int d : face.darts) {
      const int u = arr.map.vertex_of[static_cast<std::size_t>(d)];
      const int v = arr.map.vertex_of[static_cast<std::size_t>(d ^ 1)];
      const Vec2 pu = arr.vertices[static_cast<std::size_t>(u)];
      const Vec2 pv = arr.vertices[static_cast<std::size_t>(v)];
      const bool arc_edge = arr.edge_on_boundary[static_cast<std::size_t>(d / 2)] && geom.is_disk;
      rec.side_lengths.push_back(scale * (arc_edge ? geom.R * wrap_positive(std::atan2(pv.y, pv.x) - std::atan2(pu.y, pu.x))
                                                   : dist(pu, pv)));
      rec.angles.push_back(arr.map.corner_angle(d));
      xmin = std::min(xmin, pu.x);
      xmax = std::max(xmax, pu.x);
      ymin = std::min(ymin, pu.y);
      ymax = std::max(ymax, pu.y);
    }
    rec.bbox_w = scale * (xmax - xmin);
    rec.bbox_h = scale * (ymax - ymin);
    census.bounded_area_sum += rec.area;
    ++census.total_bounded;
    if (rec.boundary) {
      ++census.boundary_touching;
    } else {
      ++census.interior;
      ++census.k_counts[rec.k];
    }
    census.faces.push_back(std::move(rec));
  }
  // Canonical record order: the census of a segment family is independent of
  // the order the segments were handed in.
  std::sort(census.faces.begin(), census.faces.end(), [](const FaceRecord& a, const FaceRecord& b) {
    return std::tie(a.boundary, a.k, a.area, a.side_lengths) <
           std::tie(b.boundary, b.k, b.area, b.side_lengths);
  });
  return census;
}

std::string census_to_csv(const FaceCensus& census, long replicate) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::string out;
  for (const auto& [k, count] : census.k_counts) {
    out += std::to_string(replicate) + "," + std::to_string(k) + "," + std::to_string(count) + "\n";
  }
  long face_id = 0;
  for (const auto& f : census.faces) {
    const auto [min_it, max_it] = std::minmax_element(f.side_lengths.begin(), f.side_lengths.end());
    out += std::to_string(replicate) + "," + std::to_string(face_id++) + "," + std::to_string(f.k) +
           "," + num(f.area) + "," + num(*min_it) + "," + num(*max_it) + ",";
    for (std::size_t a = 0; a < f.angles.size(); ++a) {
      if (a) out += ";";
      out += num(f.angles[a]);
    }
    out += "\n";
  }
  return out;
}

SurfaceMap surface_map_from_events(const std::vector<PassEvent>& events, int vertex_count,
                                   double total_length, bool closed) {
  SurfaceMap out;
  if (events.empty()) return out;
  std::vector<PassEvent> evs = events;
  std::sort(evs.begin(), evs.end(), [](const PassEvent& a, const PassEvent& b) { return a.time < b.time; });
  for (std::size_t i = 0; i + 1 < evs.size(); ++i) {
    if (evs[i + 1].time - evs[i].time < 1e-12)
      throw std::invalid_argument("surface map: coincident pass times (multiple point)");
  }

  CombMap map;
  map.vertex_count = vertex_count;
  std::vector<double> edge_length;
  const std::size_t n = evs.size();
  const std::size_t edges = closed ? n : n - 1;
  for (std::size_t i = 0; i < edges; ++i) {
    const PassEvent& from = evs[i];
    const PassEvent& to = evs[(i + 1) % n];
    map.add_edge(from.vertex, from.direction, to.vertex, to.direction + kPi);
    const double len = (i + 1 < n) ? to.time - from.time : total_length - from.time + to.time;
    edge_length.push_back(len);
  }
  map.build_rotation();

  std::vector<int> degree(static_cast<std::size_t>(vertex_count), 0);
  for (int d = 0; d < map.dart_count(); ++d) ++degree[static_cast<std::size_t>(map.vertex_of[d])];

  out.v = vertex_count;
  out.e = static_cast<int>(edges);
  for (auto& orbit : map.face_orbits()) {
    SurfaceFace face;
    face.k = static_cast<int>(orbit.size());
    double angle_sum = 0.0;
    for (int d : orbit) {
      face.side_lengths.push_back(edge_length[static_cast<std::size_t>(d / 2)]);
      const double corner = map.corner_angle(d);
      face.angles.push_back(corner);
      angle_sum += corner;
      if (degree[static_cast<std::size_t>(map.vertex_of[d])] == 1) face.endpoint_face = true;
    }
    face.area = (face.k - 2) * kPi - angle_sum;
    out.faces.push_back(std::move(face));
  }
  out.f = static_cast<int>(out.faces.size());
  return out;
}

SurfaceMap surface_map_from_trace(const trace::GeodesicTrace& tr, const trace::IntersectionSet& inters) {
  if (tr.arcs.empty()) return {};
  if (inters.tangential_flags > 0)
    throw std::invalid_argument("surface map: tangential crossings present");

  const int n = static_cast<int>(inters.vertices.size());
  std::vector<PassEvent> events;
  events.reserve(2 * static_cast<std::size_t>(n) + 2);
  for (int i = 0; i < n; ++i) {
    const auto& v = inters.vertices[i];
    events.push_back({tr.arcs[static_cast<std::size_t>(v.arc_a)].t_start + v.s_a, i,
                      tr.arcs[static_cast<std::size_t>(v.arc_a)].arc.direction_at(v.s_a)});
    events.push_back({tr.arcs[static_cast<std::size_t>(v.arc_b)].t_start + v.s_b, i,
                      tr.arcs[static_cast<std::size_t>(v.arc_b)].arc.direction_at(v.s_b)});
  }
  // Trace endpoints become degree-1 vertices; the two faces containing them
  // are tagged by the builder.
  events.push_back({0.0, n, tr.arcs.front().arc.direction_at(0.0)});
  events.push_back({tr.total_length, n + 1, tr.arcs.back().arc.direction_at(tr.arcs.back().arc.length())});
  return surface_map_from_events(events, n + 2, tr.total_length, /*closed=*/false);
}

std::map<int, double> PolygonStats::k_fractions() const {
  std::map<int, double> out;
  if (faces == 0) return out;
  for (const auto& [k, c] : k_counts) out[k] = static_cast<double>(c) / static_cast<double>(faces);
  return out;
}

namespace {

template <typename FaceT>
void accumulate_stats(PolygonStats& stats, const FaceT& face, bool skip, double scale) {
  if (skip) return;
  ++stats.faces;
  ++stats.k_counts[face.k];
  for (double s : face.side_lengths) stats.side_lengths.push_back(s * scale);
  for (double a : face.angles) stats.angles.push_back(a);
}

}  // namespace

PolygonStats scaled_polygon_stats(const std::vector<FaceRecord>& faces, double scale) {
  PolygonStats stats;
  for (const auto& f : faces) accumulate_stats(stats, f, f.boundary, scale);
  return stats;
}

PolygonStats scaled_polygon_stats(const SurfaceMap& map, double scale) {
  PolygonStats stats;
  for (const auto& f : map.faces) accumulate_stats(stats, f, f.endpoint_face, scale);
  return stats;
}

}  // namespace tesslab::tess
