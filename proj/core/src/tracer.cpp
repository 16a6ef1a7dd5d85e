#include "tesslab/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

namespace tesslab::trace {

using hyp::Carrier;
using hyp::Complex;
using hyp::GeodesicArc;
using hyp::HPoint;
using hyp::Isometry;
using hyp::kPi;
using hyp::UnitTangent;

namespace {

constexpr double kForwardTol = 1e-12;  // exits closer than this are the entry point itself
constexpr double kVertexTol = 1e-12;   // exit this close to a vertex is a degeneracy

struct Exit {
  double t = std::numeric_limits<double>::infinity();
  int side = -1;
  Complex point;        // fundamental-domain coordinates
  Complex chart_point;  // in the chart at the base point
};

/// Earliest forward crossing of the octagon boundary by the geodesic through
/// v. Works in the chart at the base point, where the geodesic is the exact
/// diameter at the base direction; each side enters through its ideal
/// endpoint angles, so no large carrier centers ever appear.
Exit find_exit(const surf::FundamentalOctagon& oct, const UnitTangent& v) {
  const Isometry to_origin = Isometry::point_to_origin(v.base);
  const Isometry back = to_origin.inverse();

  Exit best;
  for (int k = 0; k < 8; ++k) {
    const GeodesicArc& side = oct.sides[k];
    const double xi1 = std::arg(to_origin.apply(std::polar(1.0, side.xi_minus())));
    const double xi2 = std::arg(to_origin.apply(std::polar(1.0, side.xi_plus())));
    const double t = hyp::chart_ray_geodesic_t(v.direction, xi1, xi2);
    if (t <= 0.0) continue;  // behind the base point, or missing the side
    const double t_hyp = 2.0 * std::atanh(t);
    if (t_hyp <= kForwardTol) continue;
    const Complex chart_pt = std::polar(t, v.direction);
    const Complex w = back.apply(chart_pt);
    const double s_side = side.param_of(w);
    if (s_side < -kVertexTol || s_side > side.length() + kVertexTol) continue;
    if (std::min(std::abs(s_side), std::abs(side.length() - s_side)) < kVertexTol)
      throw TraceDegeneracy("trace: exit within vertex tolerance of an octagon corner");
    if (t_hyp < best.t) {
      best.t = t_hyp;
      best.side = k;
      best.point = w;
      best.chart_point = chart_pt;
    }
  }
  return best;
}

}  // namespace

GeodesicTrace trace_geodesic(const surf::Surface& surface, const UnitTangent& start, double T) {
  if (T < 0.0) throw std::invalid_argument("trace_geodesic: negative length");
  if (!surface.contains(start.base, 0.0))
    throw std::invalid_argument("trace_geodesic: start point outside the octagon");

  GeodesicTrace out;
  out.start = start;
  out.total_length = T;
  if (T == 0.0) return out;

  const auto& oct = surface.octagon();
  UnitTangent v = start;
  double remaining = T;
  double t_global = 0.0;
  out.arcs.reserve(static_cast<std::size_t>(T / 1.5) + 4);

  for (;;) {
    const Exit exit = find_exit(oct, v);
    if (exit.side < 0) throw TraceDegeneracy("trace: geodesic found no boundary exit");
    if (exit.t >= remaining) {
      if (remaining > kForwardTol) {
        const HPoint end = hyp::flow(v, remaining).base;
        out.arcs.push_back({GeodesicArc(v.base, end), -1, t_global});
      }
      break;
    }
    const HPoint end = HPoint::from(exit.point);
    out.arcs.push_back({GeodesicArc(v.base, end), exit.side, t_global});
    // In the chart the ray is straight, so the tangent there still points in
    // the base direction; map it back and across the side pairing.
    const Isometry back = Isometry::point_to_origin(v.base).inverse();
    const UnitTangent at_exit = back(UnitTangent(HPoint::from(exit.chart_point), v.direction));
    v = oct.pairings[exit.side](at_exit);
    t_global += exit.t;
    remaining -= exit.t;
  }
  return out;
}

namespace {

void append_crossing(IntersectionSet& set, int i, int j, const hyp::ArcCrossing& hit) {
  set.vertices.push_back({hit.point, hit.angle, i, j, hit.s_a, hit.s_b, hit.near_tangential});
  if (hit.near_tangential) ++set.tangential_flags;
}

}  // namespace

IntersectionSet self_intersections_bruteforce(const GeodesicTrace& trace) {
  IntersectionSet set;
  const int n = static_cast<int>(trace.arcs.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (auto hit = hyp::arc_intersection(trace.arcs[i].arc, trace.arcs[j].arc)) {
        append_crossing(set, i, j, *hit);
      }
    }
  }
  return set;
}

IntersectionSet self_intersections(const GeodesicTrace& trace) {
  const int n = static_cast<int>(trace.arcs.size());
  if (n < 2) return {};

  std::vector<double> bx0(n), by0(n), bx1(n), by1(n);
  double max_extent = 0.0;
  for (int i = 0; i < n; ++i) {
    trace.arcs[i].arc.bbox(bx0[i], by0[i], bx1[i], by1[i]);
    max_extent = std::max({max_extent, bx1[i] - bx0[i], by1[i] - by0[i]});
  }
  const double cell = std::max(0.25 * max_extent, 0.02);
  const int dim = static_cast<int>(std::ceil(2.0 / cell)) + 1;
  auto cell_of = [&](double x) {
    return std::clamp(static_cast<int>((x + 1.0) / cell), 0, dim - 1);
  };

  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(dim) * dim);
  for (int i = 0; i < n; ++i) {
    for (int cx = cell_of(bx0[i]); cx <= cell_of(bx1[i]); ++cx)
      for (int cy = cell_of(by0[i]); cy <= cell_of(by1[i]); ++cy)
        buckets[static_cast<std::size_t>(cx) * dim + cy].push_back(i);
  }

  std::vector<std::uint64_t> pairs;
  for (const auto& bucket : buckets) {
    for (std::size_t a = 0; a < bucket.size(); ++a) {
      for (std::size_t b = a + 1; b < bucket.size(); ++b) {
        const int i = std::min(bucket[a], bucket[b]);
        const int j = std::max(bucket[a], bucket[b]);
        if (bx0[i] > bx1[j] || bx0[j] > bx1[i] || by0[i] > by1[j] || by0[j] > by1[i]) continue;
        pairs.push_back((static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j));
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  IntersectionSet set;
  for (const std::uint64_t key : pairs) {
    const int i = static_cast<int>(key >> 32);
    const int j = static_cast<int>(key & 0xFFFFFFFFu);
    if (auto hit = hyp::arc_intersection(trace.arcs[i].arc, trace.arcs[j].arc)) {
      append_crossing(set, i, j, *hit);
    }
  }
  return set;
}

double min_vertex_separation(const IntersectionSet& set) {
  return separation_stats(set, 0.0).min_separation;
}

SeparationStats separation_stats(const IntersectionSet& set, double eps) {
  const std::size_t n = set.vertices.size();
  SeparationStats stats{std::numeric_limits<double>::infinity(), 0};
  if (n < 2) return stats;
  // Grid at the reporting scale keeps this O(n) for realistic inputs; the
  // near pairs of interest are vastly sparser than the cell population.
  const double cell = 0.01;
  std::map<std::pair<int, int>, std::vector<int>> grid;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = set.vertices[i].point;
    grid[{static_cast<int>(std::floor(p.x() / cell)), static_cast<int>(std::floor(p.y() / cell))}]
        .push_back(static_cast<int>(i));
  }
  for (const auto& [key, ids] : grid) {
    for (int dx = 0; dx <= 1; ++dx) {
      for (int dy = (dx == 0 ? 0 : -1); dy <= 1; ++dy) {
        const auto it = grid.find({key.first + dx, key.second + dy});
        if (it == grid.end()) continue;
        const bool same = (dx == 0 && dy == 0);
        for (std::size_t a = 0; a < ids.size(); ++a) {
          const std::size_t b0 = same ? a + 1 : 0;
          for (std::size_t b = b0; b < it->second.size(); ++b) {
            const double d = std::abs(set.vertices[static_cast<std::size_t>(ids[a])].point.z() -
                                      set.vertices[static_cast<std::size_t>(it->second[b])].point.z());
            stats.min_separation = std::min(stats.min_separation, d);
            if (d < eps) ++stats.pairs_below;
          }
        }
      }
    }
  }
  if (!std::isfinite(stats.min_separation)) {
    // Sparse set with no co-resident cells: fall back to the direct scan.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        stats.min_separation = std::min(
            stats.min_separation, std::abs(set.vertices[i].point.z() - set.vertices[j].point.z()));
  }
  return stats;
}

std::vector<double> crossing_times(const GeodesicTrace& trace, const IntersectionSet& set) {
  std::vector<double> times;
  times.reserve(2 * set.vertices.size());
  for (const auto& v : set.vertices) {
    times.push_back(trace.arcs[v.arc_a].t_start + v.s_a);
    times.push_back(trace.arcs[v.arc_b].t_start + v.s_b);
  }
  std::sort(times.begin(), times.end());
  return times;
}

namespace {

struct DiskImage {
  Complex center_e;   // Euclidean circle of the (translated) hyperbolic disk
  double radius_e;
  Isometry backmap;   // maps points near this image back into the x-chart
};

struct DiskChart {
  Isometry to_center;  // x -> 0
  double rho;          // hyperbolic disk radius
  std::vector<DiskImage> images;
};

/// Euclidean circle of the hyperbolic disk D(c, rho) via its two diametral
/// points on the axis through the origin and c.
void euclid_circle(const HPoint& c, double rho, Complex& center_e, double& radius_e) {
  const double t = std::tanh(0.5 * rho);
  const double phi = (std::abs(c.z()) < 1e-15) ? 0.0 : std::arg(c.z());
  const Isometry back = Isometry::point_to_origin(c).inverse();
  const Complex z1 = back.apply(std::polar(t, phi));
  const Complex z2 = back.apply(std::polar(t, phi + kPi));
  center_e = 0.5 * (z1 + z2);
  radius_e = 0.5 * std::abs(z1 - z2);
}

/// Hyperbolic distance from p to the full geodesic carrying `side`.
double distance_to_carrier(const HPoint& p, const GeodesicArc& side) {
  const Isometry g = Isometry::point_to_origin(p);
  const double t1 = std::arg(g.apply(std::polar(1.0, side.xi_minus())));
  const double t2 = std::arg(g.apply(std::polar(1.0, side.xi_plus())));
  const double half = 0.5 * std::abs(hyp::wrap_signed(t1 - t2));
  const double e = (1.0 - std::sin(half)) / std::cos(half);
  return 2.0 * std::atanh(std::max(e, 0.0));
}

DiskChart build_chart(const surf::Surface& surface, const HPoint& x, double rho) {
  DiskChart chart;
  chart.to_center = Isometry::point_to_origin(x);
  chart.rho = rho;
  DiskImage main;
  euclid_circle(x, rho, main.center_e, main.radius_e);
  main.backmap = Isometry::identity();
  chart.images.push_back(main);
  const auto& oct = surface.octagon();
  for (int k = 0; k < 8; ++k) {
    if (distance_to_carrier(x, oct.sides[k]) < rho * 1.0000001 + 1e-12) {
      DiskImage img;
      const HPoint xc = oct.pairings[k](x);
      euclid_circle(xc, rho, img.center_e, img.radius_e);
      img.backmap = oct.pairings[k].inverse();
      chart.images.push_back(img);
    }
  }
  return chart;
}

/// Arc-length parameters where the arc's carrier meets a Euclidean circle,
/// sorted ascending; returns the number of real intersections. The carrier
/// may be a near-diameter with an enormous center: the computation goes
/// through the radical line and circle powers, which stay O(1).
int circle_params(const GeodesicArc& arc, Complex center_e, double radius_e, double s_out[2]) {
  const Carrier& c = arc.carrier();
  const double k2 = std::norm(center_e) - radius_e * radius_e;  // power of the origin
  Complex pts[2];
  int n = 0;
  if (c.is_line) {
    // t^2 - 2 t dot(dir, c_e) + k2 = 0 along the diameter.
    const double b = hyp::dot(c.dir, center_e);
    const double disc = b * b - k2;
    if (disc < 0.0) return 0;
    const double root = std::sqrt(disc);
    const double q = b + (b >= 0.0 ? root : -root);
    if (q == 0.0) {
      pts[0] = c.dir * root;
      pts[1] = -pts[0];
    } else {
      pts[0] = c.dir * q;
      pts[1] = c.dir * (k2 / q);
    }
    n = 2;
  } else {
    // Radical line of the carrier (origin power exactly 1) and the disk
    // circle, parametrized as p0 + s u with u perpendicular to the center
    // difference; u . (p0 - c_carrier) reduces to -u . center_e.
    const Complex delta = center_e - c.center;
    const double d2 = std::norm(delta);
    if (d2 < 1e-30) return 0;
    const Complex p0 = delta * ((k2 - 1.0) / (2.0 * d2));
    const Complex u = Complex(0.0, 1.0) * delta / std::sqrt(d2);
    const double b = -hyp::dot(u, center_e);
    // Power of p0 with respect to the carrier, expanded through the origin
    // power to avoid forming |p0 - center|^2.
    const double p0_dot_c = ((k2 - 1.0) / (2.0 * d2)) * hyp::dot(delta, c.center);
    const double cq = std::norm(p0) - 2.0 * p0_dot_c + 1.0;
    const double disc = b * b - cq;
    if (disc < 0.0) return 0;
    const double root = std::sqrt(disc);
    const double q = -(b + (b >= 0.0 ? root : -root));
    double s1, s2;
    if (q == 0.0) {
      s1 = root;
      s2 = -root;
    } else {
      s1 = q;
      s2 = cq / q;
    }
    pts[0] = p0 + s1 * u;
    pts[1] = p0 + s2 * u;
    n = 2;
  }
  int kept = 0;
  for (int i = 0; i < n; ++i) {
    if (std::norm(pts[i]) >= 1.0) continue;
    s_out[kept++] = arc.param_of(pts[i]);
  }
  if (kept == 2 && s_out[0] > s_out[1]) std::swap(s_out[0], s_out[1]);
  return kept;
}

struct ArcInterval {
  double s1, s2;  // carrier params of disk entry/exit (may extend past the arc)
  int image;
};

std::vector<ArcInterval> intervals_for_arc(const GeodesicArc& arc, const DiskChart& chart) {
  std::vector<ArcInterval> out;
  for (std::size_t j = 0; j < chart.images.size(); ++j) {
    double s[2];
    if (circle_params(arc, chart.images[j].center_e, chart.images[j].radius_e, s) == 2) {
      if (s[1] > 0.0 && s[0] < arc.length()) {
        out.push_back({s[0], s[1], static_cast<int>(j)});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ArcInterval& a, const ArcInterval& b) { return a.s1 < b.s1; });
  return out;
}

}  // namespace

DiskCrossingRecord disk_crossings(const surf::Surface& surface, const GeodesicTrace& trace,
                                  const HPoint& x, double alpha) {
  DiskCrossingRecord rec;
  rec.center = x;
  rec.alpha = alpha;
  if (trace.arcs.empty() || trace.total_length <= 0.0) return rec;
  rec.radius = alpha / trace.total_length;
  const DiskChart chart = build_chart(surface, x, rec.radius);

  auto angle_of = [&](const GeodesicArc& arc, double s, int image) {
    const Complex w = arc.point_at(std::clamp(s, 0.0, arc.length())).z();
    const Complex back = chart.images[image].backmap.apply(w);
    return hyp::wrap_angle(std::arg(chart.to_center.apply(back)));
  };

  constexpr double kEdgeTol = 1e-11;
  bool open = false, open_incomplete = false;
  double open_angle = 0.0, open_time = 0.0;

  for (std::size_t ai = 0; ai < trace.arcs.size(); ++ai) {
    const GeodesicArc& arc = trace.arcs[ai].arc;
    const double L = arc.length();
    for (const ArcInterval& iv : intervals_for_arc(arc, chart)) {
      const bool begins_inside = iv.s1 <= kEdgeTol;
      const bool ends_inside = iv.s2 >= L - kEdgeTol;
      if (!begins_inside) {
        // Fresh entry within this arc.
        if (open || open_incomplete) throw std::logic_error("disk_crossings: overlapping crossings");
        open = true;
        open_angle = angle_of(arc, iv.s1, iv.image);
        open_time = trace.arcs[ai].t_start + iv.s1;
        if (!ends_inside) {
          rec.chords.push_back({open_angle, angle_of(arc, iv.s2, iv.image), open_time,
                                trace.arcs[ai].t_start + iv.s2});
          open = false;
        }
      } else {
        // Continuation across a side, or the trace begins inside the disk.
        if (!open && !open_incomplete) {
          if (ai == 0) {
            open_incomplete = true;  // trace start sits inside the disk
          } else {
            open = true;  // side-touching entry at the arc's very start
            open_angle = angle_of(arc, std::max(iv.s1, 0.0), iv.image);
            open_time = trace.arcs[ai].t_start + std::max(iv.s1, 0.0);
          }
        }
        if (!ends_inside) {
          if (open_incomplete) {
            ++rec.incomplete_crossings;
            open_incomplete = false;
          } else {
            rec.chords.push_back({open_angle, angle_of(arc, iv.s2, iv.image), open_time,
                                  trace.arcs[ai].t_start + iv.s2});
            open = false;
          }
        }
      }
    }
  }
  if (open || open_incomplete) ++rec.incomplete_crossings;  // trace ends inside the disk
  return rec;
}

EntryDiagnostics entry_time_diagnostics(const surf::Surface& surface, const GeodesicTrace& trace,
                                        const HPoint& x, const HPoint& x2, double alpha) {
  EntryDiagnostics diag;
  if (trace.arcs.empty()) return diag;
  const double rho = alpha / trace.total_length;
  if (hyp::hyp_distance(x, x2) <= 4.0 * rho)
    throw std::invalid_argument("entry_time_diagnostics: disk centers closer than 4 alpha / T");

  const DiskCrossingRecord rec = disk_crossings(surface, trace, x, alpha);
  if (!rec.chords.empty()) {
    diag.first_entry = rec.chords.front().t_entry;
    for (std::size_t i = 1; i < rec.chords.size(); ++i)
      diag.return_gaps.push_back(rec.chords[i].t_entry - rec.chords[i - 1].t_exit);
  }

  const DiskChart c1 = build_chart(surface, x, rho);
  const DiskChart c2 = build_chart(surface, x2, rho);
  for (const auto& ta : trace.arcs) {
    const auto iv1 = intervals_for_arc(ta.arc, c1);
    if (iv1.empty()) continue;
    const auto iv2 = intervals_for_arc(ta.arc, c2);
    if (!iv2.empty()) ++diag.double_hits;
  }
  return diag;
}

std::string trace_to_json(const GeodesicTrace& trace, const IntersectionSet& inters) {
  nlohmann::ordered_json j;
  j["seed"] = trace.seed;
  j["T"] = trace.total_length;
  auto arcs = nlohmann::ordered_json::array();
  for (const auto& ta : trace.arcs) {
    arcs.push_back({{"start", {ta.arc.start().x(), ta.arc.start().y()}},
                    {"end", {ta.arc.end().x(), ta.arc.end().y()}},
                    {"length", ta.arc.length()}});
  }
  j["arcs"] = arcs;
  auto verts = nlohmann::ordered_json::array();
  for (const auto& v : inters.vertices) {
    verts.push_back({{"point", {v.point.x(), v.point.y()}},
                     {"angle", v.angle},
                     {"arcs", {v.arc_a, v.arc_b}}});
  }
  j["vertices"] = verts;
  return j.dump(2);
}

}  // namespace tesslab::trace
