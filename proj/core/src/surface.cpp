#include "tesslab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace tesslab::surf {

using hyp::Complex;
using hyp::GeodesicArc;
using hyp::HPoint;
using hyp::Isometry;
using hyp::kPi;
using hyp::UnitTangent;

namespace {

constexpr int kSides = 8;

double vertex_angle(int k) { return (2.0 * k - 1.0) * kPi / 8.0; }
double side_direction(int k) { return k * kPi / 4.0; }  // center-to-midpoint angle of side k

/// Interior angle at a vertex of the regular octagon with hyperbolic
/// circumradius R, measured between the two incident sides.
double interior_angle(double R) {
  const double r = std::tanh(0.5 * R);
  const HPoint v0(r * std::cos(vertex_angle(0)), r * std::sin(vertex_angle(0)));
  const HPoint v1(r * std::cos(vertex_angle(1)), r * std::sin(vertex_angle(1)));
  const HPoint v2(r * std::cos(vertex_angle(2)), r * std::sin(vertex_angle(2)));
  const GeodesicArc s0(v0, v1), s1(v1, v2);
  const double d_in = s0.direction_at(s0.length());
  const double d_out = s1.direction_at(0.0);
  const double turn = hyp::wrap_signed(d_out - d_in);
  return kPi - turn;
}

double solve_circumradius() {
  double lo = 0.1, hi = 4.0;
  // interior_angle is decreasing in R: near 0 it approaches the Euclidean
  // 3 pi/4, for large R it tends to 0.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (interior_angle(mid) > kPi / 4.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14) break;
  }
  return 0.5 * (lo + hi);
}

/// First positive hit of the ray at polar angle phi with side k's carrier
/// circle (Euclidean radius of the boundary in direction phi).
double boundary_radius(const FundamentalOctagon& oct, int k, double phi) {
  const auto& c = oct.sides[k].carrier();
  const double m = hyp::dot(std::polar(1.0, phi), c.center);
  const double disc = m * m - 1.0;
  if (disc < 0.0) throw std::runtime_error("octagon boundary_radius: ray misses side carrier");
  return m - std::sqrt(disc);
}

double area_by_quadrature(const FundamentalOctagon& oct) {
  // A = int_0^{2pi} (2/(1 - r_b(phi)^2) - 2) dphi, integrated per sector
  // between consecutive vertices (the integrand is smooth inside a sector).
  static const double kNodes[] = {
      -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
      -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
      0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
      0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
  static const double kWeights[] = {
      0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
      0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
      0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
      0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
  double total = 0.0;
  for (int k = 0; k < kSides; ++k) {
    const double a = vertex_angle(k);
    const double b = vertex_angle(k + 1);
    // Split each sector for extra accuracy near the vertices.
    const int pieces = 8;
    for (int p = 0; p < pieces; ++p) {
      const double lo = a + (b - a) * p / pieces;
      const double hi = a + (b - a) * (p + 1) / pieces;
      const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (int i = 0; i < 16; ++i) {
        const double phi = mid + half * kNodes[i];
        const double rb = boundary_radius(oct, k, phi);
        total += kWeights[i] * half * (2.0 / (1.0 - rb * rb) - 2.0);
      }
    }
  }
  return total;
}

/// Walk the single vertex class: unglue corners one by one around the glued
/// vertex and accumulate the pairing maps. The ordered product over the full
/// cycle is the group relator; for a genuine genus-2 gluing it is the
/// identity and the cycle visits all 8 corners.
void check_relator(const FundamentalOctagon& oct) {
  Isometry total = Isometry::identity();
  int corner = 0;       // corner at vertex `corner`, between sides corner-1 and corner
  int side = 0;         // side to unglue next
  std::vector<bool> seen(kSides, false);
  for (int step = 0; step < kSides; ++step) {
    if (seen[corner]) throw std::runtime_error("octagon relator: vertex cycle revisits a corner early");
    seen[corner] = true;
    const Isometry& g = oct.pairings[side];
    total = g * total;
    // Locate the image corner: g maps the chosen corner vertex onto some
    // octagon vertex; continue with the other side at that corner.
    const HPoint image = g(oct.vertices[corner]);
    int best = -1;
    double best_d = 1e9;
    for (int j = 0; j < kSides; ++j) {
      const double d = std::abs(image.z() - oct.vertices[j].z());
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best_d > 1e-8) throw std::runtime_error("octagon relator: pairing does not permute vertices");
    const int partner = (side + 4) % kSides;
    // Sides incident to vertex j are j-1 and j; pick the one that is not the
    // partner side we just arrived on.
    const int s1 = (best + kSides - 1) % kSides;
    const int s2 = best;
    corner = best;
    side = (s1 == partner) ? s2 : s1;
  }
  if (!total.near_identity(1e-8)) throw std::runtime_error("octagon relator: product is not the identity");
}

FundamentalOctagon build_octagon() {
  const double R = solve_circumradius();
  const double r = std::tanh(0.5 * R);
  std::array<HPoint, 8> verts;
  for (int k = 0; k < kSides; ++k)
    verts[k] = HPoint(r * std::cos(vertex_angle(k)), r * std::sin(vertex_angle(k)));
  auto side = [&](int k) { return GeodesicArc(verts[k], verts[(k + 1) % kSides]); };
  FundamentalOctagon oct{
      .vertices = verts,
      .sides = {side(0), side(1), side(2), side(3), side(4), side(5), side(6), side(7)},
      .pairings = {},
  };
  oct.circumradius = R;
  if (std::abs(interior_angle(R) - kPi / 4.0) > 1e-8)
    throw std::runtime_error("octagon: interior angle violates pi/4 within 1e-8");
  // Apothem from side 0's carrier: nearest boundary point on the midpoint ray.
  const auto& c0 = oct.sides[0].carrier();
  oct.apothem = 2.0 * std::atanh(std::abs(c0.center) - c0.radius);
  // pairing[k] translates by twice the apothem toward the opposite side, so
  // it carries side k onto side k+4 and the octagon onto the copy across
  // side k+4.
  for (int k = 0; k < kSides; ++k) {
    oct.pairings[k] = Isometry::translation(2.0 * oct.apothem, side_direction((k + 4) % kSides));
  }
  for (int k = 0; k < kSides; ++k) {
    const HPoint a = oct.pairings[k](oct.vertices[k]);
    const HPoint b = oct.pairings[k](oct.vertices[(k + 1) % kSides]);
    const HPoint pa = oct.vertices[(k + 5) % kSides];
    const HPoint pb = oct.vertices[(k + 4) % kSides];
    if (std::abs(a.z() - pa.z()) > 1e-9 || std::abs(b.z() - pb.z()) > 1e-9)
      throw std::runtime_error("octagon: pairing does not map side endpoints onto partner side");
  }
  check_relator(oct);
  oct.area_quadrature = area_by_quadrature(oct);
  if (std::abs(oct.area_quadrature - 4.0 * kPi) > 1e-6)
    throw std::runtime_error("octagon: quadrature area violates Gauss-Bonnet within 1e-6");
  return oct;
}

}  // namespace

Surface::Surface(FundamentalOctagon oct) : oct_(std::move(oct)) {
  area_ = 2.0 * kPi * (2.0 * oct_.genus - 2.0);
  kappa_ = 1.0 / area_;
  // Shortest translation over nonempty words of length <= 3 in the pairings.
  double shortest = 1e100;
  std::vector<Isometry> layer = {Isometry::identity()};
  for (int len = 1; len <= 3; ++len) {
    std::vector<Isometry> next;
    next.reserve(layer.size() * kSides);
    for (const auto& g : layer) {
      for (int k = 0; k < kSides; ++k) {
        Isometry h = oct_.pairings[k] * g;
        if (!h.near_identity(1e-9)) {
          const double len_h = h.translation_length();
          if (len_h > 1e-9) shortest = std::min(shortest, len_h);
        }
        next.push_back(h);
      }
    }
    layer.swap(next);
  }
  injectivity_radius_ = 0.5 * shortest;
}

double Surface::clearance(const hyp::HPoint& p) const {
  double best = 1e100;
  for (const auto& side : oct_.sides) {
    const auto& c = side.carrier();
    best = std::min(best, std::abs(p.z() - c.center) - c.radius);
  }
  return best;
}

std::pair<HPoint, Isometry> Surface::reduce_to_domain(const hyp::HPoint& p) const {
  HPoint q = p;
  Isometry g = Isometry::identity();
  for (int iter = 0; iter < 64; ++iter) {
    int worst = -1;
    double worst_clear = 0.0;
    for (int k = 0; k < kSides; ++k) {
      const auto& c = oct_.sides[k].carrier();
      const double cl = std::abs(q.z() - c.center) - c.radius;
      if (cl < worst_clear) {
        worst_clear = cl;
        worst = k;
      }
    }
    if (worst < 0 || worst_clear >= -1e-12) {
      // Deterministic boundary ownership: representatives on sides 4..7 are
      // mapped across to the partner side (each side owns one copy).
      for (int k = 4; k < kSides; ++k) {
        const auto& c = oct_.sides[k].carrier();
        if (std::abs(std::abs(q.z() - c.center) - c.radius) < 1e-12) {
          q = oct_.pairings[k](q);
          g = oct_.pairings[k] * g;
          break;
        }
      }
      return {q, g};
    }
    q = oct_.pairings[worst](q);
    g = oct_.pairings[worst] * g;
  }
  throw std::runtime_error("reduce_to_domain: point did not reduce (outside searched layers)");
}

UnitTangent Surface::sample_liouville(Rng& rng) const {
  const double r_max = std::tanh(0.5 * oct_.circumradius);
  const double dens_floor = (1.0 - r_max * r_max);
  for (;;) {
    const double rad = r_max * std::sqrt(rng.uniform());
    const double ang = rng.angle();
    const double x = rad * std::cos(ang), y = rad * std::sin(ang);
    const double w = dens_floor / (1.0 - (x * x + y * y));
    if (rng.uniform() >= w * w) continue;  // hyperbolic area density weight
    const HPoint p(x, y);
    if (clearance(p) <= 1e-12) continue;  // strictly interior base points
    return UnitTangent(p, rng.angle());
  }
}

std::string Surface::to_json() const {
  nlohmann::ordered_json j;
  j["genus"] = oct_.genus;
  j["area"] = area_;
  j["area_quadrature"] = oct_.area_quadrature;
  j["kappa"] = kappa_;
  j["injectivity_radius"] = injectivity_radius_;
  j["circumradius"] = oct_.circumradius;
  j["apothem"] = oct_.apothem;
  auto verts = nlohmann::ordered_json::array();
  for (const auto& v : oct_.vertices) verts.push_back({v.x(), v.y()});
  j["vertices"] = verts;
  auto pair = nlohmann::ordered_json::array();
  for (const auto& g : oct_.pairings)
    pair.push_back({g.a().real(), g.a().imag(), g.b().real(), g.b().imag()});
  j["pairings"] = pair;
  return j.dump(2);
}

Surface build_genus2_surface() { return Surface(build_octagon()); }

}  // namespace tesslab::surf
