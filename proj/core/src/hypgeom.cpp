#include "tesslab/hypgeom.hpp"

#include <algorithm>
#include <cmath>

namespace tesslab::hyp {

double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_signed(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r > kPi) r -= kTwoPi;
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double hyp_distance(const HPoint& p, const HPoint& q) {
  const Complex num = p.z() - q.z();
  const Complex den = Complex(1.0, 0.0) - std::conj(p.z()) * q.z();
  const double ratio = std::abs(num) / std::abs(den);
  return 2.0 * std::atanh(ratio);
}

UnitTangent::UnitTangent(HPoint b, double dir) : base(b), direction(wrap_angle(dir)) {}

Isometry::Isometry(Complex a, Complex b) : a_(a), b_(b) {
  const double d = det();
  if (!(d > kAlgebraTol)) throw std::domain_error("Isometry: degenerate coefficients");
  const double s = std::sqrt(d);
  a_ /= s;
  b_ /= s;
}

Isometry Isometry::rotation(double phi) {
  return Isometry(std::polar(1.0, 0.5 * phi), Complex(0.0, 0.0));
}

Isometry Isometry::translation(double dist, double direction) {
  const double h = 0.5 * dist;
  return Isometry(Complex(std::cosh(h), 0.0), std::polar(std::sinh(h), direction));
}

Isometry Isometry::point_to_origin(const HPoint& p) {
  // z -> (z - p) / (1 - conj(p) z); derivative at p is 1/(1-|p|^2) > 0.
  return Isometry(Complex(1.0, 0.0), -p.z());
}

Isometry Isometry::operator*(const Isometry& rhs) const {
  // SU(1,1) matrix product; the constructor renormalizes the determinant.
  return Isometry(a_ * rhs.a_ + b_ * std::conj(rhs.b_), a_ * rhs.b_ + b_ * std::conj(rhs.a_));
}

Complex Isometry::apply(Complex z) const {
  return (a_ * z + b_) / (std::conj(b_) * z + std::conj(a_));
}

UnitTangent Isometry::operator()(const UnitTangent& v) const {
  // arg g'(z) = -2 arg(conj(b) z + conj(a)) when det = 1.
  const Complex den = std::conj(b_) * v.base.z() + std::conj(a_);
  return UnitTangent((*this)(v.base), v.direction - 2.0 * std::arg(den));
}

double Isometry::translation_length() const {
  const double half_tr = std::abs(a_.real());  // tr = a + conj(a)
  if (half_tr <= 1.0) return 0.0;
  return 2.0 * std::acosh(half_tr);
}

double Isometry::identity_defect() const {
  const double plus = std::max(std::abs(a_ - Complex(1.0, 0.0)), std::abs(b_));
  const double minus = std::max(std::abs(a_ + Complex(1.0, 0.0)), std::abs(b_));
  return std::min(plus, minus);
}

bool Isometry::near_identity(double tol) const { return identity_defect() < tol; }

std::pair<double, double> geodesic_ideal_endpoints(const UnitTangent& v) {
  // Push the unit boundary directions +-e^{i theta} through the inverse of
  // the origin map; that map has positive real derivative at the base, so
  // the direction angle is preserved.
  const Complex p = v.base.z();
  const Complex u = std::polar(1.0, v.direction);
  const Complex plus = (u + p) / (Complex(1.0, 0.0) + std::conj(p) * u);
  const Complex minus = (-u + p) / (Complex(1.0, 0.0) - std::conj(p) * u);
  return {wrap_angle(std::arg(minus)), wrap_angle(std::arg(plus))};
}

Carrier carrier_from_ideals(double xi_minus, double xi_plus) {
  Carrier c;
  const Complex u1 = std::polar(1.0, xi_minus);
  const Complex u2 = std::polar(1.0, xi_plus);
  const double d = cross(u1, u2);
  if (std::abs(d) < 1e-13) {
    // Antipodal ideal points: a diameter, directed toward xi_plus.
    c.is_line = true;
    c.dir = u2;
    return c;
  }
  // Solve Re(conj(center) u) = 1 for both ideal points; the solution circle
  // is orthogonal to the unit circle.
  c.is_line = false;
  c.center = Complex((u2.imag() - u1.imag()) / d, (u1.real() - u2.real()) / d);
  c.radius = std::sqrt(std::norm(c.center) - 1.0);
  // Orientation from xi_minus toward xi_plus around the center.
  c.orient = (cross(u1 - c.center, u2 - c.center) > 0.0) ? +1.0 : -1.0;
  return c;
}

UnitTangent flow(const UnitTangent& v, double t) {
  if (t == 0.0) return v;
  const Isometry to_origin = Isometry::point_to_origin(v.base);
  const Isometry back = to_origin.inverse();
  const Complex w = std::polar(std::tanh(0.5 * t), v.direction);
  return back(UnitTangent(HPoint::from(w), v.direction));
}

namespace {

Carrier carrier_through(Complex p, Complex q) {
  Carrier c;
  const double d = cross(p, q);
  // Collinear with the origin (or passing through it): a diameter. The
  // threshold trades a sub-tolerance sagitta error for avoiding a nearly
  // singular 2x2 solve.
  const double scale = std::abs(p - q);
  if (std::abs(d) < 1e-13 * std::max(scale, 1e-30)) {
    c.is_line = true;
    c.dir = (q - p) / scale;
    return c;
  }
  // 2 Re(conj(center) p) = 1 + |p|^2 and the same for q.
  const double rp = 0.5 * (1.0 + std::norm(p));
  const double rq = 0.5 * (1.0 + std::norm(q));
  c.is_line = false;
  c.center = Complex((rp * q.imag() - rq * p.imag()) / d, (rq * p.real() - rp * q.real()) / d);
  c.radius = std::sqrt(std::max(std::norm(c.center) - 1.0, 0.0));
  c.orient = (cross(p - c.center, q - c.center) > 0.0) ? +1.0 : -1.0;
  return c;
}

}  // namespace

GeodesicArc::GeodesicArc(HPoint start, HPoint end) : start_(start), end_(end) {
  const Complex p = start.z(), q = end.z();
  if (std::abs(p - q) < 1e-15) throw std::invalid_argument("GeodesicArc: coincident endpoints");
  carrier_ = carrier_through(p, q);
  length_ = hyp_distance(start, end);
  if (carrier_.is_line) {
    xi_plus_ = wrap_angle(std::arg(carrier_.dir));
    xi_minus_ = wrap_angle(xi_plus_ + kPi);
  } else {
    const double phi0 = std::arg(carrier_.center);
    const double dphi = std::acos(std::min(1.0, 1.0 / std::abs(carrier_.center)));
    const Complex u1 = std::polar(1.0, phi0 + dphi);
    // The ideal point lying beyond the end (along the carrier orientation)
    // is xi_plus. The in-disk portion subtends < pi at the carrier center,
    // so signed relative angles order the four points unambiguously.
    const double base = std::arg(p - carrier_.center);
    auto rel = [&](Complex w) {
      return carrier_.orient * wrap_signed(std::arg(w - carrier_.center) - base);
    };
    const double rq = rel(q);
    const double r1 = rel(u1);
    if (r1 > rq && r1 > 0.0) {
      xi_plus_ = wrap_angle(phi0 + dphi);
      xi_minus_ = wrap_angle(phi0 - dphi);
    } else {
      xi_plus_ = wrap_angle(phi0 - dphi);
      xi_minus_ = wrap_angle(phi0 + dphi);
    }
  }
}

HPoint GeodesicArc::point_at(double s) const {
  if (s == 0.0) return start_;
  return flow(UnitTangent(start_, direction_at(0.0)), s).base;
}

double GeodesicArc::direction_at(double s) const {
  const Complex w = (s == 0.0) ? start_.z() : (s == length_ ? end_.z() : point_at(s).z());
  return direction_toward_ideal(w, xi_plus_);
}

double GeodesicArc::param_of(Complex w) const {
  const double d = 2.0 * std::atanh(std::abs(w - start_.z()) /
                                    std::abs(Complex(1.0, 0.0) - std::conj(start_.z()) * w));
  // Forward means the chord from the start leans along the start tangent;
  // the in-disk portion of a geodesic subtends less than pi at its carrier
  // center, so the sign of this dot product is decisive.
  const Complex fwd = std::polar(1.0, direction_toward_ideal(start_.z(), xi_plus_));
  return dot(fwd, w - start_.z()) >= 0.0 ? d : -d;
}

void GeodesicArc::bbox(double& xmin, double& ymin, double& xmax, double& ymax) const {
  // Bounding box of the endpoints, padded by the sagitta of the carrier arc.
  xmin = std::min(start_.x(), end_.x());
  xmax = std::max(start_.x(), end_.x());
  ymin = std::min(start_.y(), end_.y());
  ymax = std::max(start_.y(), end_.y());
  if (!carrier_.is_line) {
    const double half = 0.5 * std::abs(end_.z() - start_.z());
    const double rho = carrier_.radius;
    const double sag = half * half / (rho + std::sqrt(std::max(rho * rho - half * half, 0.0)));
    xmin -= sag;
    xmax += sag;
    ymin -= sag;
    ymax += sag;
  }
}

double direction_toward_ideal(Complex w, double xi) {
  // Map w to the origin (direction-preserving); the geodesic direction at w
  // is the boundary angle of the mapped ideal point. Stable for every
  // geodesic, including near-diameters whose carrier centers are enormous.
  const Complex u = std::polar(1.0, xi);
  return std::arg((u - w) / (Complex(1.0, 0.0) - std::conj(w) * u));
}

double chart_ray_geodesic_t(double theta, double xi1, double xi2) {
  // All geodesic carriers have power exactly 1 at the origin (orthogonality
  // to the unit circle), so with the carrier written as center v/d the line
  // hit parameters solve t^2 - 2 m t + 1 = 0 with m = dot(u, v) / d. The two
  // roots multiply to 1: the signed in-disk root is 1/(m + sign(m) sqrt(..)).
  const Complex u1 = std::polar(1.0, xi1);
  const Complex u2 = std::polar(1.0, xi2);
  const double d = cross(u1, u2);
  if (std::abs(d) < 1e-15) return 0.0;  // the geodesic is itself a diameter
  const Complex v(u2.imag() - u1.imag(), u1.real() - u2.real());
  const Complex u = std::polar(1.0, theta);
  const double m = dot(u, v) / d;
  const double disc = m * m - 1.0;
  if (disc <= 0.0) return 0.0;
  const double mag = std::abs(m) + std::sqrt(disc);
  return (m > 0.0 ? 1.0 : -1.0) / mag;
}

int carrier_intersections(const Carrier& a, const Carrier& b, Complex out[2]) {
  if (a.is_line && b.is_line) {
    // Two diameters meet only at the origin.
    if (std::abs(cross(a.dir, b.dir)) < 1e-15) return 0;
    out[0] = Complex(0.0, 0.0);
    return 1;
  }
  if (a.is_line || b.is_line) {
    const Carrier& line = a.is_line ? a : b;
    const Carrier& circ = a.is_line ? b : a;
    // t^2 - 2 t dot(u, c) + 1 = 0; the roots multiply to 1, so the inner one
    // is the reciprocal of the outer (no cancellation for huge centers).
    const double m = dot(line.dir, circ.center);
    const double disc = m * m - 1.0;
    if (disc < 0.0) return 0;
    const double outer = std::abs(m) + std::sqrt(disc);
    const double sign = m >= 0.0 ? 1.0 : -1.0;
    out[0] = line.dir * (sign / outer);
    out[1] = line.dir * (sign * outer);
    return disc == 0.0 ? 1 : 2;
  }
  // Both carriers are orthogonal to the unit circle, so their radical line
  // passes through the origin, perpendicular to the center difference.
  const Complex delta = b.center - a.center;
  const double d = std::abs(delta);
  if (d < 1e-15) return 0;  // concentric (same carrier)
  const Complex u = Complex(0.0, 1.0) * delta / d;
  // dot(u, a.center) == dot(u, b.center); the smaller center is the stabler.
  const double m = std::abs(a.center) < std::abs(b.center) ? dot(u, a.center) : dot(u, b.center);
  const double disc = m * m - 1.0;
  if (disc < 0.0) return 0;
  const double outer = std::abs(m) + std::sqrt(disc);
  const double sign = m >= 0.0 ? 1.0 : -1.0;
  out[0] = u * (sign / outer);
  out[1] = u * (sign * outer);
  return disc == 0.0 ? 1 : 2;
}

namespace {

bool same_carrier(const Carrier& a, const Carrier& b) {
  if (a.is_line != b.is_line) return false;
  if (a.is_line) return std::abs(cross(a.dir, b.dir)) < 1e-12;
  return std::abs(a.center - b.center) < 1e-12 && std::abs(a.radius - b.radius) < 1e-12;
}

}  // namespace

std::optional<ArcCrossing> arc_intersection(const GeodesicArc& a, const GeodesicArc& b) {
  if (same_carrier(a.carrier(), b.carrier())) return std::nullopt;
  // Work in the chart at a's start point: a's geodesic becomes the exact
  // diameter at a's start direction, and b's geodesic is recovered from its
  // mapped ideal endpoints. Nothing here depends on carrier centers, so the
  // computation is stable for arcs passing arbitrarily close to the origin.
  const Isometry to_origin = Isometry::point_to_origin(a.start());
  const double theta = direction_toward_ideal(a.start().z(), a.xi_plus());
  const double xi1 = std::arg(to_origin.apply(std::polar(1.0, b.xi_minus())));
  const double xi2 = std::arg(to_origin.apply(std::polar(1.0, b.xi_plus())));
  const double t = chart_ray_geodesic_t(theta, xi1, xi2);
  if (t == 0.0) return std::nullopt;

  const Complex w = to_origin.inverse().apply(std::polar(t, theta));
  if (std::norm(w) >= 1.0) return std::nullopt;
  constexpr double kInteriorEps = 1e-12;
  const double sa = a.param_of(w);
  if (sa <= kInteriorEps || sa >= a.length() - kInteriorEps) return std::nullopt;
  const double sb = b.param_of(w);
  if (sb <= kInteriorEps || sb >= b.length() - kInteriorEps) return std::nullopt;

  const double da = direction_toward_ideal(w, a.xi_plus());
  const double db = direction_toward_ideal(w, b.xi_plus());
  const double angle = std::abs(wrap_signed(db - da));
  ArcCrossing hit;
  hit.point = HPoint::from(w);
  hit.angle = angle;
  hit.s_a = sa;
  hit.s_b = sb;
  hit.near_tangential = (angle < kTangentialAngle) || (angle > kPi - kTangentialAngle);
  return hit;
}

GeodesicArc arc_from_tangent(const UnitTangent& v, double length) {
  return GeodesicArc(v.base, flow(v, length).base);
}

}  // namespace tesslab::hyp
