#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <utility>

namespace tesslab::hyp {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Geometric coincidence tolerance (points, intersection residuals).
inline constexpr double kGeomTol = 1e-9;
/// Algebraic tolerance (matrix determinants, renormalization drift).
inline constexpr double kAlgebraTol = 1e-12;
/// Crossings closer than this to 0 or pi are flagged as near-tangential.
inline constexpr double kTangentialAngle = 1e-6;

double wrap_angle(double a);   ///< reduce to [0, 2*pi)
double wrap_signed(double a);  ///< reduce to (-pi, pi]

inline double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }
inline double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

/// Point of the open unit disk (Poincare model). Construction rejects
/// points on or outside the boundary circle.
class HPoint {
 public:
  HPoint() : x_(0.0), y_(0.0) {}
  HPoint(double x, double y) : x_(x), y_(y) {
    if (x * x + y * y >= 1.0) throw std::domain_error("HPoint: outside open unit disk");
  }
  static HPoint origin() { return HPoint(); }
  static HPoint from(Complex z) { return HPoint(z.real(), z.imag()); }

  double x() const { return x_; }
  double y() const { return y_; }
  Complex z() const { return {x_, y_}; }
  double norm2() const { return x_ * x_ + y_ * y_; }

 private:
  double x_, y_;
};

/// Hyperbolic distance between two disk points.
double hyp_distance(const HPoint& p, const HPoint& q);

/// Base point plus direction angle: the state of the geodesic flow.
struct UnitTangent {
  HPoint base;
  double direction = 0.0;  // normalized to [0, 2*pi)

  UnitTangent() = default;
  UnitTangent(HPoint b, double dir);
};

/// Orientation-preserving isometry of the disk, stored as the Moebius map
///   z -> (a z + b) / (conj(b) z + conj(a)),   |a|^2 - |b|^2 = 1,
/// i.e. an SU(1,1) matrix. Composition renormalizes the determinant; a
/// determinant that cannot be renormalized signals numeric blowup.
class Isometry {
 public:
  Isometry() : a_(1.0, 0.0), b_(0.0, 0.0) {}
  Isometry(Complex a, Complex b);

  static Isometry identity() { return Isometry(); }
  static Isometry rotation(double phi);
  /// Hyperbolic translation by `dist` along the axis through the origin
  /// with the given direction angle.
  static Isometry translation(double dist, double direction);
  /// The map taking p to the origin with positive real derivative at p
  /// (so directions at p are preserved).
  static Isometry point_to_origin(const HPoint& p);

  Isometry inverse() const { return Isometry(std::conj(a_), -b_); }
  Isometry operator*(const Isometry& rhs) const;

  Complex apply(Complex z) const;
  HPoint operator()(const HPoint& p) const { return HPoint::from(apply(p.z())); }
  UnitTangent operator()(const UnitTangent& v) const;

  Complex a() const { return a_; }
  Complex b() const { return b_; }
  double det() const { return std::norm(a_) - std::norm(b_); }
  /// 2 * acosh(|tr|/2) for hyperbolic elements, 0 otherwise.
  double translation_length() const;
  /// True if the map acts as the identity (up to overall sign) within tol.
  bool near_identity(double tol) const;
  /// Max deviation from the identity matrix up to sign (diagnostic).
  double identity_defect() const;

 private:
  Complex a_, b_;
};

/// Euclidean carrier of a geodesic: either a diameter (line through the
/// origin) or a circle orthogonal to the unit circle.
struct Carrier {
  bool is_line = false;
  Complex center{0.0, 0.0};  // circle case
  double radius = 0.0;       // circle case
  Complex dir{1.0, 0.0};     // line case: unit direction
  double orient = +1.0;      // circle case: +1 if start->end runs CCW around center
};

/// Directed geodesic segment between two disk points. Stores the ideal
/// endpoint angles of the full geodesic (xi_minus behind the start,
/// xi_plus beyond the end) and the hyperbolic length.
class GeodesicArc {
 public:
  GeodesicArc(HPoint start, HPoint end);

  const HPoint& start() const { return start_; }
  const HPoint& end() const { return end_; }
  double xi_minus() const { return xi_minus_; }
  double xi_plus() const { return xi_plus_; }
  double length() const { return length_; }
  const Carrier& carrier() const { return carrier_; }

  /// Point at arc-length s from the start (s may lie outside [0, length]).
  HPoint point_at(double s) const;
  /// Forward tangent angle at arc-length s.
  double direction_at(double s) const;
  /// Signed arc-length parameter of a point assumed to lie on the carrier.
  double param_of(Complex w) const;
  /// Euclidean bounding box of the segment (used by the spatial grid).
  void bbox(double& xmin, double& ymin, double& xmax, double& ymax) const;

 private:
  HPoint start_, end_;
  double xi_minus_, xi_plus_;
  double length_;
  Carrier carrier_;
};

/// Ideal endpoint angles (xi_minus, xi_plus) of the full geodesic through v.
std::pair<double, double> geodesic_ideal_endpoints(const UnitTangent& v);

/// Carrier of the full geodesic with the given ideal endpoint angles.
Carrier carrier_from_ideals(double xi_minus, double xi_plus);

/// Flow the geodesic for time t (hyperbolic arc length).
UnitTangent flow(const UnitTangent& v, double t);

/// Arc starting at v of the given length.
GeodesicArc arc_from_tangent(const UnitTangent& v, double length);

struct ArcCrossing {
  HPoint point;
  double angle;  // between directed tangents, in (0, pi)
  double s_a, s_b;
  bool near_tangential;
};

/// Unique transversal intersection interior to both arcs, if any.
/// Arcs sharing a carrier (in particular identical arcs) yield nothing;
/// intersections at shared endpoints are excluded.
std::optional<ArcCrossing> arc_intersection(const GeodesicArc& a, const GeodesicArc& b);

/// Euclidean intersection points of two geodesic carriers (0, 1 or 2).
int carrier_intersections(const Carrier& a, const Carrier& b, Complex out[2]);

/// Forward tangent angle at w of the geodesic running toward the ideal
/// boundary point at angle xi (w strictly inside the disk).
double direction_toward_ideal(Complex w, double xi);

/// Signed Euclidean radius where the diameter at angle theta meets the
/// geodesic with ideal endpoint angles (xi1, xi2); 0 when they miss or the
/// other geodesic is itself a diameter.
double chart_ray_geodesic_t(double theta, double xi1, double xi2);

}  // namespace tesslab::hyp
