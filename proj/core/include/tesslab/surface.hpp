#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "tesslab/hypgeom.hpp"
#include "tesslab/rng.hpp"

namespace tesslab::surf {

/// Regular geodesic octagon centered at the origin, interior angles pi/4,
/// opposite sides identified by hyperbolic translations. Gluing the sides
/// yields the closed genus-2 surface (one vertex class, angle sum 2*pi).
struct FundamentalOctagon {
  std::array<hyp::HPoint, 8> vertices;    // vertex k at angle (2k-1) pi/8
  std::array<hyp::GeodesicArc, 8> sides;  // side k joins vertex k and k+1
  std::array<hyp::Isometry, 8> pairings;  // pairing[k] maps side k onto side k+4
  int genus = 2;
  double area_quadrature = 0.0;  // polar quadrature of the hyperbolic area
  double circumradius = 0.0;     // hyperbolic center-to-vertex distance
  double apothem = 0.0;          // hyperbolic center-to-side distance
};

class Surface {
 public:
  explicit Surface(FundamentalOctagon oct);

  const FundamentalOctagon& octagon() const { return oct_; }
  /// Gauss-Bonnet area 2 pi (2g - 2) = 4 pi.
  double area() const { return area_; }
  /// Line-process intensity constant 1/area.
  double kappa() const { return kappa_; }
  /// Lower bound on the injectivity radius: half the shortest translation
  /// length over short words in the side-pairing group.
  double injectivity_radius() const { return injectivity_radius_; }

  /// Signed clearance of p from the octagon boundary: min over sides of the
  /// distance (Euclidean, in carrier terms) outside each side circle.
  /// Nonnegative inside the closed octagon.
  double clearance(const hyp::HPoint& p) const;
  bool contains(const hyp::HPoint& p, double tol = 1e-12) const {
    return clearance(p) >= -tol;
  }

  /// Fundamental-domain representative p' = g(p) of a point within a couple
  /// of layers of translates, with the group element g. Boundary ties are
  /// resolved deterministically: a representative landing on side k >= 4 is
  /// mapped across to its partner side.
  std::pair<hyp::HPoint, hyp::Isometry> reduce_to_domain(const hyp::HPoint& p) const;

  /// Liouville-measure sample: base point uniform w.r.t. hyperbolic area on
  /// the octagon (rejection in the Euclidean circumdisk with the area
  /// density as acceptance weight), direction uniform and independent.
  hyp::UnitTangent sample_liouville(Rng& rng) const;

  /// Summary document (vertices, pairings, area, kappa, injectivity radius).
  std::string to_json() const;

 private:
  FundamentalOctagon oct_;
  double area_;
  double kappa_;
  double injectivity_radius_;
};

/// Build the genus-2 surface. The circumradius is solved from the
/// interior-angle condition by bisection; all octagon invariants (angles,
/// area, pairing action, vertex-cycle relator) are checked and a violation
/// throws std::runtime_error.
Surface build_genus2_surface();

}  // namespace tesslab::surf
