#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tesslab/combmap.hpp"
#include "tesslab/plp.hpp"
#include "tesslab/tracer.hpp"

namespace tesslab::tess {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

struct Segment {
  Vec2 a, b;
};

/// Thrown when the input violates the generic-position assumption within
/// tolerance: an intersection lands on an existing vertex, three segments
/// are near-concurrent, or edges overlap. Callers may jitter and retry.
struct DegeneracyError : std::runtime_error {
  explicit DegeneracyError(const std::string& what, std::vector<std::array<int, 3>> triples = {})
      : std::runtime_error(what), offenders(std::move(triples)) {}
  std::vector<std::array<int, 3>> offenders;  // involved segment indices, -1 padded
};

struct ArrangementFace {
  std::vector<int> darts;
  double area = 0.0;  // signed; bounded faces are positive
  int k = 0;
  bool outer = false;
  bool touches_boundary = false;
};

/// Planar subdivision induced by a segment family inside a window. The
/// window boundary participates in the arrangement (chord endpoints become
/// boundary vertices); faces are the rotation-system orbits.
struct Arrangement {
  std::vector<Vec2> vertices;
  std::vector<bool> on_boundary;
  std::vector<bool> edge_on_boundary;  // per edge
  CombMap map;
  std::vector<ArrangementFace> faces;
  int components = 0;
  plp::Window window{plp::DiskWindow{1.0}};
  double window_area = 0.0;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int edge_count() const { return map.edge_count(); }
  int face_count() const { return static_cast<int>(faces.size()); }  // includes outer orbits
  long bounded_face_count() const;
  long interior_face_count() const;   // bounded faces not touching the boundary
};

/// Clip the sampled lines to their window, producing chord segments.
std::vector<Segment> clip_lines(const plp::LineSample& sample);

Arrangement build_arrangement(const std::vector<Segment>& segments, const plp::Window& window,
                              double tol = 1e-9);

/// build_arrangement with deterministic jitter-retry on DegeneracyError
/// (perturbation 1e-8, a handful of attempts).
Arrangement build_arrangement_jittered(std::vector<Segment> segments, const plp::Window& window,
                                       std::uint64_t jitter_seed, double tol = 1e-9);

struct FaceRecord {
  int k = 0;
  double area = 0.0;
  double bbox_w = 0.0, bbox_h = 0.0;  // axis-aligned bounding box (scaled)
  std::vector<double> side_lengths;
  std::vector<double> angles;
  bool boundary = false;  // touches the window boundary / contains a trace end
};

struct FaceCensus {
  long total_bounded = 0;
  long interior = 0;
  long boundary_touching = 0;
  std::map<int, long> k_counts;  // interior faces only
  std::vector<FaceRecord> faces;
  double window_area = 0.0;
  double window_half = 0.0;  // square windows; 0 for disks
  double bounded_area_sum = 0.0;
  double scale = 1.0;

  /// Stereological edge correction: boundary-touching faces counted half.
  /// This removes the O(1/n) window bias of the raw counts when densities
  /// are compared against their infinite-window limits.
  double edge_corrected_count() const { return static_cast<double>(interior) + 0.5 * static_cast<double>(boundary_touching); }
};

/// Typical-cell k-gon fractions from a square-window census with
/// minus-sampling weights: each interior face counts with the reciprocal of
/// its bounding-box inclusion probability (2n - w)(2n - h). Conditioning a
/// face to lie fully inside the window favors small cells; the weights
/// remove that size bias, so censuses of different window sizes agree.
std::map<int, double> weighted_k_fractions(const FaceCensus& census);

/// Polygon metrics of the bounded faces; lengths scaled by `scale`, areas
/// by its square (shoelace on scaled coordinates).
FaceCensus face_census(const Arrangement& arr, double scale = 1.0);

/// Census CSV: "replicate,k,count" rows for the interior k-gon counts,
/// followed by per-face rows
/// "replicate,face-id,k,area,min_side,max_side,angle;angle;...".
std::string census_to_csv(const FaceCensus& census, long replicate);

/// One geodesic pass through a tessellation vertex.
struct PassEvent {
  double time;
  int vertex;
  double direction;
};

struct SurfaceFace {
  int k = 0;
  double area = 0.0;  // Gauss-Bonnet angle defect
  std::vector<double> side_lengths;
  std::vector<double> angles;
  bool endpoint_face = false;
};

/// Combinatorial map of the tessellation cut by the traced geodesic:
/// vertices are self-intersections (plus the two trace endpoints for open
/// traces), edges are the sub-segments between consecutive crossing times,
/// rotations come from the crossing angles.
struct SurfaceMap {
  int v = 0, e = 0, f = 0;
  int euler() const { return v - e + f; }
  std::vector<SurfaceFace> faces;
};

/// Build from explicit pass events (two per vertex, sorted by time).
/// Open maps append two degree-1 endpoint vertices at times 0 and
/// total_length; closed maps wrap the last edge back to the first event.
SurfaceMap surface_map_from_events(const std::vector<PassEvent>& events, int vertex_count,
                                   double total_length, bool closed);

/// Map of a traced geodesic. Throws std::invalid_argument when the
/// intersection set carries tangential flags (the rotation system would be
/// ambiguous).
SurfaceMap surface_map_from_trace(const trace::GeodesicTrace& tr, const trace::IntersectionSet& inters);

struct PolygonStats {
  long faces = 0;
  std::map<int, long> k_counts;
  std::vector<double> side_lengths;  // scaled
  std::vector<double> angles;

  std::map<int, double> k_fractions() const;
};

/// Aggregate k-gon fractions and scaled side-length / angle samples over
/// face records, excluding boundary / endpoint faces. `scale` multiplies
/// side lengths (the length-rescaled tessellation).
PolygonStats scaled_polygon_stats(const std::vector<FaceRecord>& faces, double scale);
PolygonStats scaled_polygon_stats(const SurfaceMap& map, double scale);

}  // namespace tesslab::tess
