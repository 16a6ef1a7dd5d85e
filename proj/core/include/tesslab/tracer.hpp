#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tesslab/hypgeom.hpp"
#include "tesslab/surface.hpp"

namespace tesslab::trace {

/// Thrown when the trace hits a measure-zero geometric degeneracy (exit
/// through a vertex, tangency to a side). Callers retry with a fresh
/// Liouville sample.
struct TraceDegeneracy : std::runtime_error {
  explicit TraceDegeneracy(const std::string& what) : std::runtime_error(what) {}
};

/// One crossing of the fundamental octagon.
struct TraceArc {
  hyp::GeodesicArc arc;
  int exit_side;   // side index the arc leaves through; -1 for the final arc
  double t_start;  // hyperbolic time at the arc's start
};

struct GeodesicTrace {
  std::vector<TraceArc> arcs;
  double total_length = 0.0;
  hyp::UnitTangent start;
  std::uint64_t seed = 0;  // provenance tag, not consumed here
};

/// Trace the geodesic from `start` for hyperbolic length T, chopping it into
/// octagon crossings expressed in fundamental-domain coordinates. Successive
/// arcs are linked by the side pairings: pairing[exit side] maps an arc's
/// end point onto the next arc's start point.
GeodesicTrace trace_geodesic(const surf::Surface& surface, const hyp::UnitTangent& start, double T);

struct Vertex {
  hyp::HPoint point;
  double angle;  // crossing angle in (0, pi)
  int arc_a, arc_b;
  double s_a, s_b;  // along-arc parameters (hyperbolic length)
  bool near_tangential;
};

struct IntersectionSet {
  std::vector<Vertex> vertices;
  int tangential_flags = 0;
};

/// All transversal pairwise intersections of distinct trace arcs, interior
/// to both arcs (boundary contacts and shared endpoints are excluded).
/// Candidate pairs are pruned by a uniform spatial grid over arc boxes.
IntersectionSet self_intersections(const GeodesicTrace& trace);

/// Reference implementation: plain all-pairs scan. Kept as the semantic
/// definition the grid version is tested against.
IntersectionSet self_intersections_bruteforce(const GeodesicTrace& trace);

/// Smallest pairwise Euclidean distance between intersection vertices
/// (triple-point diagnostic; +inf for fewer than two vertices).
double min_vertex_separation(const IntersectionSet& set);

struct SeparationStats {
  double min_separation;
  long pairs_below;  // vertex pairs closer than the given epsilon
};

/// Near-coincidence diagnostics: exact multiple points would collapse
/// separations to the rounding scale, while genuine near-triples of a long
/// geodesic appear at rates proportional to epsilon. Both are reported;
/// neither is ever merged.
SeparationStats separation_stats(const IntersectionSet& set, double eps);

/// Global crossing times (two per vertex), sorted along the geodesic.
std::vector<double> crossing_times(const GeodesicTrace& trace, const IntersectionSet& set);

/// One chord of the boundary circle of a crossed disk, angles as seen from
/// the disk center (hyperbolic polar directions), entry first.
struct DiskChord {
  double entry;
  double exit;
  double t_entry;  // global time of the entry
  double t_exit;
};

struct DiskCrossingRecord {
  hyp::HPoint center;
  double radius = 0.0;  // hyperbolic, = alpha / T
  double alpha = 0.0;   // scaled circle radius carried by the configuration
  std::vector<DiskChord> chords;
  int incomplete_crossings = 0;  // trace start/end inside the disk
};

/// Crossings of the disk D(x, alpha/T) by the trace. Crossings that span a
/// side of the octagon are stitched across the pairing isometry, so the
/// record is correct for centers within alpha/T of the boundary as well.
DiskCrossingRecord disk_crossings(const surf::Surface& surface, const GeodesicTrace& trace,
                                  const hyp::HPoint& x, double alpha);

struct EntryDiagnostics {
  std::optional<double> first_entry;
  std::vector<double> return_gaps;  // exit-to-next-entry times for disk x
  int double_hits = 0;              // arcs meeting both disks
};

/// Return-time and double-hit diagnostics for two disks of radius alpha/T.
EntryDiagnostics entry_time_diagnostics(const surf::Surface& surface, const GeodesicTrace& trace,
                                        const hyp::HPoint& x, const hyp::HPoint& x2, double alpha);

/// Trace dump (seed, T, arcs, intersection vertices) for golden tests.
std::string trace_to_json(const GeodesicTrace& trace, const IntersectionSet& inters);

}  // namespace tesslab::trace
