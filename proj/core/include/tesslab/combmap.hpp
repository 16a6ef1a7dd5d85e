#pragma once

#include <vector>

namespace tesslab::tess {

/// Rotation-system combinatorial map. Darts 2i and 2i+1 are the two halves
/// of edge i; alpha(d) = d ^ 1 is the edge involution; sigma is the
/// clockwise successor among the darts based at the same vertex. Faces are
/// the orbits of d -> sigma(alpha(d)), each walking the face that lies to
/// the left of its darts (bounded faces come out counterclockwise).
struct CombMap {
  std::vector<int> vertex_of;  // dart -> base vertex
  std::vector<double> angle;   // dart -> outgoing direction at the vertex
  std::vector<int> sigma;      // built by build_rotation()
  int vertex_count = 0;

  int dart_count() const { return static_cast<int>(vertex_of.size()); }
  int edge_count() const { return dart_count() / 2; }

  int add_edge(int u, double angle_u, int v, double angle_v);

  /// Sort the darts at each vertex into clockwise cyclic order.
  void build_rotation();

  /// Face orbits; every dart appears in exactly one orbit.
  std::vector<std::vector<int>> face_orbits() const;

  /// Interior corner swept at the step from dart d into the next face dart,
  /// in (0, 2*pi] (a full turn at a degree-1 stub counts as 2*pi).
  double corner_angle(int dart) const;

  /// Connected components of the underlying graph (vertices with no darts
  /// are not counted).
  int component_count() const;
};

}  // namespace tesslab::tess
