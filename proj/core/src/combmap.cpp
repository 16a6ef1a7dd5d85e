#include "tesslab/combmap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tesslab::tess {

namespace {
constexpr double kTwoPi = 6.28318530717958647692528676655900577;

double wrap_positive(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}
}  // namespace

int CombMap::add_edge(int u, double angle_u, int v, double angle_v) {
  vertex_of.push_back(u);
  angle.push_back(angle_u);
  vertex_of.push_back(v);
  angle.push_back(angle_v);
  vertex_count = std::max({vertex_count, u + 1, v + 1});
  return edge_count() - 1;
}

void CombMap::build_rotation() {
  std::vector<std::vector<int>> at_vertex(static_cast<std::size_t>(vertex_count));
  for (int d = 0; d < dart_count(); ++d) at_vertex[static_cast<std::size_t>(vertex_of[d])].push_back(d);
  sigma.assign(static_cast<std::size_t>(dart_count()), -1);
  for (auto& darts : at_vertex) {
    // Descending angle: sigma is the next dart CLOCKWISE, which makes the
    // orbits of sigma(alpha(dart)) walk the face to the left of each dart.
    std::sort(darts.begin(), darts.end(), [&](int a, int b) {
      const double wa = wrap_positive(angle[a]);
      const double wb = wrap_positive(angle[b]);
      if (wa != wb) return wa > wb;
      return a < b;
    });
    const int n = static_cast<int>(darts.size());
    for (int i = 0; i < n; ++i) sigma[static_cast<std::size_t>(darts[i])] = darts[(i + 1) % n];
  }
}

std::vector<std::vector<int>> CombMap::face_orbits() const {
  std::vector<bool> seen(static_cast<std::size_t>(dart_count()), false);
  std::vector<std::vector<int>> orbits;
  for (int start = 0; start < dart_count(); ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    std::vector<int> orbit;
    int d = start;
    do {
      seen[static_cast<std::size_t>(d)] = true;
      orbit.push_back(d);
      d = sigma[static_cast<std::size_t>(d ^ 1)];
    } while (d != start);
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

double CombMap::corner_angle(int dart) const {
  const int incoming = dart ^ 1;
  const int outgoing = sigma[static_cast<std::size_t>(incoming)];
  const double swept = wrap_positive(angle[static_cast<std::size_t>(incoming)] -
                                     angle[static_cast<std::size_t>(outgoing)]);
  return swept == 0.0 ? kTwoPi : swept;
}

int CombMap::component_count() const {
  std::vector<int> parent(static_cast<std::size_t>(vertex_count));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int i = 0; i < edge_count(); ++i) {
    const int a = find(vertex_of[static_cast<std::size_t>(2 * i)]);
    const int b = find(vertex_of[static_cast<std::size_t>(2 * i + 1)]);
    if (a != b) parent[static_cast<std::size_t>(a)] = b;
  }
  std::vector<bool> touched(static_cast<std::size_t>(vertex_count), false);
  for (int d = 0; d < dart_count(); ++d) touched[static_cast<std::size_t>(vertex_of[d])] = true;
  int count = 0;
  for (int v = 0; v < vertex_count; ++v) {
    if (touched[static_cast<std::size_t>(v)] && find(v) == v) ++count;
  }
  return count;
}

}  // namespace tesslab::tess
