#pragma once

#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "tesslab/rng.hpp"

namespace tesslab::plp {

/// Line {(x,y) : x cos(theta) + y sin(theta) = r} with theta in [0, pi).
struct Line {
  double r;
  double theta;
};

struct DiskWindow {
  double radius;
};
struct SquareWindow {
  double half_side;  // the square [-n, n]^2
};
using Window = std::variant<DiskWindow, SquareWindow>;

bool line_meets(const Window& w, const Line& line);

struct LineSample {
  std::vector<Line> lines;
  double intensity = 0.0;
  Window window{DiskWindow{1.0}};
};

/// Sample a Poisson line process of the given intensity restricted to the
/// window. The (r, theta) pairs form a Poisson point process of intensity
/// lambda/pi on the covering strip portion; square windows are drawn under
/// the conservative bound |r| <= n sqrt(2) and rejected exactly.
LineSample sample_plp(double lambda, const Window& window, Rng& rng);

/// Apply a plane isometry (rotation about the origin followed by a
/// translation) to every line and re-clip to the window.
LineSample transform_sample(const LineSample& sample, double rot_angle, double tx, double ty,
                            const Window& reclip);

/// Half-open boundary-angle interval [a0, a1) on the circle (may wrap).
struct ArcInterval {
  double a0;
  double a1;
  bool contains(double ang) const;
  double width() const;
};

struct ArcPair {
  ArcInterval A, B;
  double alpha;  // circle radius
};

/// beta_{A,B} = (1/pi) * integral over normal angles of the offset measure
/// of lines crossing both arcs. The per-angle offset set is computed in
/// closed form; the angle integral uses adaptive Simpson with absolute
/// error below 1e-6 (the quadrature tolerance is taken much tighter).
double beta_integral(const ArcPair& pair);

/// Offset measure psi at a single normal angle (exposed for the oracle).
double beta_offset_measure(const ArcPair& pair, double phi);

/// One chord as an ordered boundary-angle pair (entry, exit); ordering is
/// the optional direction tag, undirected consumers ignore it.
struct Chord {
  double entry;
  double exit;
};

struct ChordConfiguration {
  std::vector<Chord> chords;
  double alpha = 1.0;
};

/// Chords cut on the circle of radius alpha by the sampled lines; lines
/// missing the circle are dropped. Lines are undirected, so the direction
/// tag is a fair coin from `rng` (pass nullptr for entry < exit ordering).
ChordConfiguration chords_from_lines(const LineSample& sample, double alpha, Rng* rng);

struct PairCounts {
  int directed_ab = 0;
  int directed_ba = 0;
  int undirected() const { return directed_ab + directed_ba; }
};

struct CrossingCountTable {
  std::vector<PairCounts> per_pair;
  long replicate = -1;
};

/// Per-pair chord counts: a chord is counted for a pair when one endpoint
/// lies in A and the other in B.
CrossingCountTable crossing_counts(const ChordConfiguration& config, std::span<const ArcPair> pairs);

/// CSV rows "replicate,r,theta", one line per sampled line (no header).
std::string lines_to_csv(const LineSample& sample, long replicate);

/// CSV rows "replicate,angle1,angle2,direction" where direction = 1 tags the
/// (entry, exit) order as stored and the angles are listed sorted.
std::string chords_to_csv(const ChordConfiguration& config, long replicate);

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

/// Configuration-space metric: minimum over chord matchings of summed
/// per-chord distances, where a chord pair is compared by the cheaper of
/// the two endpoint matchings (arc-length metric on the circle).
/// Configurations of different cardinality are infinitely far apart.
/// Exact assignment for n <= 12 (bitmask DP), greedy plus pair-swap
/// refinement beyond that.
double config_distance(const ChordConfiguration& f, const ChordConfiguration& g);

}  // namespace tesslab::plp
