#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "tesslab/tracer.hpp"

using namespace tesslab;
using namespace tesslab::hyp;
using namespace tesslab::trace;

namespace {

const surf::Surface& the_surface() {
  static const surf::Surface s = surf::build_genus2_surface();
  return s;
}

UnitTangent random_start(Rng& rng) { return the_surface().sample_liouville(rng); }

}  // namespace

TEST_CASE("trivial traces") {
  const auto& s = the_surface();
  const UnitTangent v(HPoint(0.1, 0.05), 1.2);

  CHECK(trace_geodesic(s, v, 0.0).arcs.empty());

  // Short enough to stay inside the octagon: one arc of exactly length T.
  const GeodesicTrace tr = trace_geodesic(s, v, 0.5);
  REQUIRE(tr.arcs.size() == 1);
  CHECK(tr.arcs[0].arc.length() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(tr.arcs[0].exit_side == -1);
}

TEST_CASE("trace continuity and length additivity") {
  const auto& s = the_surface();
  const auto& oct = s.octagon();
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const GeodesicTrace tr = trace_geodesic(s, random_start(rng), 100.0);
    double total = 0.0;
    for (std::size_t k = 0; k < tr.arcs.size(); ++k) {
      total += tr.arcs[k].arc.length();
      // Every arc midpoint lies strictly inside the domain.
      const HPoint mid = tr.arcs[k].arc.point_at(0.5 * tr.arcs[k].arc.length());
      CHECK(s.clearance(mid) > -1e-9);
      if (k + 1 < tr.arcs.size()) {
        const int side = tr.arcs[k].exit_side;
        REQUIRE(side >= 0);
        const HPoint mapped = oct.pairings[side](tr.arcs[k].arc.end());
        CHECK(std::abs(mapped.z() - tr.arcs[k + 1].arc.start().z()) < 1e-9);
        CHECK(tr.arcs[k + 1].t_start ==
              doctest::Approx(tr.arcs[k].t_start + tr.arcs[k].arc.length()).epsilon(1e-9));
      }
    }
    CHECK(total == doctest::Approx(100.0).epsilon(1e-8));
  }
}

TEST_CASE("arc count tracks the mean crossing length") {
  // The mean free path across a convex domain is pi * area / perimeter, so a
  // length-T trace produces about T / that many crossings.
  const auto& s = the_surface();
  const double side = s.octagon().sides[0].length();
  const double mean_crossing = kPi * s.area() / (8.0 * side);
  Rng rng(97);
  double arcs = 0.0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t)
    arcs += static_cast<double>(trace_geodesic(s, random_start(rng), 100.0).arcs.size());
  arcs /= trials;
  CHECK(arcs == doctest::Approx(100.0 / mean_crossing).epsilon(0.05));
}

TEST_CASE("reversal reproduces the same arc set") {
  // The geodesic flow is exponentially sensitive, so the tolerance of 1e-6
  // bounds the horizon this can hold over in double precision; T = 20 keeps
  // the accumulated divergence two orders below the tolerance.
  const auto& s = the_surface();
  Rng rng(7);
  const GeodesicTrace fwd = trace_geodesic(s, random_start(rng), 20.0);
  const auto& last = fwd.arcs.back();
  const UnitTangent back_start(last.arc.end(),
                               last.arc.direction_at(last.arc.length()) + kPi);
  const GeodesicTrace bwd = trace_geodesic(s, back_start, 20.0);
  REQUIRE(bwd.arcs.size() == fwd.arcs.size());
  const std::size_t n = fwd.arcs.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& f = fwd.arcs[n - 1 - k].arc;
    const auto& b = bwd.arcs[k].arc;
    CHECK(std::abs(f.end().z() - b.start().z()) < 1e-6);
    CHECK(std::abs(f.start().z() - b.end().z()) < 1e-6);
    CHECK(f.length() == doctest::Approx(b.length()).epsilon(1e-6));
  }
}

TEST_CASE("aiming at a corner raises the degeneracy error") {
  const auto& s = the_surface();
  // Diameters are Euclidean segments, so a ray from the center toward a
  // vertex exits exactly through it.
  const double corner_angle = std::arg(s.octagon().vertices[0].z());
  CHECK_THROWS_AS(trace_geodesic(s, UnitTangent(HPoint::origin(), corner_angle), 10.0),
                  TraceDegeneracy);
}

TEST_CASE("self-intersections: grid equals brute force exactly") {
  const auto& s = the_surface();
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const GeodesicTrace tr = trace_geodesic(s, random_start(rng), 60.0);
    const IntersectionSet grid = self_intersections(tr);
    const IntersectionSet brute = self_intersections_bruteforce(tr);
    REQUIRE(grid.vertices.size() == brute.vertices.size());
    for (std::size_t i = 0; i < grid.vertices.size(); ++i) {
      CHECK(grid.vertices[i].arc_a == brute.vertices[i].arc_a);
      CHECK(grid.vertices[i].arc_b == brute.vertices[i].arc_b);
      CHECK(grid.vertices[i].point.x() == brute.vertices[i].point.x());
      CHECK(grid.vertices[i].point.y() == brute.vertices[i].point.y());
      CHECK(grid.vertices[i].angle == brute.vertices[i].angle);
    }
    CHECK(grid.tangential_flags == brute.tangential_flags);
  }
}

TEST_CASE("self-intersection structure: counts, bounds, vertices on arcs") {
  const auto& s = the_surface();
  Rng rng(17);
  const double T = 150.0;
  const GeodesicTrace tr = trace_geodesic(s, random_start(rng), T);
  const IntersectionSet set = self_intersections(tr);

  REQUIRE(!set.vertices.empty());
  const double rho = s.injectivity_radius();
  CHECK(static_cast<double>(set.vertices.size()) <= T * T / (rho * rho));

  // No duplicate arc pairs, vertices on both named arcs.
  for (std::size_t i = 0; i < set.vertices.size(); ++i) {
    const auto& v = set.vertices[i];
    CHECK(v.arc_a < v.arc_b);
    const HPoint on_a = tr.arcs[static_cast<std::size_t>(v.arc_a)].arc.point_at(v.s_a);
    const HPoint on_b = tr.arcs[static_cast<std::size_t>(v.arc_b)].arc.point_at(v.s_b);
    CHECK(std::abs(on_a.z() - v.point.z()) < 1e-9);
    CHECK(std::abs(on_b.z() - v.point.z()) < 1e-9);
    CHECK(v.angle > 0.0);
    CHECK(v.angle < kPi);
    if (i > 0) {
      CHECK((set.vertices[i - 1].arc_a != v.arc_a || set.vertices[i - 1].arc_b != v.arc_b));
    }
  }
  CHECK(set.tangential_flags == 0);
  CHECK(min_vertex_separation(set) > 1e-7);

  // Sub-segment count between crossing times: e = 2v + 1.
  const auto times = crossing_times(tr, set);
  CHECK(times.size() == 2 * set.vertices.size());
  long e = static_cast<long>(times.size()) + 1;
  CHECK(std::abs(e - 2 * static_cast<long>(set.vertices.size())) <= 2);

  // A single short arc self-intersects nowhere.
  const GeodesicTrace tiny = trace_geodesic(s, UnitTangent(HPoint(0.6, 0.0), 2.0), 0.3);
  CHECK(self_intersections(tiny).vertices.empty());
}

TEST_CASE("disk crossings: synthetic diameter through the center") {
  const auto& s = the_surface();
  for (double theta : {0.3, 1.1, 2.5, 4.0}) {
    // Start one unit before the center so the chord passes straight through.
    const UnitTangent at_center(HPoint::origin(), theta);
    const UnitTangent start = flow(at_center, -1.0);
    const GeodesicTrace tr = trace_geodesic(s, start, 2.0);
    const double alpha = 0.02 * 2.0;  // rho = alpha / T = 0.02
    const DiskCrossingRecord rec = disk_crossings(s, tr, HPoint::origin(), alpha);
    REQUIRE(rec.chords.size() == 1);
    CHECK(rec.incomplete_crossings == 0);
    const double gap = std::abs(wrap_signed(rec.chords[0].entry - rec.chords[0].exit));
    CHECK(gap == doctest::Approx(kPi).epsilon(1e-6));
    CHECK(std::abs(wrap_signed(rec.chords[0].exit - theta)) < 1e-6);
    CHECK(std::abs(wrap_signed(rec.chords[0].entry - theta - kPi)) < 1e-6);
    // Entry time: the disk boundary is reached rho before the center.
    CHECK(rec.chords[0].t_entry == doctest::Approx(1.0 - rec.radius).epsilon(1e-6));
  }
}

TEST_CASE("trace avoiding the disk yields an empty record") {
  const auto& s = the_surface();
  const GeodesicTrace tr = trace_geodesic(s, UnitTangent(HPoint(0.5, 0.0), kPi / 2.0), 0.4);
  const DiskCrossingRecord rec = disk_crossings(s, tr, HPoint::origin(), 0.4 * 0.05);
  CHECK(rec.chords.empty());
  CHECK(rec.incomplete_crossings == 0);
}

namespace {

// Scan oracle: walk the trace at fine resolution and count maximal runs of
// points inside the disk, merging runs that continue across a side pairing.
int scan_disk_runs(const GeodesicTrace& tr, const HPoint& x, double rho) {
  int runs = 0;
  bool inside = false;
  for (const auto& ta : tr.arcs) {
    const int steps = std::max(8, static_cast<int>(ta.arc.length() / (rho / 60.0)));
    for (int i = 0; i <= steps; ++i) {
      const double sp = ta.arc.length() * i / steps;
      const bool now = hyp_distance(ta.arc.point_at(sp), x) < rho;
      if (now && !inside) ++runs;
      inside = now;
    }
  }
  return runs;
}

}  // namespace

TEST_CASE("disk crossings near the boundary stitch across the pairing") {
  const auto& s = the_surface();
  const auto& oct = s.octagon();
  const double T = 200.0;
  const double alpha = 0.015 * T;  // rho = 0.015, comparable to the offset below

  // Center within rho/2 of side 0, so the disk pokes across the boundary.
  const double d_center = oct.apothem - 0.0075;
  const HPoint x(std::tanh(0.5 * d_center), 0.0);

  Rng rng(29);
  int total_chords = 0;
  for (int trial = 0; trial < 6; ++trial) {
    const GeodesicTrace tr = trace_geodesic(s, the_surface().sample_liouville(rng), T);
    const DiskCrossingRecord rec = disk_crossings(s, tr, x, alpha);
    const int runs = scan_disk_runs(tr, x, rec.radius);
    // Runs seen in domain coordinates double-count stitched crossings (one
    // fragment on each side of the pairing), so chords + incomplete can be
    // below the run count but never above.
    CHECK(static_cast<int>(rec.chords.size()) + rec.incomplete_crossings <= runs);
    CHECK(runs <= 2 * (static_cast<int>(rec.chords.size()) + rec.incomplete_crossings));
    total_chords += static_cast<int>(rec.chords.size());
    for (const auto& c : rec.chords) {
      CHECK(c.entry >= 0.0);
      CHECK(c.entry < kTwoPi);
      CHECK(c.exit >= 0.0);
      CHECK(c.exit < kTwoPi);
      CHECK(c.t_exit > c.t_entry);
    }
  }
  CHECK(total_chords > 0);
}

TEST_CASE("disk crossings at an interior center match the scan oracle exactly") {
  const auto& s = the_surface();
  Rng rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    const GeodesicTrace tr = trace_geodesic(s, the_surface().sample_liouville(rng), 200.0);
    const DiskCrossingRecord rec = disk_crossings(s, tr, HPoint::origin(), 0.02 * 200.0);
    const int runs = scan_disk_runs(tr, HPoint::origin(), rec.radius);
    CHECK(static_cast<int>(rec.chords.size()) + rec.incomplete_crossings == runs);
  }
}

TEST_CASE("entry diagnostics and double hits") {
  const auto& s = the_surface();
  const HPoint x = HPoint::origin();
  const HPoint x2(0.46, 0.0);

  // Short trace far from both disks: nothing recorded.
  const GeodesicTrace quiet = trace_geodesic(s, UnitTangent(HPoint(-0.5, -0.4), 0.2), 0.3);
  const EntryDiagnostics d0 = entry_time_diagnostics(s, quiet, x, x2, 0.3 * 0.01);
  CHECK_FALSE(d0.first_entry.has_value());
  CHECK(d0.return_gaps.empty());
  CHECK(d0.double_hits == 0);

  // Centers too close violate the precondition.
  CHECK_THROWS_AS(entry_time_diagnostics(s, quiet, x, HPoint(1e-8, 0.0), 1.0),
                  std::invalid_argument);

  Rng rng(37);
  const GeodesicTrace tr = trace_geodesic(s, the_surface().sample_liouville(rng), 400.0);
  const EntryDiagnostics diag = entry_time_diagnostics(s, tr, x, x2, 8.0);
  const DiskCrossingRecord rec = disk_crossings(s, tr, x, 8.0);
  if (!rec.chords.empty()) {
    REQUIRE(diag.first_entry.has_value());
    CHECK(*diag.first_entry == doctest::Approx(rec.chords[0].t_entry));
    CHECK(diag.return_gaps.size() == rec.chords.size() - 1);
    for (double g : diag.return_gaps) CHECK(g > 0.0);
  }
  CHECK(diag.double_hits >= 0);
}

TEST_CASE("golden trace dump is stable") {
  const auto& s = the_surface();
  Rng rng = Rng::for_replicate(42, 0);
  const UnitTangent start = s.sample_liouville(rng);
  GeodesicTrace tr = trace_geodesic(s, start, 40.0);
  tr.seed = 42;
  const IntersectionSet set = self_intersections(tr);
  const std::string dump = trace_to_json(tr, set);

  std::ifstream in(std::string(TESSLAB_GOLDEN_DIR) + "/trace_seed42_T40.json");
  REQUIRE_MESSAGE(in.good(), "golden file missing; regenerate with tools/tesslab trace");
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(dump == buf.str());
}
