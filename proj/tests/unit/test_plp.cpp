#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tesslab/hypgeom.hpp"
#include "tesslab/plp.hpp"
#include "tesslab/stats.hpp"

using namespace tesslab;
using namespace tesslab::plp;
using hyp::kPi;
using hyp::kTwoPi;
using hyp::wrap_angle;
using hyp::wrap_signed;

namespace {

bool chord_crosses(const Chord& c, const ArcPair& p) {
  return (p.A.contains(c.entry) && p.B.contains(c.exit)) ||
         (p.B.contains(c.entry) && p.A.contains(c.exit));
}

}  // namespace

TEST_CASE("sampling basics") {
  Rng rng(3);
  CHECK(sample_plp(0.0, DiskWindow{1.0}, rng).lines.empty());

  const long reps = 100000;
  double mean = 0.0;
  std::vector<long> hist;
  for (long i = 0; i < reps; ++i) {
    Rng r = Rng::for_replicate(77, static_cast<std::uint64_t>(i));
    const LineSample s = sample_plp(1.0, DiskWindow{1.0}, r);
    mean += static_cast<double>(s.lines.size());
    if (s.lines.size() >= hist.size()) hist.resize(s.lines.size() + 1, 0);
    ++hist[s.lines.size()];
    for (const auto& line : s.lines) {
      CHECK(line.theta >= 0.0);
      CHECK(line.theta < kPi);
      CHECK(std::abs(line.r) <= 1.0);
    }
  }
  mean /= static_cast<double>(reps);
  CHECK(std::abs(mean - 2.0) < 0.015);

  stats::DiscreteDistribution emp;
  emp.p.assign(hist.size(), 0.0);
  for (std::size_t k = 0; k < hist.size(); ++k)
    emp.p[k] = static_cast<double>(hist[k]) / static_cast<double>(reps);
  const auto ref = stats::poisson_pmf(2.0, static_cast<int>(hist.size()) - 1);
  CHECK(stats::tv_distance(emp, ref) < 0.02);
}

TEST_CASE("square windows clip exactly") {
  Rng rng(5);
  const SquareWindow win{2.0};
  const LineSample s = sample_plp(1.5, Window{win}, rng);
  for (const auto& line : s.lines) {
    CHECK(std::abs(line.r) <=
          2.0 * (std::abs(std::cos(line.theta)) + std::abs(std::sin(line.theta))) + 1e-12);
  }
}

TEST_CASE("chords_from_lines geometry and round trip") {
  LineSample s;
  s.window = DiskWindow{1.0};
  s.intensity = 1.0;
  s.lines = {{0.0, 0.0}};
  const ChordConfiguration vertical = chords_from_lines(s, 1.0, nullptr);
  REQUIRE(vertical.chords.size() == 1);
  // The vertical diameter has endpoint angles pi/2 and 3 pi/2.
  const double lo = std::min(vertical.chords[0].entry, vertical.chords[0].exit);
  const double hi = std::max(vertical.chords[0].entry, vertical.chords[0].exit);
  CHECK(lo == doctest::Approx(kPi / 2.0).epsilon(1e-12));
  CHECK(hi == doctest::Approx(3.0 * kPi / 2.0).epsilon(1e-12));

  s.lines = {{1.2, 0.7}};
  CHECK(chords_from_lines(s, 1.0, nullptr).chords.empty());

  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double alpha = 1.0;
    const Line line{rng.uniform(-0.999, 0.999), rng.uniform(0.0, kPi)};
    s.lines = {line};
    const auto config = chords_from_lines(s, alpha, nullptr);
    REQUIRE(config.chords.size() == 1);
    const double y = config.chords[0].entry, z = config.chords[0].exit;
    // Reconstruct (r, theta) from the endpoint angles.
    double theta = wrap_angle(0.5 * (y + z));
    double r = alpha * std::cos(0.5 * std::abs(wrap_signed(y - z)));
    if (std::abs(alpha * std::cos(y - theta) - r) > 1e-6) {
      theta = wrap_angle(theta + kPi);
    }
    if (theta >= kPi) {
      theta -= kPi;
      r = -r;
    }
    CHECK(theta == doctest::Approx(line.theta).epsilon(1e-9));
    CHECK(r == doctest::Approx(line.r).epsilon(1e-9));
  }
}

TEST_CASE("beta integral: degenerate, linear in alpha, monotone") {
  CHECK(beta_integral({{0.1, 0.1}, {1.0, 2.0}, 1.0}) == 0.0);

  Rng rng(11);
  for (int i = 0; i < 25; ++i) {
    const double a0 = rng.angle(), b0 = a0 + rng.uniform(1.0, 2.0);
    const ArcPair base{{a0, a0 + rng.uniform(0.2, 0.8)}, {b0, b0 + rng.uniform(0.2, 0.8)}, 1.0};
    const ArcPair doubled{base.A, base.B, 2.0};
    const double beta1 = beta_integral(base);
    const double beta2 = beta_integral(doubled);
    CHECK(std::abs(beta2 - 2.0 * beta1) < 1e-6);

    // Enlarging an arc never decreases beta.
    ArcPair bigger = base;
    bigger.A.a1 = base.A.a1 + 0.3;
    CHECK(beta_integral(bigger) >= beta1 - 1e-9);
  }
}

TEST_CASE("beta offset measure agrees with a brute-force offset scan") {
  const ArcPair pair{{-0.2, 0.2}, {kPi - 0.2, kPi + 0.2}, 1.0};
  const int r_grid = 10000;
  for (double phi : {0.0, 0.3, 1.0, kPi / 2.0, 2.2, 3.0}) {
    double scanned = 0.0;
    for (int i = 0; i < r_grid; ++i) {
      const double r = -1.0 + 2.0 * (i + 0.5) / r_grid;
      const double a = std::acos(r);
      const double y = wrap_angle(phi + a);
      const double z = wrap_angle(phi - a);
      const bool hit = (pair.A.contains(y) && pair.B.contains(z)) ||
                       (pair.B.contains(y) && pair.A.contains(z));
      if (hit) scanned += 2.0 / r_grid;
    }
    CHECK(std::abs(beta_offset_measure(pair, phi) - scanned) < 2e-3);
  }

  // The full integral against the scanned version of psi.
  double scan_beta = 0.0;
  const int phi_grid = 2000;
  for (int k = 0; k < phi_grid; ++k) {
    const double phi = kPi * (k + 0.5) / phi_grid;
    scan_beta += beta_offset_measure(pair, phi) * kPi / phi_grid;
  }
  scan_beta /= kPi;
  CHECK(beta_integral(pair) == doctest::Approx(scan_beta).epsilon(1e-6));
}

TEST_CASE("beta matches the strip Monte Carlo oracle") {
  const ArcPair pair{{-0.2, 0.2}, {kPi - 0.2, kPi + 0.2}, 1.0};
  const double beta = beta_integral(pair);

  // Uniform (r, theta) samples on [-alpha, alpha] x [0, pi); the crossing
  // probability is beta / (2 alpha).
  Rng rng(13);
  const int n = 1000000;
  long hits = 0;
  for (int i = 0; i < n; ++i) {
    const double r = rng.uniform(-1.0, 1.0);
    const double theta = rng.uniform(0.0, kPi);
    const double a = std::acos(r);
    const Chord c{wrap_angle(theta + a), wrap_angle(theta - a)};
    if (chord_crosses(c, pair)) ++hits;
  }
  const double p_hat = static_cast<double>(hits) / n;
  const double p_ref = beta / 2.0;
  const double se = std::sqrt(p_ref * (1.0 - p_ref) / n);
  CHECK(std::abs(p_hat - p_ref) < 3.0 * se);
}

TEST_CASE("partition consistency: total crossing measure approaches 2 alpha") {
  const int m = 64;
  const double alpha = 1.0;
  std::vector<ArcInterval> arcs;
  for (int i = 0; i < m; ++i)
    arcs.push_back({kTwoPi * i / m, kTwoPi * (i + 1) / m});
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      total += beta_integral({arcs[static_cast<std::size_t>(i)], arcs[static_cast<std::size_t>(j)], alpha});
    }
  }
  CHECK(total <= 2.0 * alpha);
  CHECK(total >= 2.0 * alpha * 0.99);
}

TEST_CASE("crossing counts: direct cases and additivity") {
  const auto pairs = std::vector<ArcPair>{{{0.0, kPi / 2.0}, {kPi, 1.5 * kPi}, 1.0}};
  ChordConfiguration empty;
  empty.alpha = 1.0;
  CHECK(crossing_counts(empty, pairs).per_pair[0].undirected() == 0);

  ChordConfiguration one;
  one.alpha = 1.0;
  one.chords = {{0.3, kPi + 0.2}};
  const auto table = crossing_counts(one, pairs);
  CHECK(table.per_pair[0].directed_ab == 1);
  CHECK(table.per_pair[0].directed_ba == 0);

  // N_{A,B} = N_{A1,B} + N_{A2,B} for A = A1 | A2, on random configurations.
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    ChordConfiguration config;
    config.alpha = 1.0;
    const int n = static_cast<int>(rng.raw() % 20);
    for (int i = 0; i < n; ++i) config.chords.push_back({rng.angle(), rng.angle()});
    const ArcInterval A{0.0, 1.3}, A1{0.0, 0.6}, A2{0.6, 1.3}, B{2.0, 4.0};
    const std::vector<ArcPair> split = {{A, B, 1.0}, {A1, B, 1.0}, {A2, B, 1.0}};
    const auto counts = crossing_counts(config, split);
    CHECK(counts.per_pair[0].undirected() ==
          counts.per_pair[1].undirected() + counts.per_pair[2].undirected());
    CHECK(counts.per_pair[0].directed_ab ==
          counts.per_pair[1].directed_ab + counts.per_pair[2].directed_ab);
  }
}

TEST_CASE("crossing-count law: Poisson with mean lambda beta, independent pairs") {
  const std::vector<ArcPair> pairs = {
      {{0.0, kPi / 2.0}, {kPi, 1.5 * kPi}, 1.0},
      {{kPi / 2.0, kPi}, {1.5 * kPi, kTwoPi}, 1.0},
  };
  double betas[2];
  for (int p = 0; p < 2; ++p) betas[p] = beta_integral(pairs[static_cast<std::size_t>(p)]);

  const int reps = 30000;
  std::vector<long> hist[2];
  std::vector<double> counts0(reps), counts1(reps);
  for (int i = 0; i < reps; ++i) {
    Rng rng = Rng::for_replicate(19, static_cast<std::uint64_t>(i));
    const LineSample s = sample_plp(1.0, DiskWindow{1.0}, rng);
    const auto config = chords_from_lines(s, 1.0, &rng);
    const auto table = crossing_counts(config, pairs);
    for (int p = 0; p < 2; ++p) {
      const int c = table.per_pair[static_cast<std::size_t>(p)].undirected();
      auto& h = hist[p];
      if (static_cast<std::size_t>(c) >= h.size()) h.resize(static_cast<std::size_t>(c) + 1, 0);
      ++h[static_cast<std::size_t>(c)];
    }
    counts0[static_cast<std::size_t>(i)] = table.per_pair[0].undirected();
    counts1[static_cast<std::size_t>(i)] = table.per_pair[1].undirected();
  }
  for (int p = 0; p < 2; ++p) {
    stats::DiscreteDistribution emp;
    emp.p.assign(hist[p].size(), 0.0);
    for (std::size_t k = 0; k < hist[p].size(); ++k)
      emp.p[k] = static_cast<double>(hist[p][k]) / reps;
    const auto ref = stats::poisson_pmf(betas[p], static_cast<int>(hist[p].size()) - 1);
    CHECK(stats::tv_distance(emp, ref) < 0.03);
  }
  CHECK(std::abs(stats::correlation(counts0, counts1)) < 0.03);
}

TEST_CASE("transform_sample moves lines by plane isometries") {
  Rng rng(23);
  const LineSample s = sample_plp(1.0, DiskWindow{2.0}, rng);

  const LineSample same = transform_sample(s, 0.0, 0.0, 0.0, s.window);
  REQUIRE(same.lines.size() == s.lines.size());
  for (std::size_t i = 0; i < s.lines.size(); ++i) {
    CHECK(same.lines[i].r == s.lines[i].r);
    CHECK(same.lines[i].theta == s.lines[i].theta);
  }

  // Rotation by phi shifts every chord endpoint angle by phi.
  const double phi = 0.77;
  const LineSample rotated = transform_sample(s, phi, 0.0, 0.0, s.window);
  REQUIRE(rotated.lines.size() == s.lines.size());
  const auto base_chords = chords_from_lines(s, 1.5, nullptr);
  const auto rot_chords = chords_from_lines(rotated, 1.5, nullptr);
  REQUIRE(base_chords.chords.size() == rot_chords.chords.size());
  for (std::size_t i = 0; i < base_chords.chords.size(); ++i) {
    const double lo0 = std::min(base_chords.chords[i].entry, base_chords.chords[i].exit);
    const double lo1 = std::min(rot_chords.chords[i].entry, rot_chords.chords[i].exit);
    const double hi0 = std::max(base_chords.chords[i].entry, base_chords.chords[i].exit);
    const double hi1 = std::max(rot_chords.chords[i].entry, rot_chords.chords[i].exit);
    const bool shifted_lo = std::abs(wrap_signed(lo1 - lo0 - phi)) < 1e-9 ||
                            std::abs(wrap_signed(lo1 - hi0 - phi)) < 1e-9;
    const bool shifted_hi = std::abs(wrap_signed(hi1 - hi0 - phi)) < 1e-9 ||
                            std::abs(wrap_signed(hi1 - lo0 - phi)) < 1e-9;
    CHECK(shifted_lo);
    CHECK(shifted_hi);
  }

  // Translation along the x-axis changes offsets by t cos(theta).
  const LineSample moved = transform_sample(s, 0.0, 0.4, 0.0, DiskWindow{5.0});
  for (std::size_t i = 0; i < s.lines.size(); ++i) {
    CHECK(moved.lines[i].r ==
          doctest::Approx(s.lines[i].r + 0.4 * std::cos(s.lines[i].theta)).epsilon(1e-12));
  }
}

TEST_CASE("config_distance: metric cases and exact assignment") {
  ChordConfiguration f, g;
  f.alpha = g.alpha = 1.0;
  CHECK(config_distance(f, g) == 0.0);

  f.chords = {{0.0, kPi}};
  CHECK(config_distance(f, g) == kInfiniteDistance);

  g.chords = {{0.1, kPi}};
  CHECK(config_distance(f, g) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(config_distance(g, f) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(config_distance(f, f) == 0.0);

  // Exact DP equals the best over all 120 permutations at n = 5, and the
  // per-chord cost takes the cheaper endpoint matching.
  Rng rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    ChordConfiguration a, b;
    a.alpha = b.alpha = 1.0;
    for (int i = 0; i < 5; ++i) {
      a.chords.push_back({rng.angle(), rng.angle()});
      b.chords.push_back({rng.angle(), rng.angle()});
    }
    const double dp = config_distance(a, b);
    auto chord_cost = [&](const Chord& c, const Chord& d) {
      auto cd = [&](double u, double v) { return std::abs(wrap_signed(u - v)); };
      return std::min(cd(c.entry, d.entry) + cd(c.exit, d.exit),
                      cd(c.entry, d.exit) + cd(c.exit, d.entry));
    };
    std::array<int, 5> perm{0, 1, 2, 3, 4};
    double best = 1e100;
    do {
      double cost = 0.0;
      for (int i = 0; i < 5; ++i)
        cost += chord_cost(a.chords[static_cast<std::size_t>(i)],
                           b.chords[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
      best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(dp == doctest::Approx(best).epsilon(1e-12));
    CHECK(dp <= best + 1e-12);
  }

  // Triangle inequality on random triples in the exact regime.
  for (int trial = 0; trial < 1000; ++trial) {
    ChordConfiguration a, b, c;
    a.alpha = b.alpha = c.alpha = 1.0;
    for (int i = 0; i < 4; ++i) {
      a.chords.push_back({rng.angle(), rng.angle()});
      b.chords.push_back({rng.angle(), rng.angle()});
      c.chords.push_back({rng.angle(), rng.angle()});
    }
    CHECK(config_distance(a, c) <= config_distance(a, b) + config_distance(b, c) + 1e-12);
  }
}

TEST_CASE("CSV serialization of samples and configurations") {
  LineSample s;
  s.window = DiskWindow{1.0};
  s.lines = {{0.25, 0.5}, {-0.75, 2.0}};
  const std::string lines_csv = lines_to_csv(s, 7);
  CHECK(lines_csv == "7,0.25,0.5\n7,-0.75,2\n");

  ChordConfiguration config;
  config.alpha = 1.0;
  config.chords = {{3.0, 1.0}};
  const std::string chords_csv = chords_to_csv(config, 3);
  CHECK(chords_csv == "3,1,3,-1\n");
  config.chords = {{1.0, 3.0}};
  CHECK(chords_to_csv(config, 3) == "3,1,3,1\n");
}

TEST_CASE("greedy assignment stays close to optimal beyond the exact regime") {
  Rng rng(31);
  ChordConfiguration a, b;
  a.alpha = b.alpha = 1.0;
  for (int i = 0; i < 20; ++i) {
    const Chord c{rng.angle(), rng.angle()};
    a.chords.push_back(c);
    b.chords.push_back({wrap_angle(c.entry + 0.01), wrap_angle(c.exit - 0.01)});
  }
  // A small perturbation of a shared chord set: the refined greedy matching
  // must find the near-identity assignment.
  CHECK(config_distance(a, b) <= 20 * 0.02 + 1e-9);
}
