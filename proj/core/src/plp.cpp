#include "tesslab/plp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "tesslab/hypgeom.hpp"  // angle helpers

namespace tesslab::plp {

using hyp::kPi;
using hyp::kTwoPi;
using hyp::wrap_angle;

bool ArcInterval::contains(double ang) const {
  const double rel = wrap_angle(ang - a0);
  return rel < width();
}

double ArcInterval::width() const {
  if (a1 == a0 + kTwoPi) return kTwoPi;
  const double w = wrap_angle(a1 - a0);
  return (w == 0.0 && a1 != a0) ? kTwoPi : w;
}

bool line_meets(const Window& w, const Line& line) {
  if (std::holds_alternative<DiskWindow>(w)) {
    return std::abs(line.r) <= std::get<DiskWindow>(w).radius;
  }
  const double n = std::get<SquareWindow>(w).half_side;
  return std::abs(line.r) <= n * (std::abs(std::cos(line.theta)) + std::abs(std::sin(line.theta)));
}

LineSample sample_plp(double lambda, const Window& window, Rng& rng) {
  if (lambda < 0.0) throw std::invalid_argument("sample_plp: negative intensity");
  LineSample out;
  out.intensity = lambda;
  out.window = window;
  if (lambda == 0.0) return out;
  const double bound = std::holds_alternative<DiskWindow>(window)
                           ? std::get<DiskWindow>(window).radius
                           : std::get<SquareWindow>(window).half_side * std::sqrt(2.0);
  const int n = rng.poisson(2.0 * lambda * bound);
  out.lines.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Line line{rng.uniform(-bound, bound), rng.uniform(0.0, kPi)};
    if (line_meets(window, line)) out.lines.push_back(line);
  }
  return out;
}

LineSample transform_sample(const LineSample& sample, double rot_angle, double tx, double ty,
                            const Window& reclip) {
  LineSample out;
  out.intensity = sample.intensity;
  out.window = reclip;
  out.lines.reserve(sample.lines.size());
  for (const Line& l : sample.lines) {
    double theta = l.theta + rot_angle;
    double r = l.r;
    theta = std::fmod(theta, kTwoPi);
    if (theta < 0.0) theta += kTwoPi;
    if (theta >= kPi) {
      theta -= kPi;
      r = -r;
    }
    r += tx * std::cos(theta) + ty * std::sin(theta);
    const Line moved{r, theta};
    if (line_meets(reclip, moved)) out.lines.push_back(moved);
  }
  return out;
}

namespace {

struct Interval {
  double lo, hi;
};

/// Clip the circular interval [start, start + width] (angles mod 2pi) to
/// the linear range [0, pi]; appends at most two pieces.
void clip_to_half_turn(double start, double width, std::vector<Interval>& out) {
  if (width <= 0.0) return;
  if (width >= kTwoPi) {
    out.push_back({0.0, kPi});
    return;
  }
  double s = wrap_angle(start);
  double pieces[2][2];
  int n = 0;
  if (s + width <= kTwoPi) {
    pieces[n][0] = s;
    pieces[n][1] = s + width;
    ++n;
  } else {
    pieces[n][0] = s;
    pieces[n][1] = kTwoPi;
    ++n;
    pieces[n][0] = 0.0;
    pieces[n][1] = s + width - kTwoPi;
    ++n;
  }
  for (int i = 0; i < n; ++i) {
    const double lo = std::max(pieces[i][0], 0.0);
    const double hi = std::min(pieces[i][1], kPi);
    if (hi > lo) out.push_back({lo, hi});
  }
}

/// Offset measure of the chord-parameter set {a : phi + a in P, phi - a in Q}
/// mapped through r = alpha cos(a).
double directed_measure(const ArcInterval& P, const ArcInterval& Q, double alpha, double phi) {
  std::vector<Interval> from_p, from_q;
  from_p.reserve(2);
  from_q.reserve(2);
  // phi + a in P  <=>  a in [P.a0 - phi, +width]
  clip_to_half_turn(P.a0 - phi, P.width(), from_p);
  // phi - a in Q  <=>  a in [phi - Q.a0 - width, +width]
  clip_to_half_turn(phi - Q.a0 - Q.width(), Q.width(), from_q);
  double measure = 0.0;
  for (const Interval& p : from_p) {
    for (const Interval& q : from_q) {
      const double lo = std::max(p.lo, q.lo);
      const double hi = std::min(p.hi, q.hi);
      if (hi > lo) measure += alpha * (std::cos(lo) - std::cos(hi));
    }
  }
  return measure;
}

double adaptive_simpson(const ArcPair& pair, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = beta_offset_measure(pair, lm);
  const double frm = beta_offset_measure(pair, rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(pair, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(pair, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double beta_offset_measure(const ArcPair& pair, double phi) {
  return directed_measure(pair.A, pair.B, pair.alpha, phi) +
         directed_measure(pair.B, pair.A, pair.alpha, phi);
}

double beta_integral(const ArcPair& pair) {
  if (pair.A.width() <= 0.0 || pair.B.width() <= 0.0) return 0.0;
  // Pre-split into panels so the adaptive pass only has to resolve the few
  // kinks of the offset measure inside a panel.
  const int panels = 64;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = kPi * i / panels;
    const double b = kPi * (i + 1) / panels;
    const double m = 0.5 * (a + b);
    const double fa = beta_offset_measure(pair, a);
    const double fm = beta_offset_measure(pair, m);
    const double fb = beta_offset_measure(pair, b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total += adaptive_simpson(pair, a, b, fa, fm, fb, whole, 1e-10, 40);
  }
  return total / kPi;
}

ChordConfiguration chords_from_lines(const LineSample& sample, double alpha, Rng* rng) {
  ChordConfiguration config;
  config.alpha = alpha;
  for (const Line& l : sample.lines) {
    if (std::abs(l.r) >= alpha) continue;
    const double a = std::acos(l.r / alpha);
    double y = wrap_angle(l.theta + a);
    double z = wrap_angle(l.theta - a);
    const bool swap = rng ? (rng->uniform() < 0.5) : (y > z);
    if (swap) std::swap(y, z);
    config.chords.push_back({y, z});
  }
  return config;
}

namespace {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string lines_to_csv(const LineSample& sample, long replicate) {
  std::string out;
  for (const Line& l : sample.lines) {
    out += std::to_string(replicate);
    out += ",";
    out += fmt_num(l.r);
    out += ",";
    out += fmt_num(l.theta);
    out += "\n";
  }
  return out;
}

std::string chords_to_csv(const ChordConfiguration& config, long replicate) {
  std::string out;
  for (const Chord& c : config.chords) {
    const bool stored_order = c.entry <= c.exit;
    out += std::to_string(replicate);
    out += ",";
    out += fmt_num(std::min(c.entry, c.exit));
    out += ",";
    out += fmt_num(std::max(c.entry, c.exit));
    out += ",";
    out += stored_order ? "1" : "-1";
    out += "\n";
  }
  return out;
}

CrossingCountTable crossing_counts(const ChordConfiguration& config, std::span<const ArcPair> pairs) {
  CrossingCountTable table;
  table.per_pair.resize(pairs.size());
  for (const Chord& c : config.chords) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const ArcPair& p = pairs[i];
      if (p.A.contains(c.entry) && p.B.contains(c.exit)) {
        ++table.per_pair[i].directed_ab;
      } else if (p.B.contains(c.entry) && p.A.contains(c.exit)) {
        ++table.per_pair[i].directed_ba;
      }
    }
  }
  return table;
}

namespace {

double circle_dist(double a, double b, double alpha) {
  const double d = std::abs(hyp::wrap_signed(a - b));
  return alpha * d;
}

double chord_cost(const Chord& c, const Chord& d, double alpha) {
  const double straight = circle_dist(c.entry, d.entry, alpha) + circle_dist(c.exit, d.exit, alpha);
  const double crossed = circle_dist(c.entry, d.exit, alpha) + circle_dist(c.exit, d.entry, alpha);
  return std::min(straight, crossed);
}

double assignment_exact(const std::vector<double>& cost, int n) {
  const std::size_t full = std::size_t{1} << n;
  std::vector<double> dp(full, kInfiniteDistance);
  dp[0] = 0.0;
  for (std::size_t mask = 0; mask < full; ++mask) {
    if (dp[mask] == kInfiniteDistance) continue;
    const int row = std::popcount(mask);
    if (row >= n) continue;
    for (int col = 0; col < n; ++col) {
      if (mask & (std::size_t{1} << col)) continue;
      const std::size_t next = mask | (std::size_t{1} << col);
      const double cand = dp[mask] + cost[static_cast<std::size_t>(row) * n + col];
      if (cand < dp[next]) dp[next] = cand;
    }
  }
  return dp[full - 1];
}

double assignment_greedy_refine(const std::vector<double>& cost, int n) {
  std::vector<int> assign(n, -1);
  std::vector<bool> used(n, false);
  for (int row = 0; row < n; ++row) {
    double best = kInfiniteDistance;
    int pick = -1;
    for (int col = 0; col < n; ++col) {
      if (!used[col] && cost[static_cast<std::size_t>(row) * n + col] < best) {
        best = cost[static_cast<std::size_t>(row) * n + col];
        pick = col;
      }
    }
    assign[row] = pick;
    used[pick] = true;
  }
  // Pair-swap refinement until no single swap improves the total.
  bool improved = true;
  int passes = 0;
  while (improved && passes++ < 64) {
    improved = false;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double cur = cost[static_cast<std::size_t>(i) * n + assign[i]] +
                           cost[static_cast<std::size_t>(j) * n + assign[j]];
        const double alt = cost[static_cast<std::size_t>(i) * n + assign[j]] +
                           cost[static_cast<std::size_t>(j) * n + assign[i]];
        if (alt < cur - 1e-15) {
          std::swap(assign[i], assign[j]);
          improved = true;
        }
      }
    }
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += cost[static_cast<std::size_t>(i) * n + assign[i]];
  return total;
}

}  // namespace

double config_distance(const ChordConfiguration& f, const ChordConfiguration& g) {
  if (f.chords.size() != g.chords.size()) return kInfiniteDistance;
  const int n = static_cast<int>(f.chords.size());
  if (n == 0) return 0.0;
  std::vector<double> cost(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cost[static_cast<std::size_t>(i) * n + j] = chord_cost(f.chords[i], g.chords[j], f.alpha);
  return (n <= 12) ? assignment_exact(cost, n) : assignment_greedy_refine(cost, n);
}

}  // namespace tesslab::plp
