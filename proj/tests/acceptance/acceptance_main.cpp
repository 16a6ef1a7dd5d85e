// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Thresholds and sample sizes are pinned here, not
// configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "tesslab/experiments.hpp"
#include "tesslab/plp.hpp"
#include "tesslab/stats.hpp"
#include "tesslab/surface.hpp"
#include "tesslab/tessellation.hpp"

using namespace tesslab;
using namespace tesslab::experiments;

namespace {

constexpr std::uint64_t kSeed = 20260808ULL;
constexpr double kPi = hyp::kPi;

int workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::max(1u, std::min(hw, 8u)));
}

struct Criterion {
  int id;
  std::string name;
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

std::vector<Criterion> g_results;

class Scope {
 public:
  Scope(int id, std::string name) : start_(std::chrono::steady_clock::now()) {
    crit_.id = id;
    crit_.name = std::move(name);
  }
  void expect(bool ok, const std::string& what) {
    if (!ok) crit_.pass = false;
    crit_.detail += (crit_.detail.empty() ? "" : "; ") + what + (ok ? "" : " [FAILED]");
  }
  void expect_metric(const ExperimentReport& rep, const std::string& metric) {
    const Metric* m = rep.find(metric);
    if (!m) {
      crit_.pass = false;
      crit_.detail += "; missing metric " + metric;
      return;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s=%.5g (ref %.5g tol %.3g)", metric.c_str(), m->estimate,
                  m->reference, m->tolerance);
    expect(m->pass, buf);
  }
  ~Scope() {
    crit_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::printf("%s  criterion %2d  %-28s (%.1fs)\n", crit_.pass ? "PASS" : "FAIL", crit_.id,
                crit_.name.c_str(), crit_.seconds);
    if (!crit_.detail.empty()) std::printf("      %s\n", crit_.detail.c_str());
    std::fflush(stdout);
    g_results.push_back(crit_);
  }

 private:
  Criterion crit_;
  std::chrono::steady_clock::time_point start_;
};

ExperimentConfig base_config() {
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  cfg.workers = workers();
  cfg.lambda = 1.0;
  cfg.window_half_side = 25.0;
  return cfg;
}

}  // namespace

int main() {
  std::printf("acceptance suite, seed %llu, %d workers\n\n",
              static_cast<unsigned long long>(kSeed), workers());

  // Criteria 1, 2, 3, 5, 6, 7 all come from the line-process battery at
  // 1e5 replicates (vertex intensity uses 2e4, window densities 20 seeds).
  ExperimentConfig plp_cfg = base_config();
  plp_cfg.experiment = "plp-sanity";
  plp_cfg.replicates = 100000;
  ExperimentResult plp;
  {
    const auto t0 = std::chrono::steady_clock::now();
    plp = run_plp_sanity(plp_cfg);
    std::printf("      [plp battery computed in %.1fs]\n",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  {
    Scope c(1, "line hitting law");
    c.expect_metric(plp.report, "hitting_count_mean");
    c.expect_metric(plp.report, "hitting_count_tv");
  }
  {
    Scope c(2, "fixed-line intensity 2/pi");
    c.expect_metric(plp.report, "xaxis_intensity");
  }
  {
    Scope c(3, "crossing-count characterization");
    c.expect_metric(plp.report, "crossing_tv_pair1");
    c.expect_metric(plp.report, "crossing_tv_pair2");
    c.expect_metric(plp.report, "crossing_tv_pair3");
    c.expect_metric(plp.report, "pair_corr_12");
    c.expect_metric(plp.report, "pair_corr_13");
    c.expect_metric(plp.report, "pair_corr_23");
  }
  {
    Scope c(4, "beta consistency");
    const int m = 64;
    const double alpha = 1.0;
    std::vector<plp::ArcInterval> arcs;
    for (int i = 0; i < m; ++i)
      arcs.push_back({2.0 * kPi * i / m, 2.0 * kPi * (i + 1) / m});
    double total = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        total += plp::beta_integral({arcs[static_cast<std::size_t>(i)],
                                     arcs[static_cast<std::size_t>(j)], alpha});
    char buf[96];
    std::snprintf(buf, sizeof(buf), "sum beta = %.6f over [%.2f, %.2f]", total, 2.0 * alpha * 0.99,
                  2.0 * alpha);
    c.expect(total >= 2.0 * alpha * 0.99 && total <= 2.0 * alpha, buf);

    const plp::ArcPair pair{{0.1, 0.9}, {2.5, 3.6}, 1.0};
    const plp::ArcPair scaled{{0.1, 0.9}, {2.5, 3.6}, 3.0};
    const double gap = std::abs(plp::beta_integral(scaled) - 3.0 * plp::beta_integral(pair));
    std::snprintf(buf, sizeof(buf), "alpha-linearity gap = %.2e", gap);
    c.expect(gap < 1e-6, buf);
  }
  {
    Scope c(5, "vertex intensity in the unit square");
    c.expect_metric(plp.report, "vertex_intensity_unit_square");
  }
  {
    Scope c(6, "ergodic window densities");
    c.expect_metric(plp.report, "face_density");
    c.expect_metric(plp.report, "vertex_density");
    c.expect_metric(plp.report, "arrangement_euler_failures");
  }
  {
    Scope c(7, "triangle fraction vs large-window reference");
    c.expect_metric(plp.report, "triangle_fraction");
  }
  {
    Scope c(8, "law of small numbers");
    bool monotone = true;
    double final_gap = 0.0;
    for (double beta : {1.0, 2.0}) {
      double last = 1e100;
      for (double p : {0.1, 0.01, 0.001}) {
        const int n = static_cast<int>(std::lround(beta / p));
        const std::vector<double> ps(static_cast<std::size_t>(n), p);
        const double gap =
            stats::l1_distance(stats::bernoulli_sum_distribution(ps), stats::poisson_pmf(beta, n));
        if (gap > last) monotone = false;
        last = gap;
      }
      final_gap = std::max(final_gap, last);
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "l1 gaps non-increasing, final %.2e", final_gap);
    c.expect(monotone, buf);

    const int n = 500;
    std::vector<std::vector<double>> probs(static_cast<std::size_t>(n), {0.004, 0.004});
    const auto joint = stats::multinomial_occupancy_distribution(probs);
    const double means[] = {2.0, 2.0};
    const double gap2 = stats::joint_l1(joint, stats::product_of_poissons(means, joint.size_per_dim));
    std::snprintf(buf, sizeof(buf), "K=2 joint l1 gap = %.4f (< 0.02)", gap2);
    c.expect(gap2 < 0.02, buf);
  }
  {
    Scope c(9, "surface construction");
    const surf::Surface s = surf::build_genus2_surface();  // relator checked in the builder
    char buf[96];
    std::snprintf(buf, sizeof(buf), "quadrature area gap = %.2e", std::abs(s.octagon().area_quadrature - 4.0 * kPi));
    c.expect(std::abs(s.octagon().area_quadrature - 4.0 * kPi) <= 1e-6, buf);
    c.expect(s.kappa() == 1.0 / s.area(), "kappa stored exactly as 1/area");
    c.expect(std::abs(s.kappa() - 1.0 / (4.0 * kPi)) < 1e-15, "kappa = 1/(4 pi)");
    c.expect(s.injectivity_radius() > 0.0, "injectivity radius positive");
  }
  {
    Scope c(10, "self-intersection density");
    ExperimentConfig cfg = base_config();
    cfg.experiment = "selfint";
    cfg.traces = 100;
    cfg.trace_T = 300.0;
    const ExperimentResult si = run_selfint(cfg);
    ExperimentConfig gcfg = base_config();
    gcfg.experiment = "global";
    gcfg.traces = 100;
    gcfg.trace_T = 300.0;
    const ExperimentResult gl = run_global(gcfg);
    c.expect_metric(si.report, "v_density");
    c.expect_metric(si.report, "e_2v_violations");
    c.expect_metric(si.report, "v_bound_violations");
    c.expect_metric(si.report, "tangential_flags");
    c.expect_metric(gl.report, "map_euler_violations");
    const Metric* sep = si.report.find("min_vertex_separation");
    c.expect(sep != nullptr && sep->pass, "no multiple points at numeric scale");
    const Metric* nc = si.report.find("near_coincidence_rate_1e7");
    if (nc != nullptr) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "near-coincidences below 1e-7: %.3f per trace (logged)",
                    nc->estimate);
      c.expect(true, buf);
    }
  }
  ExperimentConfig local_cfg = base_config();
  local_cfg.experiment = "local";
  local_cfg.replicates = 2000;
  local_cfg.alpha = 10.0;
  local_cfg.T_list = {500.0, 1500.0, 3000.0};
  {
    Scope c(11, "local limit law");
    const ExperimentResult local = run_local_convergence(local_cfg);
    c.expect_metric(local.report, "total_mean_T3000");
    c.expect_metric(local.report, "directed_tv_pair1_T3000");
    c.expect_metric(local.report, "directed_tv_pair2_T3000");
    c.expect_metric(local.report, "directed_tv_pair3_T3000");
    c.expect_metric(local.report, "tv_trend_overall_drop");
    c.expect_metric(local.report, "tv_trend_max_rise");
  }
  {
    Scope c(12, "two-point independence");
    ExperimentConfig cfg = base_config();
    cfg.experiment = "two-point";
    cfg.replicates = 2000;
    cfg.alpha = 10.0;
    cfg.T_list = {3000.0};
    const ExperimentResult two = run_two_point(cfg);
    c.expect_metric(two.report, "count_correlation");
    c.expect_metric(two.report, "double_hit_mean");
    c.expect_metric(two.report, "marginal_tv_x");
    c.expect_metric(two.report, "marginal_tv_x2");
  }
  {
    Scope c(13, "global tessellation statistics");
    ExperimentConfig cfg = base_config();
    cfg.experiment = "global";
    cfg.traces = 50;
    cfg.trace_T = 400.0;
    const ExperimentResult gl = run_global(cfg);
    c.expect_metric(gl.report, "triangle_fraction");
    c.expect_metric(gl.report, "side_length_chisq_p");
    c.expect_metric(gl.report, "v_density");
    c.expect_metric(gl.report, "e_density");
    c.expect_metric(gl.report, "f_density");
  }
  {
    Scope c(14, "reproducibility");
    ExperimentConfig cfg = base_config();
    cfg.experiment = "plp-sanity";
    cfg.replicates = 2000;
    cfg.workers = 1;
    const ExperimentResult a = run_plp_sanity(cfg);
    cfg.workers = workers();
    const ExperimentResult b = run_plp_sanity(cfg);
    c.expect(a.raw_csv == b.raw_csv, "raw data invariant to worker count");
    c.expect(a.report.to_json(false) == b.report.to_json(false),
             "report invariant to worker count (wall clock excluded)");

    ExperimentConfig lc = base_config();
    lc.experiment = "local";
    lc.replicates = 50;
    lc.T_list = {60.0};
    lc.alpha = 4.0;
    lc.workers = 1;
    const ExperimentResult la = run_local_convergence(lc);
    lc.workers = workers();
    const ExperimentResult lb = run_local_convergence(lc);
    c.expect(la.raw_csv == lb.raw_csv, "trace raw data invariant to worker count");
  }

  int failed = 0;
  for (const auto& crit : g_results)
    if (!crit.pass) ++failed;
  std::printf("\n%d of %zu criteria passed\n", static_cast<int>(g_results.size()) - failed,
              g_results.size());
  return failed == 0 ? 0 : 1;
}
