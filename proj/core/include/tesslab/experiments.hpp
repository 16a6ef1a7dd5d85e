#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tesslab/config.hpp"
#include "tesslab/plp.hpp"
#include "tesslab/stats.hpp"
#include "tesslab/surface.hpp"
#include "tesslab/tracer.hpp"

namespace tesslab::experiments {

inline constexpr const char* kVersion = "tesslab 0.1.0";

struct Metric {
  std::string name;
  double estimate = 0.0;
  double stderr_est = 0.0;
  double reference = 0.0;
  std::string provenance;  // "formula" | "oracle" | "exact"
  double tolerance = 0.0;  // absolute
  bool pass = true;
};

struct ExperimentReport {
  std::string experiment;
  std::string version = kVersion;
  std::uint64_t seed = 0;
  long replicates = 0;
  std::vector<Metric> metrics;
  std::vector<std::string> files;
  double wall_clock_sec = 0.0;  // excluded from the determinism contract

  bool all_pass() const;
  const Metric* find(const std::string& name) const;
  std::string to_json(bool include_wall_clock = true) const;
  static ExperimentReport from_json(const std::string& text);
};

struct ExperimentResult {
  ExperimentReport report;
  std::string raw_csv;
};

/// Run fn(0..n-1) on a bounded worker pool. Replicate results must be
/// written to index-addressed slots; scheduling order never affects output.
void parallel_for(long n, int workers, const std::function<void(long)>& fn);

/// Per-replicate stream for a given experiment lane.
Rng lane_rng(std::uint64_t master, std::uint64_t lane, std::uint64_t replicate);

/// Liouville-started trace with deterministic retry on degenerate starts.
trace::GeodesicTrace traced_replicate(const surf::Surface& surface, Rng& rng, double T);

/// Shared quarter-circle arc-pair family (three disjoint line sets).
std::vector<plp::ArcPair> default_arc_pairs(double alpha);

/// Triangle fraction of the interior faces of a large-window realization
/// (the derived reference the window runs are compared against). Fixed
/// internal seed; cached after the first call.
double large_window_triangle_fraction();

/// Scaled side-length histogram of a PLP window census with side lengths
/// multiplied by `scale` (fixed bin contract).
stats::Histogram plp_side_length_reference(double scale, std::uint64_t seed, int seeds);

ExperimentResult run_plp_sanity(const ExperimentConfig& cfg);
ExperimentResult run_local_convergence(const ExperimentConfig& cfg);
ExperimentResult run_two_point(const ExperimentConfig& cfg);
ExperimentResult run_global(const ExperimentConfig& cfg);
/// Self-intersection density sweep (v_T / T^2 against the closed form).
ExperimentResult run_selfint(const ExperimentConfig& cfg);

/// Dispatch by cfg.experiment ("plp-sanity", "local", "two-point",
/// "global", "selfint"). Throws ConfigError for unknown names.
ExperimentResult run_by_name(const ExperimentConfig& cfg);

/// Persist config echo, raw.csv, report.json and the experiment's plots
/// under <out>/<experiment>/<label>/. Returns the directory written.
std::string write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

/// Re-render the plots of a written experiment directory from its raw.csv.
/// Throws std::runtime_error when raw data is missing.
std::vector<std::string> emit_plots(const std::string& results_dir);

/// Fixed bin contracts for cross-run comparability.
stats::Histogram side_length_bins();
stats::Histogram angle_bins();

}  // namespace tesslab::experiments
