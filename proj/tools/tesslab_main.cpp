// tesslab: Poisson line processes vs long geodesics on the genus-2 surface.
//
// Exit codes: 0 all checks passed, 1 usage/config error, 2 at least one
// experiment metric breached its threshold.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tesslab/experiments.hpp"
#include "tesslab/tessellation.hpp"

namespace {

using tesslab::ConfigError;
using tesslab::ExperimentConfig;

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitThreshold = 2;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<long> replicates;
  std::optional<double> alpha;
  std::optional<double> lambda;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  std::optional<std::string> label;
  std::optional<std::vector<double>> T_list;
  std::optional<long> traces;
  std::optional<double> trace_T;
  int verbosity = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config file (key = value)");
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--replicates", flags.replicates, "Monte Carlo replicates");
  cmd->add_option("--alpha", flags.alpha, "scaled disk radius");
  cmd->add_option("--lambda", flags.lambda, "line process intensity");
  cmd->add_option("--workers", flags.workers, "worker pool size");
  cmd->add_option("--out", flags.out_dir, "output directory (default $TESSLAB_OUT or results/)");
  cmd->add_option("--label", flags.label, "run label under the output directory");
  cmd->add_option("--T", flags.T_list, "geodesic length list")->delimiter(',');
  cmd->add_option("--traces", flags.traces, "trace count for tessellation experiments");
  cmd->add_option("--trace-T", flags.trace_T, "trace length for tessellation experiments");
  cmd->add_flag("-v,--verbose", flags.verbosity, "print metric table to stdout");
}

ExperimentConfig resolve(const CommonFlags& flags, const std::string& experiment) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = ExperimentConfig::parse_file(flags.config_path);
  cfg.experiment = experiment;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.replicates) cfg.replicates = *flags.replicates;
  if (flags.alpha) cfg.alpha = *flags.alpha;
  if (flags.lambda) cfg.lambda = *flags.lambda;
  if (flags.workers) cfg.workers = *flags.workers;
  if (flags.out_dir) cfg.out_dir = *flags.out_dir;
  if (flags.label) cfg.label = *flags.label;
  if (flags.T_list && !flags.T_list->empty()) cfg.T_list = *flags.T_list;
  if (flags.traces) cfg.traces = *flags.traces;
  if (flags.trace_T) cfg.trace_T = *flags.trace_T;
  if (cfg.replicates < 1) throw ConfigError("replicates must be >= 1");
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  for (double t : cfg.T_list)
    if (t <= 0.0) throw ConfigError("T must be positive");
  return cfg;
}

int print_and_exit(const ExperimentConfig& cfg, const tesslab::experiments::ExperimentResult& result,
                   int verbosity) {
  const std::string dir = tesslab::experiments::write_outputs(cfg, result);
  for (const auto& m : result.report.metrics) {
    if (verbosity > 0) {
      std::printf("%-6s %-32s est=%.6g stderr=%.3g ref=%.6g tol=%.3g [%s]\n",
                  m.pass ? "PASS" : "FAIL", m.name.c_str(), m.estimate, m.stderr_est, m.reference,
                  m.tolerance, m.provenance.c_str());
    } else {
      std::printf("%-6s %-32s est=%.6g ref=%.6g tol=%.3g\n", m.pass ? "PASS" : "FAIL",
                  m.name.c_str(), m.estimate, m.reference, m.tolerance);
    }
  }
  std::printf("report: %s/report.json\n", dir.c_str());
  return result.report.all_pass() ? kExitPass : kExitThreshold;
}

int run_experiment(const CommonFlags& flags, const std::string& experiment) {
  const ExperimentConfig cfg = resolve(flags, experiment);
  return print_and_exit(cfg, tesslab::experiments::run_by_name(cfg), flags.verbosity);
}

int parse_arc(const std::string& text, double& lo, double& hi) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return -1;
  try {
    lo = std::stod(text.substr(0, colon));
    hi = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    return -1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson line process laboratory for geodesic tessellations"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);  // usage text on bad invocations

  CommonFlags flags;

  auto* plp_cmd = app.add_subcommand("plp-sanity", "line-process law battery (hitting counts, "
                                                   "intensities, crossing counts, window densities)");
  add_common(plp_cmd, flags);

  auto* local_cmd = app.add_subcommand("local", "local convergence of disk crossings to the "
                                                "limiting line process");
  add_common(local_cmd, flags);

  auto* two_cmd = app.add_subcommand("two-point", "independence of crossing counts at two disks");
  add_common(two_cmd, flags);
  double second_x = 0.46, second_y = 0.0;
  two_cmd->add_option("--x2", second_x, "second center x (disk coordinates)");
  two_cmd->add_option("--y2", second_y, "second center y (disk coordinates)");

  auto* global_cmd = app.add_subcommand("global", "tessellation census of traced geodesics vs the "
                                                  "line-process reference");
  add_common(global_cmd, flags);

  auto* selfint_cmd = app.add_subcommand("selfint", "self-intersection density sweep");
  add_common(selfint_cmd, flags);

  auto* surface_cmd = app.add_subcommand("surface-info", "print the genus-2 surface summary");
  bool surface_json = false;
  surface_cmd->add_flag("--json", surface_json, "print the full JSON document");

  auto* beta_cmd = app.add_subcommand("beta", "print the crossing measure of an arc pair");
  std::string arc_a = "-0.2:0.2", arc_b;
  double beta_alpha = 1.0;
  beta_cmd->add_option("--alpha", beta_alpha, "circle radius")->required();
  beta_cmd->add_option("--arc-a", arc_a, "first arc lo:hi (radians)")->required();
  beta_cmd->add_option("--arc-b", arc_b, "second arc lo:hi (radians)")->required();

  auto* trace_cmd = app.add_subcommand("trace", "dump one geodesic trace as JSON");
  std::uint64_t trace_seed = 1;
  double trace_T = 50.0;
  std::string trace_out;
  trace_cmd->add_option("--seed", trace_seed, "replicate seed");
  trace_cmd->add_option("--T", trace_T, "trace length");
  trace_cmd->add_option("--out", trace_out, "output file (stdout when omitted)");

  auto* plot_cmd = app.add_subcommand("plot", "re-render plots for a written experiment directory");
  std::string plot_dir;
  plot_cmd->add_option("--in", plot_dir, "experiment results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (plp_cmd->parsed()) return run_experiment(flags, "plp-sanity");
    if (local_cmd->parsed()) return run_experiment(flags, "local");
    if (two_cmd->parsed()) {
      ExperimentConfig cfg = resolve(flags, "two-point");
      cfg.second_center_x = second_x;
      cfg.second_center_y = second_y;
      return print_and_exit(cfg, tesslab::experiments::run_two_point(cfg), flags.verbosity);
    }
    if (global_cmd->parsed()) return run_experiment(flags, "global");
    if (selfint_cmd->parsed()) return run_experiment(flags, "selfint");

    if (surface_cmd->parsed()) {
      const auto surface = tesslab::surf::build_genus2_surface();
      if (surface_json) {
        std::printf("%s\n", surface.to_json().c_str());
      } else {
        std::printf("genus            2\n");
        std::printf("area             %.6f\n", surface.area());
        std::printf("kappa            %.7f\n", surface.kappa());
        std::printf("injectivity      %.6f\n", surface.injectivity_radius());
        std::printf("circumradius     %.6f\n", surface.octagon().circumradius);
        std::printf("apothem          %.6f\n", surface.octagon().apothem);
      }
      return kExitPass;
    }

    if (beta_cmd->parsed()) {
      double a0, a1, b0, b1;
      if (parse_arc(arc_a, a0, a1) != 0 || parse_arc(arc_b, b0, b1) != 0)
        throw ConfigError("beta: arcs must be given as lo:hi");
      const tesslab::plp::ArcPair pair{{a0, a1}, {b0, b1}, beta_alpha};
      std::printf("beta = %.9f\n", tesslab::plp::beta_integral(pair));
      return kExitPass;
    }

    if (trace_cmd->parsed()) {
      const auto surface = tesslab::surf::build_genus2_surface();
      tesslab::Rng rng = tesslab::Rng::for_replicate(trace_seed, 0);
      auto tr = tesslab::experiments::traced_replicate(surface, rng, trace_T);
      tr.seed = trace_seed;
      const auto inters = tesslab::trace::self_intersections(tr);
      const std::string dump = tesslab::trace::trace_to_json(tr, inters);
      if (trace_out.empty()) {
        std::printf("%s\n", dump.c_str());
      } else {
        FILE* f = std::fopen(trace_out.c_str(), "wb");
        if (!f) throw ConfigError("trace: cannot open " + trace_out);
        std::fputs(dump.c_str(), f);
        std::fputs("\n", f);
        std::fclose(f);
      }
      return kExitPass;
    }

    if (plot_cmd->parsed()) {
      for (const auto& f : tesslab::experiments::emit_plots(plot_dir)) std::printf("wrote %s\n", f.c_str());
      return kExitPass;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error[config]: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
