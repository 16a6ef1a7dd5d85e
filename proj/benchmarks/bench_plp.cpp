#include <benchmark/benchmark.h>

#include "tesslab/experiments.hpp"
#include "tesslab/plp.hpp"
#include "tesslab/tessellation.hpp"

namespace {

void SampleAndCount(benchmark::State& state) {
  const auto pairs = tesslab::experiments::default_arc_pairs(1.0);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    tesslab::Rng rng = tesslab::Rng::for_replicate(10, rep++);
    const auto sample = tesslab::plp::sample_plp(1.0, tesslab::plp::DiskWindow{1.0}, rng);
    const auto config = tesslab::plp::chords_from_lines(sample, 1.0, &rng);
    auto table = tesslab::plp::crossing_counts(config, pairs);
    benchmark::DoNotOptimize(table.per_pair.data());
  }
}
BENCHMARK(SampleAndCount);

void BetaIntegral(benchmark::State& state) {
  const auto pairs = tesslab::experiments::default_arc_pairs(10.0);
  for (auto _ : state) {
    double total = 0.0;
    for (const auto& p : pairs) total += tesslab::plp::beta_integral(p);
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BetaIntegral);

void WindowArrangement(benchmark::State& state) {
  const double n = static_cast<double>(state.range(0));
  tesslab::Rng rng = tesslab::Rng::for_replicate(11, 0);
  const tesslab::plp::Window window{tesslab::plp::SquareWindow{n}};
  const auto sample = tesslab::plp::sample_plp(1.0, window, rng);
  const auto segments = tesslab::tess::clip_lines(sample);
  for (auto _ : state) {
    auto arr = tesslab::tess::build_arrangement(segments, window);
    benchmark::DoNotOptimize(arr.faces.data());
  }
  state.SetLabel(std::to_string(segments.size()) + " chords");
}
BENCHMARK(WindowArrangement)->Arg(10)->Arg(25);

void ConfigDistance(benchmark::State& state) {
  tesslab::Rng rng(12);
  tesslab::plp::ChordConfiguration f, g;
  f.alpha = g.alpha = 1.0;
  for (int i = 0; i < state.range(0); ++i) {
    f.chords.push_back({rng.angle(), rng.angle()});
    g.chords.push_back({rng.angle(), rng.angle()});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(tesslab::plp::config_distance(f, g));
  }
}
BENCHMARK(ConfigDistance)->Arg(8)->Arg(12)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
