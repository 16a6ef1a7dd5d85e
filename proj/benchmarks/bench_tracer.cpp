#include <benchmark/benchmark.h>

#include "tesslab/experiments.hpp"
#include "tesslab/tessellation.hpp"
#include "tesslab/tracer.hpp"

namespace {

const tesslab::surf::Surface& surface() {
  static const tesslab::surf::Surface s = tesslab::surf::build_genus2_surface();
  return s;
}

void TraceGeodesic(benchmark::State& state) {
  const double T = static_cast<double>(state.range(0));
  std::uint64_t rep = 0;
  for (auto _ : state) {
    tesslab::Rng rng = tesslab::Rng::for_replicate(1, rep++);
    auto tr = tesslab::experiments::traced_replicate(surface(), rng, T);
    benchmark::DoNotOptimize(tr.arcs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(TraceGeodesic)->Arg(100)->Arg(500)->Arg(3000);

void SelfIntersections(benchmark::State& state) {
  tesslab::Rng rng = tesslab::Rng::for_replicate(2, 0);
  const auto tr =
      tesslab::experiments::traced_replicate(surface(), rng, static_cast<double>(state.range(0)));
  for (auto _ : state) {
    auto set = tesslab::trace::self_intersections(tr);
    benchmark::DoNotOptimize(set.vertices.data());
  }
}
BENCHMARK(SelfIntersections)->Arg(100)->Arg(300);

void SelfIntersectionsBrute(benchmark::State& state) {
  tesslab::Rng rng = tesslab::Rng::for_replicate(2, 0);
  const auto tr =
      tesslab::experiments::traced_replicate(surface(), rng, static_cast<double>(state.range(0)));
  for (auto _ : state) {
    auto set = tesslab::trace::self_intersections_bruteforce(tr);
    benchmark::DoNotOptimize(set.vertices.data());
  }
}
BENCHMARK(SelfIntersectionsBrute)->Arg(100)->Arg(300);

void DiskCrossings(benchmark::State& state) {
  tesslab::Rng rng = tesslab::Rng::for_replicate(3, 0);
  const auto tr = tesslab::experiments::traced_replicate(surface(), rng, 3000.0);
  for (auto _ : state) {
    auto rec = tesslab::trace::disk_crossings(surface(), tr, tesslab::hyp::HPoint::origin(), 10.0);
    benchmark::DoNotOptimize(rec.chords.data());
  }
}
BENCHMARK(DiskCrossings);

void SurfaceMapFromTrace(benchmark::State& state) {
  tesslab::Rng rng = tesslab::Rng::for_replicate(4, 0);
  const auto tr =
      tesslab::experiments::traced_replicate(surface(), rng, static_cast<double>(state.range(0)));
  const auto inters = tesslab::trace::self_intersections(tr);
  for (auto _ : state) {
    auto map = tesslab::tess::surface_map_from_trace(tr, inters);
    benchmark::DoNotOptimize(map.faces.data());
  }
}
BENCHMARK(SurfaceMapFromTrace)->Arg(300);

}  // namespace
