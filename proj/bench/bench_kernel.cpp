// Serial reference vs OpenMP kernel evaluation on a fixed ball.

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "bergman/kernel.hpp"

namespace {

using namespace bergman;

struct Fixture {
  SurfaceModel model;
  HalfPlanePoint z;
  HalfPlanePoint w;
  OrbitBall ball;
};

const Fixture& fixture(const char* label, HalfPlanePoint z, HalfPlanePoint w, double radius) {
  static std::vector<std::unique_ptr<Fixture>> cache;
  for (const auto& f : cache) {
    if (f->model.label == label) return *f;
  }
  auto f = std::make_unique<Fixture>(Fixture{build_surface_model(label), z, w, {}});
  f->ball = enumerate_ball(f->model, z, w, radius);
  cache.push_back(std::move(f));
  return *cache.back();
}

const Fixture& modular() { return fixture("modular", {0.1, 2.5}, {0.3, 3.0}, 12.0); }
const Fixture& bolza() { return fixture("bolza", {0.05, 1.1}, {-0.1, 0.9}, 8.0); }

template <auto Eval>
void run(benchmark::State& state, const Fixture& f) {
  KernelParams p;
  p.k = static_cast<int>(state.range(0));
  p.truncation_radius = f.ball.radius;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Eval(f.model, f.ball, f.z, f.w, p));
  }
  state.counters["terms"] = static_cast<double>(f.ball.elements.size());
}

void BM_modular_serial(benchmark::State& s) { run<kernel_norm_serial>(s, modular()); }
void BM_modular_openmp(benchmark::State& s) { run<kernel_norm>(s, modular()); }
void BM_bolza_serial(benchmark::State& s) { run<kernel_norm_serial>(s, bolza()); }
void BM_bolza_openmp(benchmark::State& s) { run<kernel_norm>(s, bolza()); }

}  // namespace

BENCHMARK(BM_modular_serial)->Arg(3)->Arg(12);
BENCHMARK(BM_modular_openmp)->Arg(3)->Arg(12);
BENCHMARK(BM_bolza_serial)->Arg(3)->Arg(12);
BENCHMARK(BM_bolza_openmp)->Arg(3)->Arg(12);

BENCHMARK_MAIN();
