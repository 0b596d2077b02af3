#include "hadamux/codes.hpp"
#include "hadamux/config.hpp"
#include "hadamux/forward.hpp"
#include "hadamux/harness.hpp"
#include "hadamux/recon.hpp"
#include "hadamux/scene.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace hadamux;

struct Fixture {
  explicit Fixture(int n, double k)
      : s(build_s_matrix(n)),
        f(synth_spectrum(SpectrumKind::solar_like, n, {}, 1)),
        scene(shift_embed(f, n)),
        sub(make_sub_s(s, sample_intensity(n, k, 3))),
        g(measure_mms(sub, scene, {calibrate_sigma(f, 6.45), 11}).data) {}

  SMatrix s;
  Spectrum f;
  EmbeddedScene scene;
  SubSMatrix sub;
  Matrix g;
};

void BM_BuildSMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_s_matrix(n));
}
BENCHMARK(BM_BuildSMatrix)->Arg(31)->Arg(127);

void BM_DecodeInverseClosedForm(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(decode_inverse(fx.s, fx.g));
}
BENCHMARK(BM_DecodeInverseClosedForm)->Arg(31)->Arg(127);

void BM_DecodeInverseLu(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(decode_inverse(fx.sub.s_snap, fx.g));
}
BENCHMARK(BM_DecodeInverseLu)->Arg(31)->Arg(127);

void BM_DecodeNnlsIdeal(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)), 0.5);
  const Matrix coding = fx.s.as_real();
  for (auto _ : state) benchmark::DoNotOptimize(decode_nnls(coding, fx.g));
}
BENCHMARK(BM_DecodeNnlsIdeal)->Arg(31)->Arg(127);

void BM_DecodeNnlsDense(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(decode_nnls(fx.sub.s_snap, fx.g));
}
BENCHMARK(BM_DecodeNnlsDense)->Arg(31)->Arg(127);

void BM_RunTrial(benchmark::State& state) {
  ExperimentConfig c;
  c.order = static_cast<int>(state.range(0));
  const Experiment experiment(c);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(experiment.run_trial(0.5, ++seed));
}
BENCHMARK(BM_RunTrial)->Arg(31)->Arg(127)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
