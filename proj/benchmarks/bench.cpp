#include <benchmark/benchmark.h>

#include "hsmoney/f2lin.hpp"
#include "hsmoney/polyhide.hpp"
#include "hsmoney/qsim.hpp"

namespace {

using namespace hsm;

void BM_HadamardAll(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  StateVector s = haar_random_state(n, rng);
  for (auto _ : state) {
    s = hadamard_all(std::move(s));
    benchmark::DoNotOptimize(s[0]);
  }
}
BENCHMARK(BM_HadamardAll)->DenseRange(8, 20, 4);

void BM_SubspaceOracle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  const PhaseOracle u = PhaseOracle::subspace(random_subspace(n, n / 2, rng));
  StateVector s = haar_random_state(n, rng);
  for (auto _ : state) {
    apply_oracle(u, s);
    benchmark::DoNotOptimize(s[0]);
  }
}
BENCHMARK(BM_SubspaceOracle)->DenseRange(8, 20, 4);

void BM_ChangeBasis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  const Subspace a = random_subspace(n, n / 2, rng);
  const MultilinearPoly p = sample_vanishing(a, 4, rng);
  const LinMap l = LinMap::random_invertible(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(change_basis(p, l));
}
BENCHMARK(BM_ChangeBasis)->Arg(8)->Arg(12)->Arg(16);

void BM_ZsetMask(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  const Subspace a = random_subspace(n, n / 2, rng);
  const PolySystem sys = sample_noisy_system(a, 4, 12 * n, 0.25, rng);
  for (auto _ : state) benchmark::DoNotOptimize(zset_mask(sys));
}
BENCHMARK(BM_ZsetMask)->Arg(8)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
