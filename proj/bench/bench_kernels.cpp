// Serial reference vs OpenMP builds of the hot kernels.
#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "nlslab/kernels.hpp"

using C = std::complex<double>;

namespace {

struct Inputs {
  std::vector<double> freqs, xs;
  std::vector<C> amps, field;
  explicit Inputs(std::size_t nf, std::size_t nx) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t i = 0; i < nf; ++i) {
      freqs.push_back(u(rng));
      amps.emplace_back(u(rng), u(rng));
    }
    for (std::size_t i = 0; i < nx; ++i) {
      xs.push_back(100 * u(rng));
      field.emplace_back(u(rng), u(rng));
    }
  }
};

template <bool Parallel>
void BM_trig_sum(benchmark::State& st) {
  Inputs in(static_cast<std::size_t>(st.range(0)), 4096);
  std::vector<C> out(in.xs.size());
  for (auto _ : st) {
    if constexpr (Parallel) nlslab::parallel::trig_sum(in.freqs, in.amps, in.xs, out);
    else nlslab::serial::trig_sum(in.freqs, in.amps, in.xs, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * 4096);
}

template <bool Parallel>
void BM_weighted_phase_sum(benchmark::State& st) {
  Inputs in(static_cast<std::size_t>(st.range(0)), 4096);
  std::vector<C> out(in.xs.size());
  for (auto _ : st) {
    if constexpr (Parallel) nlslab::parallel::weighted_phase_sum(in.freqs, in.amps, in.xs, 3.0, out);
    else nlslab::serial::weighted_phase_sum(in.freqs, in.amps, in.xs, 3.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * 4096);
}

template <bool Parallel>
void BM_nonlinear_phase(benchmark::State& st) {
  Inputs in(1, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    if constexpr (Parallel) nlslab::parallel::nonlinear_phase(in.field, 1e-3, 0.1);
    else nlslab::serial::nonlinear_phase(in.field, 1e-3, 0.1);
    benchmark::DoNotOptimize(in.field.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_trig_sum<false>)->Arg(64)->Arg(512);
BENCHMARK(BM_trig_sum<true>)->Arg(64)->Arg(512);
BENCHMARK(BM_weighted_phase_sum<false>)->Arg(512);
BENCHMARK(BM_weighted_phase_sum<true>)->Arg(512);
BENCHMARK(BM_nonlinear_phase<false>)->Arg(16384)->Arg(262144);
BENCHMARK(BM_nonlinear_phase<true>)->Arg(16384)->Arg(262144);

BENCHMARK_MAIN();
