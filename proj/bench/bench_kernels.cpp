// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "nashlab/kernels.hpp"
#include "nashlab/rng.hpp"

using namespace nashlab;

namespace {

struct Setup {
  GeometryPtr g;
  kernels::Stencil stencil;
  std::vector<double> cond;
  std::vector<double> u;
  std::vector<double> out;

  explicit Setup(int L) : g(make_geometry(2, L)), stencil(kernels::make_stencil(*g)) {
    Rng rng(7);
    std::vector<double> a(g->edge_count());
    for (double& v : a) v = rng.uniform();
    cond = kernels::padded_conductance(a);
    u.resize(g->site_count());
    for (double& v : u) v = rng.uniform();
    out.resize(u.size());
  }
};

template <bool Parallel>
void BM_Transition(benchmark::State& state) {
  Setup s(int(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::omp::apply_transition(s.stencil, s.cond, 0.25, s.u, s.out);
    else
      kernels::serial::apply_transition(s.stencil, s.cond, 0.25, s.u, s.out);
    benchmark::DoNotOptimize(s.out.data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(s.u.size()));
}

template <bool Parallel>
void BM_Dirichlet(benchmark::State& state) {
  Setup s(int(state.range(0)));
  for (auto _ : state) {
    double d = Parallel ? kernels::omp::dirichlet(*s.g, s.cond, s.u) : kernels::serial::dirichlet(*s.g, s.cond, s.u);
    benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(s.g->edge_count()));
}

template <bool Parallel>
void BM_SumSquares(benchmark::State& state) {
  Setup s(int(state.range(0)));
  for (auto _ : state) {
    double d = Parallel ? kernels::omp::sum_squares(s.u) : kernels::serial::sum_squares(s.u);
    benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(s.u.size()));
}

}  // namespace

BENCHMARK(BM_Transition<false>)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Transition<true>)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Dirichlet<false>)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Dirichlet<true>)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_SumSquares<false>)->Arg(64)->Arg(256);
BENCHMARK(BM_SumSquares<true>)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
