#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "ringbec/gpe.hpp"
#include "ringbec/kernels.hpp"

using namespace ringbec;
namespace k = ringbec::kernels;

namespace {

struct Data {
  GridSpec grid;
  std::vector<cplx> u1, u2, p1, p2, lap, d1, d2, out;
  std::vector<double> pot;

  explicit Data(std::size_t n) : grid{n, 4.0} {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    auto fill = [&](std::vector<cplx>& v) {
      v.resize(grid.size());
      for (auto& z : v) z = {nd(rng), nd(rng)};
    };
    for (auto* v : {&u1, &u2, &p1, &p2, &lap, &d1, &d2, &out}) fill(*v);
    pot = effective_potential(grid, 1.0);
  }
};

Data& data(std::size_t n) {
  static Data d256(256), d512(512);
  return n == 256 ? d256 : d512;
}

template <bool Parallel>
void BM_interaction(benchmark::State& st) {
  const Data& d = data(st.range(0));
  for (auto _ : st) {
    const double v = Parallel ? k::parallel::interaction_sum(1.0, 2.0, 3.0, d.u1, d.u2)
                              : k::serial::interaction_sum(1.0, 2.0, 3.0, d.u1, d.u2);
    benchmark::DoNotOptimize(v);
  }
  st.SetItemsProcessed(st.iterations() * d.grid.size());
}

template <bool Parallel>
void BM_quartic(benchmark::State& st) {
  const Data& d = data(st.range(0));
  for (auto _ : st) {
    const auto v = Parallel ? k::parallel::quartic_coeffs(1.0, 2.0, 3.0, d.u1, d.p1, d.u2, d.p2)
                            : k::serial::quartic_coeffs(1.0, 2.0, 3.0, d.u1, d.p1, d.u2, d.p2);
    benchmark::DoNotOptimize(v);
  }
  st.SetItemsProcessed(st.iterations() * d.grid.size());
}

template <bool Parallel>
void BM_hamiltonian(benchmark::State& st) {
  Data& d = data(st.range(0));
  for (auto _ : st) {
    if (Parallel)
      k::parallel::magnetic_hamiltonian(d.grid, 1.0, d.pot, d.u1, d.lap, d.d1, d.d2, d.out);
    else
      k::serial::magnetic_hamiltonian(d.grid, 1.0, d.pot, d.u1, d.lap, d.d1, d.d2, d.out);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * d.grid.size());
}

template <bool Parallel>
void BM_cdot(benchmark::State& st) {
  const Data& d = data(st.range(0));
  for (auto _ : st) {
    const cplx v = Parallel ? k::parallel::cdot(d.u1, d.u2) : k::serial::cdot(d.u1, d.u2);
    benchmark::DoNotOptimize(v);
  }
  st.SetItemsProcessed(st.iterations() * d.grid.size());
}

void BM_energy_and_gradient(benchmark::State& st) {
  const GridSpec g{static_cast<std::size_t>(st.range(0)), 4.0};
  GpeProblem prob({5.85, 8.19, 14.6, 1.0}, g);
  TwoComponentState s = gaussian_initial_state(g, {0.0, 1.0}, 0.35, 0.44);
  for (auto _ : st) {
    benchmark::DoNotOptimize(prob.energy(s));
    auto grad = prob.el_gradient(s);
    benchmark::DoNotOptimize(grad.first.values.data());
  }
}

}  // namespace

BENCHMARK(BM_interaction<false>)->Name("interaction/serial")->Arg(256)->Arg(512);
BENCHMARK(BM_interaction<true>)->Name("interaction/parallel")->Arg(256)->Arg(512);
BENCHMARK(BM_quartic<false>)->Name("quartic_coeffs/serial")->Arg(256)->Arg(512);
BENCHMARK(BM_quartic<true>)->Name("quartic_coeffs/parallel")->Arg(256)->Arg(512);
BENCHMARK(BM_hamiltonian<false>)->Name("hamiltonian/serial")->Arg(256)->Arg(512);
BENCHMARK(BM_hamiltonian<true>)->Name("hamiltonian/parallel")->Arg(256)->Arg(512);
BENCHMARK(BM_cdot<false>)->Name("cdot/serial")->Arg(256)->Arg(512);
BENCHMARK(BM_cdot<true>)->Name("cdot/parallel")->Arg(256)->Arg(512);
BENCHMARK(BM_energy_and_gradient)->Name("energy_and_gradient")->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
