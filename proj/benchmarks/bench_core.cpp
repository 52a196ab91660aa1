#include <benchmark/benchmark.h>

#include <cmath>

#include "chcrit/energy.hpp"
#include "chcrit/levelset.hpp"
#include "chcrit/nucleation.hpp"
#include "chcrit/spectral.hpp"
#include "chcrit/string_method.hpp"

using namespace chcrit;

namespace {

double phi_for(int64_t n) { return n >= 222 ? 0.1 : n >= 78 ? 0.2 : 0.4; }

Field droplet(double phi) {
  Model m = make_model(phi, 2.3);
  Grid g = make_grid(phi, 2.3);
  NucleationConstants nc = critical_volumes(2.3, 2);
  return droplet_ansatz(nc.nu_m, m, g);
}

void BM_laplacian(benchmark::State& state) {
  Field u = droplet(phi_for(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_laplacian(u));
  state.SetItemsProcessed(state.iterations() * u.grid.size());
}

void BM_energy(benchmark::State& state) {
  double phi = phi_for(state.range(0));
  Model m = make_model(phi, 2.3);
  Field u = droplet(phi);
  for (auto _ : state) benchmark::DoNotOptimize(energy(u, m));
  state.SetItemsProcessed(state.iterations() * u.grid.size());
}

void BM_descent_step(benchmark::State& state) {
  double phi = phi_for(state.range(0));
  Model m = make_model(phi, 2.3);
  Field u = droplet(phi);
  double dt = default_dt(m);
  for (auto _ : state) benchmark::DoNotOptimize(descent_step(u, dt, m));
}

void BM_reparameterize(benchmark::State& state) {
  Model m = make_model(0.4, 2.3);
  Grid g = make_grid(0.4, 2.3);
  NucleationConstants nc = critical_volumes(2.3, 2);
  Field a(g, -1.0 + 0.4);
  StringState base = init_linear(a, droplet_ansatz(nc.nu_m, m, g), static_cast<int>(state.range(0)));
  for (double& al : base.alpha) al = std::pow(al, 3.0);  // uneven spacing to redistribute
  for (std::size_t k = 0; k < base.images.size(); ++k) {
    double t = base.alpha[k];
    for (std::size_t i = 0; i < base.images[k].values.size(); ++i)
      base.images[k].values[i] = (1.0 - t) * base.images.front().values[i] +
                                 t * base.images.back().values[i];
  }
  for (auto _ : state) {
    StringState s = base;
    reparameterize(s);
    benchmark::DoNotOptimize(s.images.back().values.data());
  }
}

void BM_min_translated(benchmark::State& state) {
  double phi = phi_for(state.range(0));
  Field u = droplet(phi);
  Field psi = sharp_profile_psi(1.0, u.grid);
  for (auto _ : state) benchmark::DoNotOptimize(min_translated_l2_sq(u, psi));
}

void BM_convexity_scan(benchmark::State& state) {
  Field u = droplet(0.2);
  for (auto _ : state) benchmark::DoNotOptimize(convexity_scan(u, 16));
}

}  // namespace

BENCHMARK(BM_laplacian)->Arg(28)->Arg(78)->Arg(222);
BENCHMARK(BM_energy)->Arg(28)->Arg(78)->Arg(222);
BENCHMARK(BM_descent_step)->Arg(28)->Arg(78)->Arg(222);
BENCHMARK(BM_reparameterize)->Arg(32)->Arg(128);
BENCHMARK(BM_min_translated)->Arg(28)->Arg(78);
BENCHMARK(BM_convexity_scan);

BENCHMARK_MAIN();
