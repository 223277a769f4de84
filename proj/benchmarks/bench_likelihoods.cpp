#include <benchmark/benchmark.h>

#include <cmath>

#include "mu/constants.hpp"
#include "mu/model_bec.hpp"
#include "mu/model_nanobeam.hpp"
#include "mu/model_qrw.hpp"
#include "mu/oracle.hpp"
#include "mu/specfun.hpp"

using namespace mu;
using constants::hbar;

static void BM_Theta3Dual(benchmark::State& state) {
  double u = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::log_theta3_s(u, 0.05));
    u += 1e-6;
  }
}
BENCHMARK(BM_Theta3Dual);

static void BM_Faddeeva(benchmark::State& state) {
  std::complex<double> z(0.3, 1.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::faddeeva(z));
    z += std::complex<double>(1e-7, 0.0);
  }
}
BENCHMARK(BM_Faddeeva);

static void BM_QrwSiteVector(benchmark::State& state) {
  const qrw::QrwParams p;
  const auto mod = make_modification(1e6, hbar / 43.3e-9);
  for (auto _ : state) benchmark::DoNotOptimize(qrw::site_probabilities(Protocol::full, p, mod));
}
BENCHMARK(BM_QrwSiteVector);

static void BM_NanobeamCoincidence(benchmark::State& state) {
  const nanobeam::NanobeamParams p;
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nanobeam::coincidence_probabilities(1.1, 123e-9, x, p));
    x *= 1.0000001;
  }
}
BENCHMARK(BM_NanobeamCoincidence);

static void BM_NanobeamGeometricFactor(benchmark::State& state) {
  const nanobeam::NanobeamParams p;
  const double len = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nanobeam::geometric_factor(p, hbar / len));
}
BENCHMARK(BM_NanobeamGeometricFactor)->Arg(7)->Arg(12);

// One imbalance likelihood; arg 0 is the quantum limit, arg 1 a lossy mixture.
static void BM_BecLogLikelihood(benchmark::State& state) {
  const bec::BecDoubleWellModel model;
  const Context ctx{0.01, 0.0, Protocol::none};
  const auto mod = state.range(0) == 0 ? make_modification(INFINITY, hbar / 0.77e-6)
                                       : make_modification(3e9, hbar / 0.77e-6);
  double m = -200.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.log_likelihood(Outcome{m}, ctx, mod));
    m = m > 200.0 ? -200.0 : m + 0.37;
  }
}
BENCHMARK(BM_BecLogLikelihood)->Arg(0)->Arg(1);

static void BM_OracleQrwWalk(benchmark::State& state) {
  const qrw::QrwParams p;
  const auto mod = make_modification(1e12, hbar / 43.3e-9);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::qrw_density_matrix_walk(p, mod));
}
BENCHMARK(BM_OracleQrwWalk)->Unit(benchmark::kMicrosecond);

static void BM_OracleDickeEvolve(benchmark::State& state) {
  const double J = static_cast<double>(state.range(0)) / 2.0;
  const auto s = oracle::one_axis_squeeze(J, 0.4 * J);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::evolve_dicke(s, 1.0, 0.002, 0.002, 100.0));
}
BENCHMARK(BM_OracleDickeEvolve)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);
