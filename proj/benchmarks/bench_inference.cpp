#include <benchmark/benchmark.h>

#include <cmath>

#include "mu/bayes.hpp"
#include "mu/config.hpp"
#include "mu/constants.hpp"
#include "mu/model_bec.hpp"
#include "mu/model_nanobeam.hpp"
#include "mu/model_qrw.hpp"
#include "mu/simulate.hpp"

using namespace mu;
using constants::hbar;

static void BM_FisherQrw(benchmark::State& state) {
  const qrw::QrwModel model;
  const Context ctx{0, 0, Protocol::full};
  const auto mod = make_modification(1e7, hbar / 43.3e-9);
  for (auto _ : state) benchmark::DoNotOptimize(bayes::fisher_information_log_tau(model, ctx, mod));
}
BENCHMARK(BM_FisherQrw);

static void BM_FisherBec(benchmark::State& state) {
  const bec::BecDoubleWellModel model;
  const Context ctx{0.01, 0, Protocol::none};
  const auto mod = make_modification(1e10, hbar / 0.77e-6);
  for (auto _ : state) benchmark::DoNotOptimize(bayes::fisher_information_log_tau(model, ctx, mod));
}
BENCHMARK(BM_FisherBec)->Unit(benchmark::kMillisecond);

static void BM_JeffreysPriorQrw(benchmark::State& state) {
  const qrw::QrwModel model;
  const auto grid = bayes::LogTauGrid::uniform();
  for (auto _ : state)
    benchmark::DoNotOptimize(bayes::jeffreys_prior(model, Context{0, 0, Protocol::full}, hbar / 43.3e-9, grid));
}
BENCHMARK(BM_JeffreysPriorQrw)->Unit(benchmark::kMillisecond);

static void BM_JeffreysPriorNanobeam(benchmark::State& state) {
  const auto cfg = cli::default_config(cli::Experiment::nanobeam);
  const nanobeam::NanobeamModel model(cfg.nanobeam);
  const auto grid = bayes::LogTauGrid::uniform();
  for (auto _ : state)
    benchmark::DoNotOptimize(bayes::jeffreys_prior(model, cfg.synthetic.contexts, hbar / 1e-7, grid));
}
BENCHMARK(BM_JeffreysPriorNanobeam)->Unit(benchmark::kMillisecond);

static void BM_PosteriorQrw(benchmark::State& state) {
  const auto cfg = cli::default_config(cli::Experiment::qrw);
  const qrw::QrwModel model(cfg.qrw);
  const auto data = cli::simulate_dataset(cfg);
  const double sigma = hbar / 43.3e-9;
  const auto prior = bayes::jeffreys_prior(model, Context{0, 0, Protocol::full}, sigma, bayes::LogTauGrid::uniform());
  for (auto _ : state) benchmark::DoNotOptimize(bayes::posterior_update(prior, model, data, sigma));
}
BENCHMARK(BM_PosteriorQrw)->Unit(benchmark::kMillisecond);
