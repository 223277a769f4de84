#include "mu/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "mu/constants.hpp"

namespace mu::cli {

std::vector<std::int64_t> allocate_runs(std::int64_t n_runs, std::span<const WeightedContext> contexts) {
  if (contexts.empty()) throw DomainError("simulate: no contexts");
  if (n_runs < 0) throw DomainError("simulate: run count must be >= 0");
  double total = 0.0;
  for (const auto& c : contexts) {
    if (!(c.weight > 0.0)) throw DomainError("simulate: context weights must be positive");
    total += c.weight;
  }
  std::vector<std::int64_t> n(contexts.size());
  std::vector<double> rest(contexts.size());
  std::int64_t used = 0;
  for (std::size_t k = 0; k < contexts.size(); ++k) {
    const double share = static_cast<double>(n_runs) * contexts[k].weight / total;
    n[k] = static_cast<std::int64_t>(std::floor(share));
    rest[k] = share - static_cast<double>(n[k]);
    used += n[k];
  }
  std::vector<std::size_t> order(contexts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rest[a] > rest[b]; });
  for (std::size_t i = 0; used < n_runs; ++i, ++used) ++n[order[i % order.size()]];
  return n;
}

Dataset simulate_dataset(const ExperimentModel& model, double tau_true, double sigma_q,
                         std::int64_t n_runs, std::span<const WeightedContext> contexts,
                         std::uint64_t seed) {
  const auto p = make_modification(tau_true, sigma_q);
  const auto counts = allocate_runs(n_runs, contexts);
  std::mt19937_64 rng(seed);
  Dataset data;
  data.experiment_id = model.id();
  for (std::size_t k = 0; k < contexts.size(); ++k) {
    const Context& ctx = contexts[k].context;
    const auto space = model.outcome_space(ctx);
    if (space.is_discrete()) {
      std::vector<std::int64_t> hist(space.size(), 0);
      for (std::int64_t i = 0; i < counts[k]; ++i) ++hist[std::get<int>(model.sample(ctx, p, rng))];
      for (std::size_t d = 0; d < hist.size(); ++d)
        if (hist[d] > 0) data.runs.push_back(Run{Outcome{static_cast<int>(d)}, ctx, hist[d]});
    } else {
      for (std::int64_t i = 0; i < counts[k]; ++i) data.runs.push_back(Run{model.sample(ctx, p, rng), ctx, 1});
    }
  }
  return data;
}

Dataset simulate_dataset(const ExperimentConfig& config) {
  const auto model = make_model(config);
  const auto& s = config.synthetic;
  return simulate_dataset(*model, s.tau_true, constants::hbar / s.length_scale, s.runs, s.contexts,
                          config.seed);
}

}  // namespace mu::cli
