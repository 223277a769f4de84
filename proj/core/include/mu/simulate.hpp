#pragma once

#include <cstdint>
#include <span>

#include "mu/config.hpp"
#include "mu/core.hpp"

namespace mu::cli {

// Splits n_runs over the contexts in proportion to their weights (largest
// remainder, ties to the earlier context).
std::vector<std::int64_t> allocate_runs(std::int64_t n_runs, std::span<const WeightedContext> contexts);

// I.i.d. draws from the model at (tau_true, sigma_q); tau_true may be +inf.
// Discrete outcomes are aggregated into one weighted run per (context, label).
Dataset simulate_dataset(const ExperimentModel& model, double tau_true, double sigma_q,
                         std::int64_t n_runs, std::span<const WeightedContext> contexts,
                         std::uint64_t seed);

// Uses the synthetic block of the config.
Dataset simulate_dataset(const ExperimentConfig& config);

}  // namespace mu::cli
