#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "mu/bayes.hpp"
#include "mu/config.hpp"
#include "mu/core.hpp"

namespace mu::cli {

bayes::LogTauGrid make_grid(const ExperimentConfig& config);
bayes::FisherOptions fisher_options(const ExperimentConfig& config);

// One candidate per protocol found in the data (one for the BEC models, whose
// runs carry no protocol), each holding that protocol's distinct contexts
// weighted by run count. A prior_protocol other than "auto" keeps only that one.
std::vector<bayes::ProtocolCandidate> prior_candidates(const ExperimentConfig& config,
                                                       const Dataset& data);
// Same from a context list, e.g. the synthetic block.
std::vector<bayes::ProtocolCandidate> prior_candidates(const ExperimentConfig& config,
                                                       std::span<const WeightedContext> contexts);

struct PipelineResult {
  ExperimentConfig config;  // as run, with a fitted phase offset filled in
  bayes::MacroscopicityReport report;
  bayes::DensityOnGrid prior;      // at sigma_q_star
  bayes::DensityOnGrid posterior;  // at sigma_q_star
  bayes::TailExponents prior_tails;
  double posterior_mass_lowest_decade = 0.0;
  double posterior_mass_highest_decade = 0.0;
  std::size_t runs = 0;
  std::int64_t total_weight = 0;
};

using ProgressFn = std::function<void(std::size_t index, std::size_t total, double length_scale,
                                      double tau_m)>;

// Least favorable Jeffreys prior, posterior, quantile, maximized over the
// sigma_q scan of the config.
PipelineResult run_pipeline(const ExperimentConfig& config, const Dataset& data,
                            const ProgressFn& progress = {});

// key = value lines.
void write_summary(std::ostream& out, const PipelineResult& r);
// tau_seconds,prior_density_per_s,posterior_density_per_s
void write_posterior_table(std::ostream& out, const bayes::DensityOnGrid& prior,
                           const bayes::DensityOnGrid& posterior);
// length_scale_m,sigma_q_kg_m_per_s,tau_m_seconds,log10_tau_m,prior_protocol
void write_scan_table(std::ostream& out, const bayes::MacroscopicityReport& report);

}  // namespace mu::cli
