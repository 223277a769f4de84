#include "mu/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "mu/constants.hpp"
#include "mu/model_nanobeam.hpp"

namespace mu::cli {
namespace {

using constants::hbar;

std::string candidate_name(const ExperimentConfig& config, Protocol p) {
  if (config.experiment == Experiment::bec_double_well || config.experiment == Experiment::bec_single_well)
    return "time_sweep";
  return std::string(to_string(p));
}

double mass_between(const bayes::DensityOnGrid& d, double log10_lo, double log10_hi) {
  const auto& x = d.grid.log10_tau;
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i] < log10_lo || x[i + 1] > log10_hi) continue;
    m += 0.5 * (d.values[i] + d.values[i + 1]) * (d.grid.tau(i + 1) - d.grid.tau(i));
  }
  return m;
}

}  // namespace

bayes::LogTauGrid make_grid(const ExperimentConfig& config) {
  return bayes::LogTauGrid::uniform(config.grid.log10_tau_min, config.grid.log10_tau_max,
                                    config.grid.points);
}

bayes::FisherOptions fisher_options(const ExperimentConfig& config) {
  bayes::FisherOptions o;
  o.grid_stride = config.inference.fisher_grid_stride;
  o.rel_tol = config.inference.fisher_rel_tol;
  return o;
}

std::vector<bayes::ProtocolCandidate> prior_candidates(const ExperimentConfig& config,
                                                       std::span<const WeightedContext> contexts) {
  // name -> (context -> summed weight), in order of first appearance
  std::vector<bayes::ProtocolCandidate> out;
  std::map<std::string, std::size_t> index;
  for (const auto& w : contexts) {
    const auto name = candidate_name(config, w.context.protocol);
    auto it = index.find(name);
    if (it == index.end()) {
      it = index.emplace(name, out.size()).first;
      out.push_back({name, {}});
    }
    auto& list = out[it->second].contexts;
    auto same = std::find_if(list.begin(), list.end(),
                             [&](const WeightedContext& c) { return c.context == w.context; });
    if (same == list.end())
      list.push_back(w);
    else
      same->weight += w.weight;
  }
  if (config.inference.prior_protocol != "auto") {
    const auto want = candidate_name(config, protocol_from_string(config.inference.prior_protocol));
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& c) { return c.name == want; });
    if (it == out.end())
      throw ConfigError(fmt::format("inference.prior_protocol: '{}' does not occur in the data", want));
    out = {*it};
  }
  if (out.empty()) throw DataError("no contexts to build a prior from");
  return out;
}

std::vector<bayes::ProtocolCandidate> prior_candidates(const ExperimentConfig& config,
                                                       const Dataset& data) {
  std::vector<WeightedContext> contexts;
  contexts.reserve(data.runs.size());
  for (const auto& r : data.runs) contexts.push_back({r.context, static_cast<double>(r.weight)});
  return prior_candidates(config, contexts);
}

PipelineResult run_pipeline(const ExperimentConfig& config, const Dataset& data,
                            const ProgressFn& progress) {
  PipelineResult r;
  r.config = config;
  if (config.experiment == Experiment::nanobeam && config.inference.fit_phase_offset)
    r.config.nanobeam.phi0 = nanobeam::fit_phase_offset(data, config.nanobeam);

  const auto model = make_model(r.config);
  const auto grid = make_grid(r.config);
  const auto candidates = prior_candidates(r.config, data);

  bayes::ScanOptions opt;
  opt.points = r.config.sigma_scan.points;
  opt.sigma_rel_tol = r.config.sigma_scan.rel_tol;
  opt.quantile_p = r.config.inference.quantile;
  opt.fisher = fisher_options(r.config);
  if (progress)
    opt.progress = [&](std::size_t i, std::size_t n, double sigma_q, double tau_m) {
      progress(i, n, hbar / sigma_q, tau_m);
    };
  // sigma_q runs opposite to the length scale
  r.report = bayes::maximize_macroscopicity(*model, data, candidates, grid,
                                            hbar / r.config.sigma_scan.length_max,
                                            hbar / r.config.sigma_scan.length_min, opt);

  const auto choice = bayes::select_prior_protocol(*model, candidates, r.report.sigma_q_star, grid,
                                                   opt.quantile_p, opt.fisher);
  r.prior = choice.prior;
  r.posterior = bayes::posterior_update(r.prior, *model, data, r.report.sigma_q_star);
  r.prior_tails = bayes::tail_exponents(r.prior);
  r.posterior_mass_lowest_decade =
      mass_between(r.posterior, grid.log10_tau.front(), grid.log10_tau.front() + 1.0);
  r.posterior_mass_highest_decade =
      mass_between(r.posterior, grid.log10_tau.back() - 1.0, grid.log10_tau.back());
  r.runs = data.runs.size();
  r.total_weight = data.total_weight();
  return r;
}

void write_summary(std::ostream& out, const PipelineResult& r) {
  const auto& rep = r.report;
  const auto& c = r.config;
  out << fmt::format("experiment = {}\n", to_string(c.experiment));
  out << fmt::format("runs = {}\n", r.runs);
  out << fmt::format("total_weight = {}\n", r.total_weight);
  out << fmt::format("mu_m = {:.6f}\n", rep.mu_m);
  out << fmt::format("tau_m_star_seconds = {:.9e}\n", rep.tau_m_star);
  out << fmt::format("sigma_q_star_kg_m_per_s = {:.9e}\n", rep.sigma_q_star);
  out << fmt::format("length_scale_star_m = {:.9e}\n", hbar / rep.sigma_q_star);
  out << fmt::format("boundary_maximum = {}\n", rep.boundary_maximum);
  out << fmt::format("prior_protocol = {}\n", rep.prior_protocol);
  out << fmt::format("quantile = {}\n", c.inference.quantile);
  if (c.experiment == Experiment::nanobeam) out << fmt::format("phase_offset_rad = {:.9f}\n", c.nanobeam.phi0);
  out << fmt::format("grid_log10_tau_min_seconds = {}\n", c.grid.log10_tau_min);
  out << fmt::format("grid_log10_tau_max_seconds = {}\n", c.grid.log10_tau_max);
  out << fmt::format("grid_points = {}\n", c.grid.points);
  out << fmt::format("fisher_grid_stride = {}\n", c.inference.fisher_grid_stride);
  out << fmt::format("prior_tail_exponent_low = {:.6f}\n", r.prior_tails.low);
  out << fmt::format("prior_tail_exponent_high = {:.6f}\n", r.prior_tails.high);
  out << fmt::format("posterior_mass_lowest_decade = {:.6e}\n", r.posterior_mass_lowest_decade);
  out << fmt::format("posterior_mass_highest_decade = {:.6e}\n", r.posterior_mass_highest_decade);
  out << fmt::format("scan_length_min_m = {}\n", c.sigma_scan.length_min);
  out << fmt::format("scan_length_max_m = {}\n", c.sigma_scan.length_max);
  out << fmt::format("scan_points = {}\n", c.sigma_scan.points);
  out << fmt::format("seed = {}\n", c.seed);
}

void write_posterior_table(std::ostream& out, const bayes::DensityOnGrid& prior,
                           const bayes::DensityOnGrid& posterior) {
  if (prior.grid.log10_tau != posterior.grid.log10_tau)
    throw DomainError("prior and posterior live on different grids");
  out << "tau_seconds,prior_density_per_s,posterior_density_per_s\n";
  for (std::size_t i = 0; i < prior.grid.size(); ++i)
    out << fmt::format("{:.9e},{:.9e},{:.9e}\n", prior.grid.tau(i), prior.values[i], posterior.values[i]);
}

void write_scan_table(std::ostream& out, const bayes::MacroscopicityReport& report) {
  out << "length_scale_m,sigma_q_kg_m_per_s,tau_m_seconds,log10_tau_m,prior_protocol\n";
  for (std::size_t i = 0; i < report.sigma_q_samples.size(); ++i) {
    const double s = report.sigma_q_samples[i];
    const double t = report.tau_m_values[i];
    out << fmt::format("{:.9e},{:.9e},{:.9e},{:.6f},{}\n", hbar / s, s, t, std::log10(t),
                       report.prior_protocols[i]);
  }
}

}  // namespace mu::cli
