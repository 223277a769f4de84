#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mu/core.hpp"

namespace mu::bayes {

struct LogTauGrid {
  std::vector<double> log10_tau;

  static LogTauGrid uniform(double log10_lo = -12.0, double log10_hi = 14.0,
                            std::size_t points = 2400);
  std::size_t size() const { return log10_tau.size(); }
  double tau(std::size_t i) const;
  std::vector<double> taus() const;
};

// Density with respect to tau_e (not log tau_e).
struct DensityOnGrid {
  LogTauGrid grid;
  std::vector<double> values;
  bool normalized = false;
};

double integral(const DensityOnGrid& d);
DensityOnGrid normalize(DensityOnGrid d);
// Cumulative trapezoidal integral at each grid point, ending at integral(d).
std::vector<double> cumulative(const DensityOnGrid& d);

struct FisherOptions {
  double log_step = 1e-4;  // central difference step in ln tau_e
  double rel_tol = 1e-4;   // continuous-outcome quadrature
  double abs_tol = 1e-8;   // on the ln-tau Fisher information
  // Jeffreys priors evaluate the Fisher information on every grid_stride-th
  // point and interpolate log-log in between.
  std::size_t grid_stride = 1;
};

// Fisher information with respect to ln tau_e for one run in ctx.
double fisher_information_log_tau(const ExperimentModel& model, const Context& ctx,
                                  const ModificationParams& p, const FisherOptions& opt = {});

// Fisher information with respect to tau_e, i.e. the above divided by tau_e^2.
double fisher_information(const ExperimentModel& model, const Context& ctx,
                          const ModificationParams& p, const FisherOptions& opt = {});

struct TailExponents {
  double low = 0.0;   // log-log slope over the first decade
  double high = 0.0;  // log-log slope over the last decade
};

// Least-squares slopes of log density versus log tau over one decade at each
// end. Zero values are skipped; NaN means the density vanishes there.
TailExponents tail_exponents(const DensityOnGrid& d, double decades = 1.0);

// sqrt of the Fisher information averaged over the weighted contexts, normalized.
// Throws NumericalError with the tail exponents if the result is not normalizable.
DensityOnGrid jeffreys_prior(const ExperimentModel& model, std::span<const WeightedContext> contexts,
                             double sigma_q, const LogTauGrid& grid, const FisherOptions& opt = {});
DensityOnGrid jeffreys_prior(const ExperimentModel& model, const Context& ctx, double sigma_q,
                             const LogTauGrid& grid, const FisherOptions& opt = {});

DensityOnGrid posterior_update(const DensityOnGrid& prior, const ExperimentModel& model,
                               const Dataset& data, double sigma_q);
DensityOnGrid posterior_update(const DensityOnGrid& prior, const ExperimentModel& model,
                               std::span<const ContextGroup> groups, double sigma_q);

// Smallest tau with cumulative probability >= p, linear within the bin.
double quantile(const DensityOnGrid& d, double p);

// CDF(tau*) / (1 - CDF(tau*)); +inf once the CDF reaches 1.
double odds_ratio(const DensityOnGrid& d, double tau_star);

// log P(d | D_heat) = log P(d, D_heat) - log P(D_heat). A -inf joint is a
// legitimate zero; a marginal of exactly zero or NaN throws NumericalError.
double condition_on_heating(double log_joint, double log_marginal);

struct ProtocolCandidate {
  std::string name;
  std::vector<WeightedContext> contexts;
};

struct ProtocolChoice {
  std::size_t index = 0;
  std::string name;
  DensityOnGrid prior;
  std::vector<double> prior_tau_m;  // prior-only quantile per candidate
};

// Least favorable protocol: the one whose Jeffreys prior alone excludes the
// smallest tau_e at quantile p.
ProtocolChoice select_prior_protocol(const ExperimentModel& model,
                                     std::span<const ProtocolCandidate> candidates, double sigma_q,
                                     const LogTauGrid& grid, double p = 0.05,
                                     const FisherOptions& opt = {});

struct MacroscopicityReport {
  std::vector<double> sigma_q_samples;
  std::vector<double> tau_m_values;
  std::vector<std::string> prior_protocols;
  double sigma_q_star = 0.0;
  double tau_m_star = 0.0;
  double mu_m = 0.0;
  bool boundary_maximum = false;
  std::string prior_protocol;
};

struct ScanOptions {
  std::size_t points = 60;
  double sigma_rel_tol = 1e-3;
  double quantile_p = 0.05;
  FisherOptions fisher;
  std::function<void(std::size_t index, std::size_t total, double sigma_q, double tau_m)> progress;
};

struct TauMEvaluation {
  double tau_m = 0.0;
  std::string prior_protocol;
};

// Log-spaced scan of sigma_q over [sigma_lo, sigma_hi], then a bracketed
// one-dimensional refinement of the best scan point.
MacroscopicityReport maximize_macroscopicity(
    const std::function<TauMEvaluation(double sigma_q)>& tau_m_of_sigma, double sigma_lo,
    double sigma_hi, const ScanOptions& opt = {});

// Full recipe: least favorable Jeffreys prior, posterior on data, quantile,
// maximized over sigma_q.
MacroscopicityReport maximize_macroscopicity(const ExperimentModel& model, const Dataset& data,
                                             std::span<const ProtocolCandidate> candidates,
                                             const LogTauGrid& grid, double sigma_lo,
                                             double sigma_hi, const ScanOptions& opt = {});

}  // namespace mu::bayes
