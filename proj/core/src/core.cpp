#include "mu/core.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "mu/constants.hpp"

namespace mu {

void validate(const ModificationParams& p) {
  if (!(p.tau_e > 0.0)) throw DomainError("tau_e must be positive");
  if (!(p.sigma_q > 0.0) || !std::isfinite(p.sigma_q))
    throw DomainError("sigma_q must be positive and finite");
  if (constants::hbar / p.sigma_q < constants::min_length_scale * (1.0 - 1e-12))
    throw DomainError("hbar/sigma_q below the 10 fm bound");
  if (!(p.sigma_s >= 0.0) || p.sigma_s > constants::max_sigma_s)
    throw DomainError("sigma_s outside [0, 20 pm]");
}

ModificationParams make_modification(double tau_e, double sigma_q, double sigma_s) {
  ModificationParams p{tau_e, sigma_q, sigma_s};
  validate(p);
  return p;
}

void require_momentum_only(const ModificationParams& p) {
  if (p.sigma_s != 0.0) throw DomainError("model supports only sigma_s = 0");
}

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::none: return "none";
    case Protocol::full: return "full";
    case Protocol::postselect_left: return "postselect_left";
    case Protocol::postselect_right: return "postselect_right";
    case Protocol::phase_sweep: return "phase_sweep";
    case Protocol::time_sweep: return "time_sweep";
  }
  return "none";
}

Protocol protocol_from_string(std::string_view s) {
  for (auto p : {Protocol::none, Protocol::full, Protocol::postselect_left,
                 Protocol::postselect_right, Protocol::phase_sweep, Protocol::time_sweep})
    if (to_string(p) == s) return p;
  if (s == "L" || s == "left") return Protocol::postselect_left;
  if (s == "R" || s == "right") return Protocol::postselect_right;
  throw DomainError(fmt::format("unknown protocol '{}'", s));
}

OutcomeSpace OutcomeSpace::discrete(std::vector<std::string> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j]) throw DomainError("duplicate outcome label " + labels[i]);
  OutcomeSpace s;
  s.discrete_ = true;
  s.labels_ = std::move(labels);
  return s;
}

OutcomeSpace OutcomeSpace::continuous(double lo, double hi) {
  if (!(lo < hi)) throw DomainError("continuous outcome space needs lo < hi");
  OutcomeSpace s;
  s.discrete_ = false;
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

int OutcomeSpace::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return static_cast<int>(i);
  return -1;
}

bool OutcomeSpace::contains(const Outcome& o) const {
  if (discrete_) {
    const int* k = std::get_if<int>(&o);
    return k && *k >= 0 && static_cast<std::size_t>(*k) < labels_.size();
  }
  const double* x = std::get_if<double>(&o);
  return x && *x >= lo_ && *x <= hi_;
}

std::int64_t Dataset::total_weight() const {
  std::int64_t w = 0;
  for (const auto& r : runs) w += r.weight;
  return w;
}

std::vector<double> ExperimentModel::probabilities(const Context& ctx,
                                                   const ModificationParams& p) const {
  const auto space = outcome_space(ctx);
  if (!space.is_discrete()) throw DomainError(id() + ": probabilities() needs a discrete space");
  std::vector<double> out(space.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::exp(log_likelihood(Outcome{static_cast<int>(i)}, ctx, p));
  return out;
}

std::vector<double> ExperimentModel::probability_log_tau_derivatives(
    const Context& ctx, const ModificationParams& p, double log_step) const {
  auto up = p, down = p;
  up.tau_e = p.tau_e * std::exp(log_step);
  down.tau_e = p.tau_e * std::exp(-log_step);
  auto d = probabilities(ctx, up);
  const auto m = probabilities(ctx, down);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (d[i] - m[i]) / (2.0 * log_step);
  return d;
}

std::function<double(double)> ExperimentModel::density_at(const Context& ctx,
                                                          const ModificationParams& p) const {
  return [this, ctx, p](double x) { return std::exp(log_likelihood(Outcome{x}, ctx, p)); };
}

Outcome ExperimentModel::sample(const Context& ctx, const ModificationParams& p,
                                std::mt19937_64& rng) const {
  if (!outcome_space(ctx).is_discrete())
    throw DomainError(id() + ": continuous model does not implement sampling");
  const auto probs = probabilities(ctx, p);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double c = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    c += probs[k];
    if (u < c) return Outcome{static_cast<int>(k)};
  }
  for (std::size_t k = probs.size(); k-- > 0;)
    if (probs[k] > 0.0) return Outcome{static_cast<int>(k)};
  throw NumericalError(id() + ": all outcome probabilities vanish");
}

std::vector<double> ExperimentModel::singular_points(const Context&,
                                                     std::span<const ModificationParams>) const {
  return {};
}

std::vector<double> ExperimentModel::peak_points(const Context&,
                                                 std::span<const ModificationParams>) const {
  return {};
}

double ExperimentModel::log_likelihood_sum(std::span<const Run* const> runs, const Context& ctx,
                                           const ModificationParams& p) const {
  double s = 0.0;
  for (const Run* r : runs) s += static_cast<double>(r->weight) * log_likelihood(r->outcome, ctx, p);
  return s;
}

std::vector<ContextGroup> group_runs(const ExperimentModel& model, const Dataset& data) {
  std::vector<ContextGroup> groups;
  for (std::size_t i = 0; i < data.runs.size(); ++i) {
    const Run& r = data.runs[i];
    if (!std::isfinite(r.context.t) || !std::isfinite(r.context.theta))
      throw DataError(fmt::format("run {}: non-finite context", i));
    if (r.weight <= 0) throw DataError(fmt::format("run {}: weight must be positive", i));
    if (!model.outcome_space(r.context).contains(r.outcome))
      throw DataError(fmt::format("run {}: outcome outside the outcome space of {}", i, model.id()));
    ContextGroup* g = nullptr;
    for (auto& c : groups)
      if (c.context == r.context) {
        g = &c;
        break;
      }
    if (!g) {
      groups.push_back({r.context, {}, {}});
      g = &groups.back();
    }
    g->runs.push_back(&r);
    g->indices.push_back(i);
  }
  return groups;
}

double dataset_log_likelihood(const ExperimentModel& model, std::span<const ContextGroup> groups,
                              const ModificationParams& p) {
  double total = 0.0;
  for (const auto& g : groups) {
    const double s = model.log_likelihood_sum(g.runs, g.context, p);
    if (std::isnan(s) || s == std::numeric_limits<double>::infinity()) {
      for (std::size_t k = 0; k < g.runs.size(); ++k) {
        const double l = model.log_likelihood(g.runs[k]->outcome, g.context, p);
        if (std::isnan(l) || l == std::numeric_limits<double>::infinity())
          throw NumericalError(fmt::format("run {}: log-likelihood {} at tau_e={:g} s, sigma_q={:g}",
                                           g.indices[k], l, p.tau_e, p.sigma_q));
      }
      throw NumericalError(fmt::format("non-finite log-likelihood at tau_e={:g} s", p.tau_e));
    }
    total += s;
  }
  return total;
}

double dataset_log_likelihood(const ExperimentModel& model, const Dataset& data,
                              const ModificationParams& p) {
  const auto groups = group_runs(model, data);
  return dataset_log_likelihood(model, groups, p);
}

}  // namespace mu
