#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mu {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or configuration.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Quadrature failure, non-normalizable densities, NaN likelihoods.
class NumericalError : public Error {
 public:
  using Error::Error;
};

struct ModificationParams {
  double tau_e = 0.0;    // s
  double sigma_q = 0.0;  // kg m/s
  double sigma_s = 0.0;  // m
};

// Throws DomainError unless tau_e > 0, sigma_q > 0, hbar/sigma_q >= 10 fm, 0 <= sigma_s <= 20 pm.
void validate(const ModificationParams& p);
ModificationParams make_modification(double tau_e, double sigma_q, double sigma_s = 0.0);
// The shipped models all act with sigma_s = 0.
void require_momentum_only(const ModificationParams& p);

enum class Protocol : std::uint8_t {
  none,
  full,
  postselect_left,
  postselect_right,
  phase_sweep,
  time_sweep,
};

std::string_view to_string(Protocol p);
Protocol protocol_from_string(std::string_view s);

struct Context {
  double t = 0.0;      // delay, hold or readout time (s)
  double theta = 0.0;  // interferometer phase (rad)
  Protocol protocol = Protocol::none;

  friend bool operator==(const Context&, const Context&) = default;
};

struct WeightedContext {
  Context context;
  double weight = 1.0;
};

// Discrete outcomes are label indices, continuous outcomes are real values.
using Outcome = std::variant<int, double>;

class OutcomeSpace {
 public:
  static OutcomeSpace discrete(std::vector<std::string> labels);
  static OutcomeSpace continuous(double lo, double hi);

  bool is_discrete() const { return discrete_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int index_of(std::string_view label) const;
  bool contains(const Outcome& o) const;

 private:
  bool discrete_ = true;
  std::vector<std::string> labels_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

struct Run {
  Outcome outcome;
  Context context;
  std::int64_t weight = 1;
};

struct Dataset {
  std::string experiment_id;
  std::vector<Run> runs;

  std::int64_t total_weight() const;
};

class ExperimentModel {
 public:
  virtual ~ExperimentModel() = default;

  virtual std::string id() const = 0;
  virtual OutcomeSpace outcome_space(const Context& ctx) const = 0;
  virtual double log_likelihood(const Outcome& o, const Context& ctx,
                                const ModificationParams& p) const = 0;
  virtual bool supports_heating_conditioning() const { return false; }

  // Discrete models: probability of every label, in outcome_space order.
  virtual std::vector<double> probabilities(const Context& ctx,
                                            const ModificationParams& p) const;

  // Discrete models: d probabilities / d ln tau_e. The default takes central
  // differences with step `log_step`, which loses the deviation from the
  // quantum limit once it falls below rounding; models override it exactly.
  virtual std::vector<double> probability_log_tau_derivatives(const Context& ctx,
                                                              const ModificationParams& p,
                                                              double log_step = 1e-4) const;

  // Continuous models: the density at fixed (ctx, p) as a callable, with
  // per-parameter work done once.
  virtual std::function<double(double)> density_at(const Context& ctx,
                                                   const ModificationParams& p) const;

  // Continuous models: points where the density has inverse-square-root
  // edges for any of the given parameter sets. Quadrature panels end there.
  virtual std::vector<double> singular_points(const Context& ctx,
                                              std::span<const ModificationParams> ps) const;

  // Continuous models: locations of sharp peaks, used as extra split points.
  virtual std::vector<double> peak_points(const Context& ctx,
                                          std::span<const ModificationParams> ps) const;

  // One synthetic outcome drawn at (ctx, p). Discrete models draw from
  // probabilities(); continuous models must override.
  virtual Outcome sample(const Context& ctx, const ModificationParams& p,
                         std::mt19937_64& rng) const;

  // Sum of weight * log_likelihood over runs that all share ctx.
  virtual double log_likelihood_sum(std::span<const Run* const> runs, const Context& ctx,
                                    const ModificationParams& p) const;
};

struct ContextGroup {
  Context context;
  std::vector<const Run*> runs;
  std::vector<std::size_t> indices;  // positions in the source dataset
};

// Validates every run against the model and groups runs by context.
// Throws DataError naming the offending run index.
std::vector<ContextGroup> group_runs(const ExperimentModel& model, const Dataset& data);

double dataset_log_likelihood(const ExperimentModel& model, const Dataset& data,
                              const ModificationParams& p);

// Same as above for pre-grouped runs. A log-likelihood of -inf is a valid
// result (data impossible at p); NaN or +inf throws NumericalError.
double dataset_log_likelihood(const ExperimentModel& model,
                              std::span<const ContextGroup> groups,
                              const ModificationParams& p);

}  // namespace mu
