#pragma once

#include <utility>
#include <vector>

#include "mu/constants.hpp"
#include "mu/core.hpp"

namespace mu::bec {

struct BecParams {
  int n_atoms = 1200;                                  // N = 2 J0
  double delta_x = 2e-6;                               // well separation (m)
  double omega_x = 2.0 * constants::pi * 1.44e3;       // rad/s
  double omega_y = 2.0 * constants::pi * 1.84e3;       // rad/s
  double omega_z = 2.0 * constants::pi * 13.2;         // rad/s
  double epsilon_over_hbar = 2.19e3;                   // rad/s
  double zeta = 4.0;                                   // rad/s
  double jz_var0 = 0.41 * 0.41 * 600.0 / 2.0;          // <J_z^2>_0
  double jy_var0 = 600.0 * 600.0 / (4.0 * (0.41 * 0.41 * 600.0 / 2.0));  // <J_y^2>_0
  double atom_mass = constants::rubidium87_mass;       // kg
  double heat_survival_fraction = 0.9;
  double detector_resolution = 0.0;                    // Gaussian blur of m (imbalance units), 0 = off

  int j0() const { return n_atoms / 2; }
  void validate() const;
};

// <J_y^2> that saturates <J_z^2><J_y^2> >= J^2/4.
double minimal_uncertainty_partner(int j, double jz_var);

struct BecRates {
  double gamma_p = 0.0;  // phase flip (1/s)
  double gamma_s = 0.0;  // spin flip (1/s)
  double gamma_l = 0.0;  // particle loss per mode (1/s)
  double gamma_c = 0.0;  // coherence decay (1/s)
};

// sqrt(hbar / (2 m omega)) for x and y.
std::pair<double, double> harmonic_mode_widths(const BecParams& params);

double mass_amplification(const BecParams& params);

// Gaussian-mode rates for the double well; gamma_s = 0.
BecRates rates_double_well(const BecParams& params, const ModificationParams& mod);

// Spin-flip rate between the two lowest harmonic states of a single well
// (excitation along x); other rates are zero.
BecRates rates_single_well(const BecParams& params, const ModificationParams& mod);

// -ln g(t) for the double well with loss and shearing.
double log_inv_g_double_well(const BecParams& params, const BecRates& rates, double t);
double g_factor_double_well(const BecParams& params, const BecRates& rates, double t);

double log_inv_g_single_well(const BecParams& params, const BecRates& rates, double t);
double g_factor_single_well(const BecParams& params, const BecRates& rates, double t);

// <J_z^2>_t under spin-flip diffusion, single well.
double jz_var_single_well(const BecParams& params, const BecRates& rates, double t);

// Theta-function density of the imbalance m for J remaining pairs, nome g.
double p_j(double m, int J, const BecParams& params, double g, double t);
// Same with nome exp(-s), on a log scale. Returns -inf outside |m| < J.
double log_p_j(double m, int J, const BecParams& params, double s, double t);

// Imbalance distribution after a pi/2 recombination of a Ramsey sequence in
// a double well, conditioned on keeping at least a fraction
// heat_survival_fraction of the atoms.
class BecDoubleWellModel final : public ExperimentModel {
 public:
  explicit BecDoubleWellModel(BecParams params = {});

  std::string id() const override { return "bec_double_well"; }
  OutcomeSpace outcome_space(const Context& ctx) const override;
  double log_likelihood(const Outcome& o, const Context& ctx,
                        const ModificationParams& p) const override;
  bool supports_heating_conditioning() const override { return true; }
  std::function<double(double)> density_at(const Context& ctx,
                                           const ModificationParams& p) const override;
  std::vector<double> singular_points(const Context& ctx,
                                      std::span<const ModificationParams> ps) const override;
  std::vector<double> peak_points(const Context& ctx,
                                  std::span<const ModificationParams> ps) const override;
  Outcome sample(const Context& ctx, const ModificationParams& p,
                 std::mt19937_64& rng) const override;
  double log_likelihood_sum(std::span<const Run* const> runs, const Context& ctx,
                            const ModificationParams& p) const override;

  // Unconditioned loss mixture, log P(m, J >= J_min).
  double log_joint(double m, double t, const ModificationParams& p) const;
  // log P(J >= J_min) under binomial loss.
  double log_survival(double t, const ModificationParams& p) const;

  const BecParams& params() const { return params_; }
  int j_min() const { return j_min_; }

  struct Mixture {
    std::vector<int> J;
    std::vector<double> log_weight;  // conditioned on J >= j_min, normalized
    double log_survival = 0.0;       // log P(J >= j_min)
    double s = 0.0;                  // -ln g
  };
  // Conditioned mixture; terms below the relative weight cutoff are dropped
  // when `truncate` is set.
  Mixture mixture(double t, const ModificationParams& p, bool truncate) const;

 private:
  double log_density(double m, const Mixture& mix, double t) const;

  BecParams params_;
  int j_min_;
  std::vector<double> log_choose_;  // log C(J0, J), J = 0..J0
};

// Single-well Ramsey sequence with spin-flip diffusion, no loss.
class BecSingleWellModel final : public ExperimentModel {
 public:
  explicit BecSingleWellModel(BecParams params = {});

  std::string id() const override { return "bec_single_well"; }
  OutcomeSpace outcome_space(const Context& ctx) const override;
  double log_likelihood(const Outcome& o, const Context& ctx,
                        const ModificationParams& p) const override;
  std::function<double(double)> density_at(const Context& ctx,
                                           const ModificationParams& p) const override;
  std::vector<double> singular_points(const Context& ctx,
                                      std::span<const ModificationParams> ps) const override;
  std::vector<double> peak_points(const Context& ctx,
                                  std::span<const ModificationParams> ps) const override;
  Outcome sample(const Context& ctx, const ModificationParams& p,
                 std::mt19937_64& rng) const override;

  const BecParams& params() const { return params_; }

 private:
  BecParams params_;
};

}  // namespace mu::bec
