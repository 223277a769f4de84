#pragma once

#include <array>

#include "mu/constants.hpp"
#include "mu/core.hpp"

namespace mu::qrw {

struct QrwParams {
  double t_shift = 21e-6;       // T_d, lattice displacement time (s)
  double t_rest = 5e-6;         // T_r, pulse time (s)
  double site_spacing = 433e-9;  // d (m)
  double atom_mass = constants::cesium133_mass;

  void validate() const;
};

// Sites -2..2 in order.
using SiteVector = std::array<double, 5>;

// (m / m_e)^2
double mass_amplification(const QrwParams& params);

double reduction_factor(double t_hold, const QrwParams& params, const ModificationParams& mod);

// protocol is one of full, postselect_left, postselect_right.
SiteVector site_probabilities(Protocol protocol, const QrwParams& params,
                              const ModificationParams& mod);

// R(T_r) + R(T_d + 2 T_r); the inequality is violated when positive.
double leggett_garg_lhs(const QrwParams& params, const ModificationParams& mod);
// Natural log of the same; finite wherever the sum underflows.
double leggett_garg_log_lhs(const QrwParams& params, const ModificationParams& mod);

// sum_l sgn(l) (P(l) - [P_L(l) + P_R(l)] / 2), evaluated from the site vectors.
double leggett_garg_unscaled(const QrwParams& params, const ModificationParams& mod);

struct HeatingEstimate {
  double energy = 0.0;             // J
  double temperature_rise = 0.0;   // K
};

// Isotropic Gaussian momentum kicks of variance sigma_q^2 per axis at rate (m/m_e)^2 / tau_e.
HeatingEstimate heating_check(const QrwParams& params, const ModificationParams& mod,
                              double duration);

// Four steps of pulse plus displacement.
double walk_duration(const QrwParams& params);

class QrwModel final : public ExperimentModel {
 public:
  explicit QrwModel(QrwParams params = {});

  std::string id() const override { return "qrw"; }
  OutcomeSpace outcome_space(const Context& ctx) const override;
  double log_likelihood(const Outcome& o, const Context& ctx,
                        const ModificationParams& p) const override;
  std::vector<double> probabilities(const Context& ctx, const ModificationParams& p) const override;
  std::vector<double> probability_log_tau_derivatives(const Context& ctx,
                                                      const ModificationParams& p,
                                                      double log_step) const override;

  const QrwParams& params() const { return params_; }

 private:
  QrwParams params_;
};

}  // namespace mu::qrw
