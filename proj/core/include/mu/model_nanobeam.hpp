#pragma once

#include <array>

#include "mu/constants.hpp"
#include "mu/core.hpp"

namespace mu::nanobeam {

struct NanobeamParams {
  double eff_mass = 9e-17;                              // rho V_m (kg)
  double omega = 2.0 * constants::pi * 5e9;             // rad/s
  double delta_omega = 2.0 * constants::pi * 45e6;      // rad/s
  double phi0 = 1.8 - 2.0 * constants::pi * 45e6 * 123e-9;  // rad
  double sound_speed = 8433.0;                          // m/s
  double density = 2300.0;                              // kg/m^3
  double binding_energy = 4.6 * constants::electron_volt;  // J
  double si_mass = constants::silicon_mass;             // kg
  // Below this hbar/sigma_q the atomic form of U replaces the continuum form.
  double continuum_min_length = 5e-10;                  // m

  void validate() const;

  // Cuboid holding the mode: L_z = pi v / omega, and L_x = L_y fixed by the
  // mode volume L_x L_y L_z / 2 = eff_mass / density of the sine mode.
  double length_z() const;
  double length_x() const;
  double atom_count() const;         // atoms in the cuboid
  double critical_momentum() const;  // q_c = sqrt(2 m_Si E_b)
};

// Continuum geometric factor for the sine mode on the cuboid, in 1/m^2.
double geometric_factor_continuum(const NanobeamParams& params, double sigma_q);
// Single-atom geometric factor with the |q_i| < q_c window.
double geometric_factor_atomic(const NanobeamParams& params, double sigma_q);
// Continuum form for hbar/sigma_q >= continuum_min_length, atomic form below.
double geometric_factor(const NanobeamParams& params, double sigma_q);

// xi = 2 U hbar / (rho V_m omega)
double xi(const NanobeamParams& params, double sigma_q);

// Outcome index order: (+,+), (+,-), (-,+), (-,-).
inline constexpr std::array<const char*, 4> kOutcomeLabels{"pp", "pm", "mp", "mm"};
int outcome_sign(int index);  // s1 * s2

using CoincidenceVector = std::array<double, 4>;

// Coincidence probabilities at relative phase theta and delay t for a
// diffusion strength x = xi t / tau_e.
CoincidenceVector coincidence_probabilities(double theta, double t, double x,
                                            const NanobeamParams& params);
// d/dx of the above.
CoincidenceVector coincidence_derivatives(double theta, double t, double x,
                                          const NanobeamParams& params);
CoincidenceVector likelihood_coincidence(const Context& ctx, const NanobeamParams& params,
                                         const ModificationParams& mod);

class NanobeamModel final : public ExperimentModel {
 public:
  explicit NanobeamModel(NanobeamParams params = {});

  std::string id() const override { return "nanobeam"; }
  OutcomeSpace outcome_space(const Context& ctx) const override;
  double log_likelihood(const Outcome& o, const Context& ctx,
                        const ModificationParams& p) const override;
  std::vector<double> probabilities(const Context& ctx, const ModificationParams& p) const override;
  std::vector<double> probability_log_tau_derivatives(const Context& ctx,
                                                      const ModificationParams& p,
                                                      double log_step) const override;
  double log_likelihood_sum(std::span<const Run* const> runs, const Context& ctx,
                            const ModificationParams& p) const override;

  const NanobeamParams& params() const { return params_; }

 private:
  NanobeamParams params_;
};

// Maximum-likelihood initial phase at tau_e = infinity, searched over [-pi, pi).
double fit_phase_offset(const Dataset& data, const NanobeamParams& params);

}  // namespace mu::nanobeam
