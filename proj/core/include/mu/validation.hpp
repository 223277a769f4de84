#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mu/model_nanobeam.hpp"
#include "mu/model_qrw.hpp"

// Side-by-side runs of the analytic likelihoods and the brute-force oracles.
namespace mu::validation {

// Largest |analytic - oracle| over the full, left and right site vectors for
// `draws` random (tau_e, sigma_q).
double qrw_oracle_max_difference(const qrw::QrwParams& params, int draws = 20,
                                 std::uint64_t seed = 3);

struct DickeComparison {
  double t = 0.0;                // in units of hbar / epsilon
  double total_variation = 0.0;  // analytic p_J vs exact Dicke histogram
  double oracle_sum = 0.0;
};

// Squeezed state of n_atoms with <J_z^2> = jz_var, evolved with epsilon = 1,
// rates in units of epsilon / hbar. The analytic side integrates p_J over
// each unit bin around m.
std::vector<DickeComparison> dicke_histogram_comparison(int n_atoms, double jz_var, double gamma_p,
                                                        double zeta, std::span<const double> times);

struct CoincidenceComparison {
  double x = 0.0;
  double theta = 0.0;
  double max_rel_difference = 0.0;
  double analytic_sum = 0.0;
};

std::vector<CoincidenceComparison> nanobeam_oracle_comparison(
    const nanobeam::NanobeamParams& params, std::span<const double> xs,
    std::span<const double> thetas, double t);

struct FactorComparison {
  double length_scale = 0.0;  // hbar / sigma_q (m)
  double closed_form = 0.0;
  double quadrature = 0.0;
  double rel_difference = 0.0;
};

std::vector<FactorComparison> geometric_factor_comparison(const nanobeam::NanobeamParams& params,
                                                          std::span<const double> length_scales);
// Closed-form atomic U against the windowed single-atom quadrature.
std::vector<FactorComparison> atomic_factor_comparison(const nanobeam::NanobeamParams& params,
                                                       std::span<const double> length_scales);
// Relative deviation of the atomic U from N (m_Si / m_e)^2 sigma_q^2 / (4 hbar^2)
// at sigma_q = fraction * q_c.
double atomic_small_momentum_deviation(const nanobeam::NanobeamParams& params, double fraction);

struct ShearComparison {
  double variance = 0.0;
  double standard_error = 0.0;
  double expected = 0.0;
  double z = 0.0;
};

ShearComparison shear_diffusion_comparison(double zeta, double gamma_s, double J, double sigma_y0,
                                           double sigma_z0, double t, std::int64_t n_samples,
                                           std::uint64_t seed = 7);

}  // namespace mu::validation
