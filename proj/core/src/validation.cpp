#include "mu/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mu/constants.hpp"
#include "mu/model_bec.hpp"
#include "mu/oracle.hpp"
#include "mu/quadrature.hpp"

namespace mu::validation {

using constants::hbar;
using constants::pi;

double qrw_oracle_max_difference(const qrw::QrwParams& params, int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_tau(-6.0, 8.0), log_len(-2.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double tau = std::pow(10.0, log_tau(rng));
    const double len = params.site_spacing * std::pow(10.0, log_len(rng));
    const auto mod = make_modification(tau, hbar / len);
    const auto w = oracle::qrw_density_matrix_walk(params, mod);
    const auto f = qrw::site_probabilities(Protocol::full, params, mod);
    const auto l = qrw::site_probabilities(Protocol::postselect_left, params, mod);
    const auto r = qrw::site_probabilities(Protocol::postselect_right, params, mod);
    for (int k = 0; k < 5; ++k)
      worst = std::max({worst, std::abs(f[k] - w.full[k]), std::abs(l[k] - w.left[k]),
                        std::abs(r[k] - w.right[k])});
  }
  return worst;
}

std::vector<DickeComparison> dicke_histogram_comparison(int n_atoms, double jz_var, double gamma_p,
                                                        double zeta, std::span<const double> times) {
  const double J = 0.5 * n_atoms;
  const auto state = oracle::one_axis_squeeze(J, jz_var);
  const auto mom = oracle::moments(state);

  bec::BecParams bp;
  bp.n_atoms = n_atoms;
  bp.epsilon_over_hbar = 1.0;
  bp.zeta = zeta;
  bp.jz_var0 = mom.jz2;
  bp.jy_var0 = mom.jy2;
  bec::BecRates rates;
  rates.gamma_p = gamma_p;

  std::vector<DickeComparison> out;
  for (double t : times) {
    const auto hist = oracle::measure_after_recombiner(oracle::evolve_dicke(state, 1.0, zeta, gamma_p, t));
    const double s = bec::log_inv_g_double_well(bp, rates, t);
    DickeComparison c;
    c.t = t;
    double tv = 0.0;
    for (int k = 0; k < hist.size(); ++k) {
      const double m = -J + k;
      const double lo = std::max(m - 0.5, -J), hi = std::min(m + 0.5, J);
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      // m = mid + half sin(psi) absorbs the inverse square root at +-J
      const double q = quad::integrate(
          [&](double psi) {
            return std::exp(bec::log_p_j(mid + half * std::sin(psi), n_atoms / 2, bp, s, t)) * half *
                   std::cos(psi);
          },
          -0.5 * pi, 0.5 * pi, 1e-12, 1e-8);
      tv += std::abs(q - hist(k));
      c.oracle_sum += hist(k);
    }
    c.total_variation = 0.5 * tv;
    out.push_back(c);
  }
  return out;
}

std::vector<CoincidenceComparison> nanobeam_oracle_comparison(
    const nanobeam::NanobeamParams& params, std::span<const double> xs,
    std::span<const double> thetas, double t) {
  std::vector<CoincidenceComparison> out;
  for (double x : xs)
    for (double theta : thetas) {
      const auto a = nanobeam::coincidence_probabilities(theta, t, x, params);
      const auto o = oracle::nanobeam_char_quadrature(params, x, theta, t);
      CoincidenceComparison c;
      c.x = x;
      c.theta = theta;
      for (int k = 0; k < 4; ++k) {
        c.analytic_sum += a[k];
        const double scale = std::max(std::abs(o[k]), 1e-12);
        c.max_rel_difference = std::max(c.max_rel_difference, std::abs(a[k] - o[k]) / scale);
      }
      out.push_back(c);
    }
  return out;
}

std::vector<FactorComparison> geometric_factor_comparison(const nanobeam::NanobeamParams& params,
                                                          std::span<const double> length_scales) {
  std::vector<FactorComparison> out;
  for (double len : length_scales) {
    FactorComparison c;
    c.length_scale = len;
    c.closed_form = nanobeam::geometric_factor_continuum(params, hbar / len);
    c.quadrature = oracle::nanobeam_geometric_quadrature(params, hbar / len);
    c.rel_difference = std::abs(c.closed_form / c.quadrature - 1.0);
    out.push_back(c);
  }
  return out;
}

std::vector<FactorComparison> atomic_factor_comparison(const nanobeam::NanobeamParams& params,
                                                       std::span<const double> length_scales) {
  std::vector<FactorComparison> out;
  for (double len : length_scales) {
    FactorComparison c;
    c.length_scale = len;
    c.closed_form = nanobeam::geometric_factor_atomic(params, hbar / len);
    c.quadrature = oracle::nanobeam_atomic_quadrature(params, hbar / len);
    c.rel_difference = std::abs(c.closed_form / c.quadrature - 1.0);
    out.push_back(c);
  }
  return out;
}

double atomic_small_momentum_deviation(const nanobeam::NanobeamParams& params, double fraction) {
  const double sigma = fraction * params.critical_momentum();
  const double r = params.si_mass / constants::electron_mass;
  const double limit = params.atom_count() * r * r * sigma * sigma / (4.0 * hbar * hbar);
  return std::abs(nanobeam::geometric_factor_atomic(params, sigma) / limit - 1.0);
}

ShearComparison shear_diffusion_comparison(double zeta, double gamma_s, double J, double sigma_y0,
                                           double sigma_z0, double t, std::int64_t n_samples,
                                           std::uint64_t seed) {
  const auto mc = oracle::shear_diffusion_mc(zeta, gamma_s, J, sigma_y0, sigma_z0, t, n_samples, seed);
  ShearComparison c;
  c.variance = mc.variance;
  c.standard_error = mc.standard_error;
  c.expected = sigma_y0 * sigma_y0 +
               4.0 * zeta * zeta * t * t * (sigma_z0 * sigma_z0 + J * J * gamma_s * t / 6.0);
  c.z = (c.variance - c.expected) / c.standard_error;
  return c;
}

}  // namespace mu::validation
