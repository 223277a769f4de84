#include "mu/model_bec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mu/bayes.hpp"
#include "mu/quadrature.hpp"
#include "mu/specfun.hpp"

namespace mu::bec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;
// Mixture terms lighter than this (relative to the total) are dropped; with at
// most a few hundred terms the discarded mass stays below 1e-12.
constexpr double kLogWeightCutoff = -34.5;
constexpr int kBlurNodes = 48;

double rate_prefactor(const BecParams& params, const ModificationParams& mod) {
  validate(mod);
  require_momentum_only(mod);
  if (std::isinf(mod.tau_e)) return 0.0;
  const double r = params.atom_mass / constants::electron_mass;
  return r * r / mod.tau_e;
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError(fmt::format("delay time {} must be >= 0", t));
}

void check_context(const Context& ctx) {
  check_time(ctx.t);
  if (ctx.protocol != Protocol::none)
    throw DomainError(fmt::format("BEC models take no protocol, got '{}'", to_string(ctx.protocol)));
}

double outcome_value(const Outcome& o) {
  if (const auto* d = std::get_if<double>(&o)) return *d;
  return static_cast<double>(std::get<int>(o));
}

// Linear-space density; may underflow to 0 far from the ridges.
double p_j_linear(double m, int J, double phase, double s) {
  const double jd = J;
  const double x = m / jd;
  const double a = std::asin(x);
  const double th = specfun::theta3_s(0.5 * (a - phase), s) +
                    specfun::theta3_s(0.5 * (constants::pi - a - phase), s);
  return th / (2.0 * constants::pi * jd * std::sqrt((1.0 - x) * (1.0 + x)));
}

double log_p_j_impl(double m, int J, double phase, double s) {
  const double jd = J;
  if (!(std::abs(m) < jd)) return -kInf;
  const double x = m / jd;
  const double a = std::asin(x);
  const double lt = log_add(specfun::log_theta3_s(0.5 * (a - phase), s),
                            specfun::log_theta3_s(0.5 * (constants::pi - a - phase), s));
  return lt - kLogTwoPi - std::log(jd) - 0.5 * (std::log1p(-x) + std::log1p(x));
}

// log sum_J w_J p_J(m), linear first, log space if that underflows.
double log_mixture_density(double m, const std::vector<int>& Js, const std::vector<double>& lw,
                           double phase, double s) {
  double lin = 0.0;
  for (std::size_t k = 0; k < Js.size(); ++k) {
    if (!(std::abs(m) < Js[k])) continue;
    lin += std::exp(lw[k]) * p_j_linear(m, Js[k], phase, s);
  }
  if (lin > 1e-280) return std::log(lin);
  double acc = -kInf;
  for (std::size_t k = 0; k < Js.size(); ++k) acc = log_add(acc, lw[k] + log_p_j_impl(m, Js[k], phase, s));
  return acc;
}

// Gaussian blur of p_J in the angle a, m' = J sin a, where the integrand has
// no edge singularity. Only the window |m - m'| < kBlurSpan * width contributes.
constexpr double kBlurSpan = 8.0;

double log_blurred_p_j(double m, int J, double phase, double s, double width) {
  static const auto rule = quad::gauss_legendre(kBlurNodes);
  const double jd = J;
  const double lo = std::asin(std::clamp((m - kBlurSpan * width) / jd, -1.0, 1.0));
  const double hi = std::asin(std::clamp((m + kBlurSpan * width) / jd, -1.0, 1.0));
  if (!(hi > lo)) return -kInf;
  const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
  const double log_norm = -0.5 * kLogTwoPi - std::log(width) - kLogTwoPi + std::log(half);
  double acc = -kInf;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double a = mid + half * rule.nodes[k];
    const double z = (m - jd * std::sin(a)) / width;
    const double lt = log_add(specfun::log_theta3_s(0.5 * (a - phase), s),
                              specfun::log_theta3_s(0.5 * (constants::pi - a - phase), s));
    acc = log_add(acc, std::log(rule.weights[k]) + lt - 0.5 * z * z);
  }
  return acc + log_norm;
}

}  // namespace

void BecParams::validate() const {
  if (n_atoms < 2) throw DomainError(fmt::format("n_atoms {} must be >= 2", n_atoms));
  if (!(delta_x >= 0.0)) throw DomainError("delta_x must be >= 0");
  if (!(omega_x > 0.0) || !(omega_y > 0.0) || !(omega_z > 0.0))
    throw DomainError("trap frequencies must be > 0");
  if (!(epsilon_over_hbar >= 0.0) || !std::isfinite(epsilon_over_hbar))
    throw DomainError("epsilon_over_hbar must be finite and >= 0");
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw DomainError("zeta must be finite and >= 0");
  if (!(jz_var0 > 0.0) || !(jy_var0 > 0.0)) throw DomainError("initial variances must be > 0");
  const double j = j0();
  if (jz_var0 * jy_var0 < 0.25 * j * j * (1.0 - 1e-9))
    throw DomainError(fmt::format("<J_z^2>_0 <J_y^2>_0 = {:g} violates the uncertainty bound {:g}",
                                  jz_var0 * jy_var0, 0.25 * j * j));
  if (!(atom_mass > 0.0)) throw DomainError("atom_mass must be > 0");
  if (!(heat_survival_fraction > 0.0 && heat_survival_fraction <= 1.0))
    throw DomainError("heat_survival_fraction must lie in (0, 1]");
  if (!(detector_resolution >= 0.0) || !std::isfinite(detector_resolution))
    throw DomainError("detector_resolution must be finite and >= 0");
}

double minimal_uncertainty_partner(int j, double jz_var) {
  if (!(jz_var > 0.0)) throw DomainError("jz_var must be > 0");
  const double jd = j;
  return jd * jd / (4.0 * jz_var);
}

std::pair<double, double> harmonic_mode_widths(const BecParams& params) {
  if (!(params.omega_x > 0.0) || !(params.omega_y > 0.0))
    throw DomainError("trap frequencies must be > 0");
  const double c = constants::hbar / (2.0 * params.atom_mass);
  return {std::sqrt(c / params.omega_x), std::sqrt(c / params.omega_y)};
}

double mass_amplification(const BecParams& params) {
  const double r = params.atom_mass / constants::electron_mass;
  return r * r;
}

BecRates rates_double_well(const BecParams& params, const ModificationParams& mod) {
  const double pre = rate_prefactor(params, mod);
  const auto [sx, sy] = harmonic_mode_widths(params);
  const double a = mod.sigma_q / constants::hbar;
  const double ux = 2.0 * a * a * sx * sx;
  const double uy = 2.0 * a * a * sy * sy;
  const double half_log_k = 0.5 * (std::log1p(ux) + std::log1p(uy));
  const double e = params.delta_x * params.delta_x * a * a / (2.0 * ux + 2.0);
  BecRates r;
  r.gamma_p = 2.0 * pre * -std::expm1(-e) * std::exp(-half_log_k);
  r.gamma_l = pre * -std::expm1(-half_log_k);
  r.gamma_c = pre * -std::expm1(-e - half_log_k);
  return r;
}

BecRates rates_single_well(const BecParams& params, const ModificationParams& mod) {
  const double pre = rate_prefactor(params, mod);
  const auto [sx, sy] = harmonic_mode_widths(params);
  const double a = mod.sigma_q / constants::hbar;
  const double ux = 2.0 * a * a * sx * sx;
  const double uy = 2.0 * a * a * sy * sy;
  BecRates r;
  r.gamma_s = 2.0 * pre * ux * std::exp(-1.5 * std::log1p(ux) - 0.5 * std::log1p(uy));
  return r;
}

double log_inv_g_double_well(const BecParams& params, const BecRates& rates, double t) {
  check_time(t);
  const double j0 = params.j0();
  const double z = params.zeta;
  return params.jy_var0 / (2.0 * j0 * j0) + 0.5 * rates.gamma_p * t + rates.gamma_l * t / (4.0 * j0) +
         2.0 * z * z * t * t * (params.jz_var0 + rates.gamma_l * j0 * t / 6.0);
}

double g_factor_double_well(const BecParams& params, const BecRates& rates, double t) {
  return std::exp(-log_inv_g_double_well(params, rates, t));
}

double log_inv_g_single_well(const BecParams& params, const BecRates& rates, double t) {
  check_time(t);
  const double j = params.j0();
  const double z = params.zeta;
  return params.jy_var0 / (2.0 * j * j) +
         2.0 * z * z * t * t * (params.jz_var0 + rates.gamma_s * j * j * t / 6.0);
}

double g_factor_single_well(const BecParams& params, const BecRates& rates, double t) {
  return std::exp(-log_inv_g_single_well(params, rates, t));
}

double jz_var_single_well(const BecParams& params, const BecRates& rates, double t) {
  check_time(t);
  const double j2 = static_cast<double>(params.j0()) * params.j0();
  const double jz = params.jz_var0;
  return (jz + j2) / 3.0 + (2.0 * jz - j2) / 3.0 * std::exp(-1.5 * rates.gamma_s * t);
}

double p_j(double m, int J, const BecParams& params, double g, double t) {
  if (J < 1) throw DomainError("p_j needs J >= 1");
  if (!(g >= 0.0 && g <= 1.0)) throw DomainError(fmt::format("nome g = {} outside [0, 1]", g));
  check_time(t);
  if (!(std::abs(m) < J)) return 0.0;
  const double phase = params.epsilon_over_hbar * t;
  if (g == 0.0) {
    const double jd = J;
    return 1.0 / (constants::pi * std::sqrt(jd * jd - m * m));
  }
  const double s = -std::log(g);
  if (s == 0.0) throw DomainError("p_j needs g < 1");
  const double v = p_j_linear(m, J, phase, s);
  if (v > 1e-280) return v;
  return std::exp(log_p_j_impl(m, J, phase, s));
}

double log_p_j(double m, int J, const BecParams& params, double s, double t) {
  if (J < 1) throw DomainError("log_p_j needs J >= 1");
  if (!(s > 0.0)) throw DomainError("log_p_j needs s > 0");
  check_time(t);
  return log_p_j_impl(m, J, params.epsilon_over_hbar * t, s);
}

// ---------------------------------------------------------------------------

BecDoubleWellModel::BecDoubleWellModel(BecParams params) : params_(params) {
  params_.validate();
  const int j0 = params_.j0();
  j_min_ = static_cast<int>(std::ceil(params_.heat_survival_fraction * j0 - 1e-9));
  j_min_ = std::clamp(j_min_, 0, j0);
  log_choose_.resize(static_cast<std::size_t>(j0) + 1);
  for (int j = 0; j <= j0; ++j) log_choose_[j] = specfun::log_binomial(j0, j);
}

OutcomeSpace BecDoubleWellModel::outcome_space(const Context& ctx) const {
  check_context(ctx);
  const double pad = 6.0 * params_.detector_resolution;
  return OutcomeSpace::continuous(-params_.j0() - pad, params_.j0() + pad);
}

double BecDoubleWellModel::log_survival(double t, const ModificationParams& p) const {
  return mixture(t, p, false).log_survival;
}

BecDoubleWellModel::Mixture BecDoubleWellModel::mixture(double t, const ModificationParams& p,
                                                        bool truncate) const {
  check_time(t);
  const auto rates = rates_double_well(params_, p);
  Mixture mix;
  mix.s = log_inv_g_double_well(params_, rates, t);
  const int j0 = params_.j0();
  const double gl = rates.gamma_l * t;
  if (gl == 0.0) {
    mix.J = {j0};
    mix.log_weight = {0.0};
    return mix;
  }
  const double log_p = -gl;
  const double log_q = std::log(-std::expm1(-gl));
  std::vector<double> lj;
  lj.reserve(static_cast<std::size_t>(j0 - j_min_ + 1));
  double mx = -kInf;
  for (int j = j_min_; j <= j0; ++j) {
    const double v = log_choose_[j] + j * log_p + (j0 - j) * log_q;
    lj.push_back(v);
    mx = std::max(mx, v);
  }
  double sum = 0.0;
  for (double v : lj) sum += std::exp(v - mx);
  mix.log_survival = mx + std::log(sum);
  for (int j = j_min_; j <= j0; ++j) {
    const double w = bayes::condition_on_heating(lj[j - j_min_], mix.log_survival);
    if (truncate && w < kLogWeightCutoff) continue;
    if (j == 0) continue;  // point mass at m = 0, excluded by any positive survival threshold
    mix.J.push_back(j);
    mix.log_weight.push_back(w);
  }
  return mix;
}

double BecDoubleWellModel::log_density(double m, const Mixture& mix, double t) const {
  const double phase = params_.epsilon_over_hbar * t;
  if (params_.detector_resolution == 0.0)
    return log_mixture_density(m, mix.J, mix.log_weight, phase, mix.s);
  double acc = -kInf;
  for (std::size_t k = 0; k < mix.J.size(); ++k)
    acc = log_add(acc, mix.log_weight[k] +
                           log_blurred_p_j(m, mix.J[k], phase, mix.s, params_.detector_resolution));
  return acc;
}

double BecDoubleWellModel::log_joint(double m, double t, const ModificationParams& p) const {
  const auto mix = mixture(t, p, false);
  return log_density(m, mix, t) + mix.log_survival;
}

double BecDoubleWellModel::log_likelihood(const Outcome& o, const Context& ctx,
                                          const ModificationParams& p) const {
  const Run r{o, ctx, 1};
  const Run* rp = &r;
  return log_likelihood_sum(std::span<const Run* const>(&rp, 1), ctx, p);
}

double BecDoubleWellModel::log_likelihood_sum(std::span<const Run* const> runs, const Context& ctx,
                                              const ModificationParams& p) const {
  check_context(ctx);
  const auto mix = mixture(ctx.t, p, true);
  Mixture full;
  bool have_full = false;
  double total = 0.0;
  for (const Run* r : runs) {
    const double m = outcome_value(r->outcome);
    double l = log_density(m, mix, ctx.t);
    if (l == -kInf) {
      if (!have_full) {
        full = mixture(ctx.t, p, false);
        have_full = true;
      }
      l = log_density(m, full, ctx.t);
    }
    total += static_cast<double>(r->weight) * l;
  }
  return total;
}

std::function<double(double)> BecDoubleWellModel::density_at(const Context& ctx,
                                                              const ModificationParams& p) const {
  check_context(ctx);
  auto mix = mixture(ctx.t, p, true);
  return [this, mix = std::move(mix), t = ctx.t](double m) { return std::exp(log_density(m, mix, t)); };
}

std::vector<double> BecDoubleWellModel::singular_points(
    const Context& ctx, std::span<const ModificationParams> ps) const {
  std::vector<double> pts;
  if (params_.detector_resolution > 0.0) return pts;
  for (const auto& p : ps) {
    for (int j : mixture(ctx.t, p, true).J) {
      pts.push_back(-j);
      pts.push_back(j);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<double> BecDoubleWellModel::peak_points(const Context& ctx,
                                                    std::span<const ModificationParams> ps) const {
  const double sp = std::sin(params_.epsilon_over_hbar * ctx.t);
  std::vector<double> pts{params_.j0() * sp};
  for (const auto& p : ps) {
    const auto mix = mixture(ctx.t, p, true);
    if (!mix.J.empty()) pts.push_back(mix.J.front() * sp);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

Outcome BecDoubleWellModel::sample(const Context& ctx, const ModificationParams& p,
                                   std::mt19937_64& rng) const {
  check_context(ctx);
  const auto mix = mixture(ctx.t, p, false);
  std::vector<double> w(mix.log_weight.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(mix.log_weight[k]);
  const int J = mix.J[std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng)];
  const double phi = params_.epsilon_over_hbar * ctx.t +
                     std::normal_distribution<double>(0.0, std::sqrt(2.0 * mix.s))(rng);
  double m = J * std::sin(phi);
  if (params_.detector_resolution > 0.0)
    m += std::normal_distribution<double>(0.0, params_.detector_resolution)(rng);
  return Outcome{m};
}

// ---------------------------------------------------------------------------

BecSingleWellModel::BecSingleWellModel(BecParams params) : params_(params) { params_.validate(); }

OutcomeSpace BecSingleWellModel::outcome_space(const Context& ctx) const {
  check_context(ctx);
  return OutcomeSpace::continuous(-params_.j0(), params_.j0());
}

double BecSingleWellModel::log_likelihood(const Outcome& o, const Context& ctx,
                                          const ModificationParams& p) const {
  check_context(ctx);
  const double s = log_inv_g_single_well(params_, rates_single_well(params_, p), ctx.t);
  return log_p_j_impl(outcome_value(o), params_.j0(), params_.epsilon_over_hbar * ctx.t, s);
}

std::function<double(double)> BecSingleWellModel::density_at(const Context& ctx,
                                                              const ModificationParams& p) const {
  check_context(ctx);
  const double s = log_inv_g_single_well(params_, rates_single_well(params_, p), ctx.t);
  const double phase = params_.epsilon_over_hbar * ctx.t;
  const int J = params_.j0();
  return [J, phase, s](double m) {
    if (!(std::abs(m) < J)) return 0.0;
    return p_j_linear(m, J, phase, s);
  };
}

std::vector<double> BecSingleWellModel::singular_points(const Context&,
                                                        std::span<const ModificationParams>) const {
  return {};
}

std::vector<double> BecSingleWellModel::peak_points(const Context& ctx,
                                                    std::span<const ModificationParams>) const {
  return {params_.j0() * std::sin(params_.epsilon_over_hbar * ctx.t)};
}

Outcome BecSingleWellModel::sample(const Context& ctx, const ModificationParams& p,
                                   std::mt19937_64& rng) const {
  check_context(ctx);
  const double s = log_inv_g_single_well(params_, rates_single_well(params_, p), ctx.t);
  const double phi = params_.epsilon_over_hbar * ctx.t +
                     std::normal_distribution<double>(0.0, std::sqrt(2.0 * s))(rng);
  return Outcome{params_.j0() * std::sin(phi)};
}

}  // namespace mu::bec
