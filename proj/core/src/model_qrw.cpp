#include "mu/model_qrw.hpp"

#include <algorithm>
#include <cmath>

namespace mu::qrw {
namespace {

// 1 - sqrt(pi) erf(x) / (2x): mean of 1 - exp(-s^2 x^2) for s uniform on [0, 1]
double ramp_deficit(double x) {
  if (x < 0.05) {
    const double x2 = x * x;
    double term = 1.0, sum = 0.0;
    for (int n = 1; n < 12; ++n) {
      term *= -x2 / n;
      sum -= term / (2 * n + 1);
    }
    return sum;
  }
  return 1.0 - std::sqrt(constants::pi) * std::erf(x) / (2.0 * x);
}

void check_protocol(Protocol p) {
  if (p != Protocol::full && p != Protocol::postselect_left && p != Protocol::postselect_right)
    throw DomainError("qrw: protocol must be full, postselect_left or postselect_right");
}

}  // namespace

void QrwParams::validate() const {
  if (!(t_shift > 0.0 && t_rest > 0.0 && site_spacing > 0.0 && atom_mass > 0.0))
    throw DomainError("qrw: all parameters must be positive");
}

double mass_amplification(const QrwParams& params) {
  const double r = params.atom_mass / constants::electron_mass;
  return r * r;
}

namespace {

// -ln R(t_hold)
double reduction_exponent(double t_hold, const QrwParams& params, const ModificationParams& mod) {
  require_momentum_only(mod);
  if (t_hold < 0.0) throw DomainError("qrw: hold time must be non-negative");
  const double rate = mass_amplification(params) / mod.tau_e;
  const double x = params.site_spacing * mod.sigma_q / (std::sqrt(2.0) * constants::hbar);
  const double ramp = 2.0 * params.t_shift * ramp_deficit(x);
  const double hold = t_hold * -std::expm1(-x * x);
  return rate * (ramp + hold);
}

}  // namespace

double reduction_factor(double t_hold, const QrwParams& params, const ModificationParams& mod) {
  return std::exp(-reduction_exponent(t_hold, params, mod));
}

SiteVector site_probabilities(Protocol protocol, const QrwParams& params,
                              const ModificationParams& mod) {
  check_protocol(protocol);
  const double r1 = reduction_factor(params.t_rest, params, mod);
  if (protocol == Protocol::full) {
    const double r2 = reduction_factor(params.t_shift + 2.0 * params.t_rest, params, mod);
    return {1.0 / 16, 0.25 + 0.25 * r1 + 0.125 * r2, 0.375 - 0.25 * r1, 0.25 - 0.125 * r2,
            1.0 / 16};
  }
  const SiteVector left{0.125, 0.375 + 0.25 * r1, 0.375 - 0.25 * r1, 0.125, 0.0};
  if (protocol == Protocol::postselect_left) return left;
  return {left[4], left[3], left[2], left[1], left[0]};
}

double leggett_garg_lhs(const QrwParams& params, const ModificationParams& mod) {
  return reduction_factor(params.t_rest, params, mod) +
         reduction_factor(params.t_shift + 2.0 * params.t_rest, params, mod);
}

double leggett_garg_log_lhs(const QrwParams& params, const ModificationParams& mod) {
  const double a = -reduction_exponent(params.t_rest, params, mod);
  const double b = -reduction_exponent(params.t_shift + 2.0 * params.t_rest, params, mod);
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double leggett_garg_unscaled(const QrwParams& params, const ModificationParams& mod) {
  const auto p = site_probabilities(Protocol::full, params, mod);
  const auto l = site_probabilities(Protocol::postselect_left, params, mod);
  const auto r = site_probabilities(Protocol::postselect_right, params, mod);
  double s = 0.0;
  for (int k = 0; k < 5; ++k) {
    const int site = k - 2;
    const double sgn = site > 0 ? 1.0 : (site < 0 ? -1.0 : 0.0);
    s += sgn * (p[k] - 0.5 * (l[k] + r[k]));
  }
  return s;
}

HeatingEstimate heating_check(const QrwParams& params, const ModificationParams& mod,
                              double duration) {
  require_momentum_only(mod);
  const double rate = mass_amplification(params) / mod.tau_e;
  const double power = 3.0 * mod.sigma_q * mod.sigma_q / (2.0 * params.atom_mass) * rate;
  HeatingEstimate h;
  h.energy = power * duration;
  h.temperature_rise = 2.0 * h.energy / (3.0 * constants::boltzmann);
  return h;
}

double walk_duration(const QrwParams& params) { return 4.0 * (params.t_rest + params.t_shift); }

QrwModel::QrwModel(QrwParams params) : params_(params) { params_.validate(); }

OutcomeSpace QrwModel::outcome_space(const Context& ctx) const {
  check_protocol(ctx.protocol);
  return OutcomeSpace::discrete({"-2", "-1", "0", "1", "2"});
}

std::vector<double> QrwModel::probabilities(const Context& ctx, const ModificationParams& p) const {
  const auto v = site_probabilities(ctx.protocol, params_, p);
  return {v.begin(), v.end()};
}

std::vector<double> QrwModel::probability_log_tau_derivatives(const Context& ctx,
                                                              const ModificationParams& p,
                                                              double) const {
  check_protocol(ctx.protocol);
  // dR/d ln tau = R * (-ln R)
  const double e1 = reduction_exponent(params_.t_rest, params_, p);
  const double d1 = std::exp(-e1) * e1;
  if (ctx.protocol == Protocol::full) {
    const double e2 = reduction_exponent(params_.t_shift + 2.0 * params_.t_rest, params_, p);
    const double d2 = std::exp(-e2) * e2;
    return {0.0, 0.25 * d1 + 0.125 * d2, -0.25 * d1, -0.125 * d2, 0.0};
  }
  std::vector<double> left{0.0, 0.25 * d1, -0.25 * d1, 0.0, 0.0};
  if (ctx.protocol == Protocol::postselect_right) std::reverse(left.begin(), left.end());
  return left;
}

double QrwModel::log_likelihood(const Outcome& o, const Context& ctx,
                                const ModificationParams& p) const {
  const int k = std::get<int>(o);
  if (k < 0 || k > 4) throw DomainError("qrw: site index out of range");
  return std::log(site_probabilities(ctx.protocol, params_, p)[k]);
}

}  // namespace mu::qrw
