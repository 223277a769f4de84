#include "mu/model_nanobeam.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "mu/specfun.hpp"

namespace mu::nanobeam {
namespace {

using constants::hbar;
using constants::pi;

constexpr double kInf = std::numeric_limits<double>::infinity();

// X(a) = sqrt(pi/2) a erf(a/sqrt2) - 1 + exp(-a^2/2), transverse box factor
double box_factor(double a) {
  if (a < 1.0) {
    const double a2 = a * a;
    double pw = a2, sum = 0.0;  // pw = a^(2n+2) / (2^n n!)
    for (int n = 0; n < 30; ++n) {
      const double term = pw / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
      sum += (n % 2 == 0) ? term : -term;
      if (term < 1e-18 * std::abs(sum)) break;
      pw *= a2 / (2.0 * (n + 1));
    }
    return sum;
  }
  return std::sqrt(pi / 2.0) * a * std::erf(a / std::sqrt(2.0)) - 1.0 + std::exp(-0.5 * a * a);
}

// E[4 k^4 cos^2(k/2) / (pi^2 - k^2)^2] for k ~ N(0, a^2), the longitudinal factor
double sine_mode_factor_series(double a) {
  constexpr int kTerms = 30;
  // 1 + cos(sqrt x) and 1/(pi^2 - x)^2 as power series in x = k^2
  std::array<double, kTerms> c{}, r{};
  c[0] = 2.0;
  double f = 1.0;
  for (int n = 1; n < kTerms; ++n) {
    f *= (2.0 * n - 1.0) * (2.0 * n);
    c[n] = ((n % 2) ? -1.0 : 1.0) / f;
  }
  const double pi2 = pi * pi;
  double pw = 1.0 / (pi2 * pi2);
  for (int n = 0; n < kTerms; ++n) {
    r[n] = (n + 1.0) * pw;
    pw /= pi2;
  }
  double sum = 0.0;
  const double a2 = a * a;
  double moment = 3.0 * a2 * a2;  // E[k^4]
  for (int n = 0; n < kTerms; ++n) {
    double p = 0.0;
    for (int k = 0; k <= n; ++k) p += c[k] * r[n - k];
    const double term = 2.0 * p * moment;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    moment *= a2 * (2.0 * n + 5.0);
  }
  return sum;
}

double sine_mode_factor(double a) {
  if (a < 0.3) return sine_mode_factor_series(a);
  using cd = std::complex<double>;
  const double e = std::exp(-0.5 * a * a);
  const double s2 = std::sqrt(2.0);
  const cd w0 = specfun::faddeeva(cd(pi / (a * s2), 0.0));
  const cd w1 = specfun::faddeeva(cd(pi / (a * s2), a / s2));
  const cd e0 = std::sqrt(pi / 2.0) / a * (w0 + e * w1);
  const cd e1 = (cd(0.0, pi) * e0 + e + 1.0) / (a * a);
  return pi * pi * e0.real() - pi * pi * e1.real() - 3.0 * pi * e0.imag() + 2.0 * (1.0 + e);
}

void check_sigma(double sigma_q) {
  if (!(sigma_q > 0.0) || !std::isfinite(sigma_q))
    throw DomainError(fmt::format("sigma_q = {} must be positive and finite", sigma_q));
}

void check_context(const Context& ctx) {
  if (!std::isfinite(ctx.t) || ctx.t < 0.0 || !std::isfinite(ctx.theta))
    throw DomainError("nanobeam: context needs finite theta and t >= 0");
  if (ctx.protocol != Protocol::phase_sweep && ctx.protocol != Protocol::time_sweep &&
      ctx.protocol != Protocol::none)
    throw DomainError(fmt::format("nanobeam: protocol '{}' is not a sweep", to_string(ctx.protocol)));
}

}  // namespace

void NanobeamParams::validate() const {
  if (!(eff_mass > 0.0 && omega > 0.0 && sound_speed > 0.0 && density > 0.0 &&
        binding_energy > 0.0 && si_mass > 0.0 && continuum_min_length > 0.0))
    throw DomainError("nanobeam: masses, frequencies, lengths and energies must be positive");
  if (!(delta_omega >= 0.0) || !std::isfinite(phi0))
    throw DomainError("nanobeam: delta_omega must be >= 0 and phi0 finite");
}

double NanobeamParams::length_z() const { return pi * sound_speed / omega; }

double NanobeamParams::length_x() const { return std::sqrt(2.0 * eff_mass / (density * length_z())); }

double NanobeamParams::atom_count() const {
  const double lx = length_x();
  return density * lx * lx * length_z() / si_mass;
}

double NanobeamParams::critical_momentum() const { return std::sqrt(2.0 * si_mass * binding_energy); }

double geometric_factor_continuum(const NanobeamParams& params, double sigma_q) {
  check_sigma(sigma_q);
  const double l = hbar / sigma_q;
  const double ax = params.length_x() / l;
  const double az = params.length_z() / l;
  const double x = box_factor(ax);
  const double r = params.density / constants::electron_mass;
  const double l2 = l * l;
  return 2.0 * r * r * l2 * l2 * x * x * sine_mode_factor(az);
}

double geometric_factor_atomic(const NanobeamParams& params, double sigma_q) {
  check_sigma(sigma_q);
  const double qc = params.critical_momentum();
  const double u = qc / (std::sqrt(2.0) * sigma_q);
  const double e = std::erf(u);
  const double r = params.si_mass / (hbar * constants::electron_mass);
  const double inner =
      sigma_q * sigma_q * e - std::sqrt(2.0 / pi) * sigma_q * qc * std::exp(-u * u);
  return params.atom_count() * r * r / 4.0 * e * e * inner;
}

double geometric_factor(const NanobeamParams& params, double sigma_q) {
  check_sigma(sigma_q);
  if (hbar / sigma_q >= params.continuum_min_length)
    return geometric_factor_continuum(params, sigma_q);
  return geometric_factor_atomic(params, sigma_q);
}

double xi(const NanobeamParams& params, double sigma_q) {
  return 2.0 * geometric_factor(params, sigma_q) * hbar / (params.eff_mass * params.omega);
}

int outcome_sign(int index) {
  if (index < 0 || index > 3) throw DomainError(fmt::format("nanobeam outcome index {}", index));
  return (index == 0 || index == 3) ? 1 : -1;
}

CoincidenceVector coincidence_probabilities(double theta, double t, double x,
                                            const NanobeamParams& params) {
  if (!(x >= 0.0)) throw DomainError(fmt::format("diffusion strength {} must be >= 0", x));
  const double c = std::cos(theta - params.delta_omega * t - params.phi0);
  // y = 1/(2+x), u = 2y; (2x + x^2) y^4 = x y^3 and 16 y^4 = u^4
  const double y = std::isinf(x) ? 0.0 : 1.0 / (2.0 + x);
  const double u = 2.0 * y;
  const double xy3 = std::isinf(x) ? 0.0 : x * y * y * y;
  // 1 - u^4 without cancellation, 1 - u = x y
  const double one_minus_u4 = std::isinf(x) ? 1.0 : x * y * (1.0 + u) * (1.0 + u * u);
  const double norm = 1.0 - 4.0 * xy3;
  CoincidenceVector p{};
  for (int k = 0; k < 4; ++k) {
    const double sc = outcome_sign(k) * c;
    double v = (0.25 * ((1.0 + sc) - sc * one_minus_u4) - xy3) / norm;
    if (v < 0.0) {
      if (v < -1e-12) throw NumericalError(fmt::format("negative coincidence probability {}", v));
      v = 0.0;
    }
    p[k] = v;
  }
  return p;
}

CoincidenceVector coincidence_derivatives(double theta, double t, double x,
                                          const NanobeamParams& params) {
  if (!(x >= 0.0)) throw DomainError(fmt::format("diffusion strength {} must be >= 0", x));
  CoincidenceVector d{};
  if (std::isinf(x)) return d;
  const double c = std::cos(theta - params.delta_omega * t - params.phi0);
  const double y = 1.0 / (2.0 + x);
  const double u = 2.0 * y;
  const double b = x * y * y * y;
  const double db = y * y * y * (1.0 - 3.0 * x * y);
  const double one_minus_u4 = x * y * (1.0 + u) * (1.0 + u * u);
  const double den = 1.0 - 4.0 * b;
  const double u5 = u * u * u * u * u;
  for (int k = 0; k < 4; ++k) {
    const double sc = outcome_sign(k) * c;
    const double num = 0.25 * ((1.0 + sc) - sc * one_minus_u4) - b;
    const double dnum = -0.5 * sc * u5 - db;
    d[k] = (dnum * den + 4.0 * num * db) / (den * den);
  }
  return d;
}

CoincidenceVector likelihood_coincidence(const Context& ctx, const NanobeamParams& params,
                                         const ModificationParams& mod) {
  check_context(ctx);
  require_momentum_only(mod);
  const double x = std::isinf(mod.tau_e) ? 0.0 : xi(params, mod.sigma_q) * ctx.t / mod.tau_e;
  return coincidence_probabilities(ctx.theta, ctx.t, x, params);
}

NanobeamModel::NanobeamModel(NanobeamParams params) : params_(params) { params_.validate(); }

OutcomeSpace NanobeamModel::outcome_space(const Context& ctx) const {
  check_context(ctx);
  return OutcomeSpace::discrete({kOutcomeLabels.begin(), kOutcomeLabels.end()});
}

std::vector<double> NanobeamModel::probabilities(const Context& ctx,
                                                 const ModificationParams& p) const {
  const auto v = likelihood_coincidence(ctx, params_, p);
  return {v.begin(), v.end()};
}

std::vector<double> NanobeamModel::probability_log_tau_derivatives(const Context& ctx,
                                                                  const ModificationParams& p,
                                                                  double) const {
  check_context(ctx);
  require_momentum_only(p);
  if (std::isinf(p.tau_e)) return std::vector<double>(4, 0.0);
  // x = xi t / tau_e, so d/d ln tau = -x d/dx
  const double x = xi(params_, p.sigma_q) * ctx.t / p.tau_e;
  const auto d = coincidence_derivatives(ctx.theta, ctx.t, x, params_);
  std::vector<double> out(4);
  for (int k = 0; k < 4; ++k) out[k] = -x * d[k];
  return out;
}

double NanobeamModel::log_likelihood(const Outcome& o, const Context& ctx,
                                     const ModificationParams& p) const {
  const auto v = likelihood_coincidence(ctx, params_, p);
  const int k = std::get<int>(o);
  if (k < 0 || k > 3) throw DataError(fmt::format("nanobeam outcome index {} out of range", k));
  return std::log(v[k]);
}

double NanobeamModel::log_likelihood_sum(std::span<const Run* const> runs, const Context& ctx,
                                         const ModificationParams& p) const {
  const auto v = likelihood_coincidence(ctx, params_, p);
  double s = 0.0;
  for (const Run* r : runs) {
    const int k = std::get<int>(r->outcome);
    if (k < 0 || k > 3) throw DataError(fmt::format("nanobeam outcome index {} out of range", k));
    if (r->weight == 0) continue;
    s += static_cast<double>(r->weight) * std::log(v[k]);
  }
  return s;
}

double fit_phase_offset(const Dataset& data, const NanobeamParams& params) {
  if (data.runs.empty()) throw DataError("empty dataset");
  auto nll = [&](double phi) {
    NanobeamParams q = params;
    q.phi0 = phi;
    double s = 0.0;
    for (const auto& r : data.runs) {
      const auto v = coincidence_probabilities(r.context.theta, r.context.t, 0.0, q);
      const double pk = v[std::get<int>(r.outcome)];
      // zero-probability outcomes at perfect visibility get a finite floor
      s -= static_cast<double>(r.weight) * std::log(std::max(pk, 1e-300));
    }
    return s;
  };
  constexpr int kScan = 72;
  double best = -pi, best_v = kInf;
  for (int i = 0; i < kScan; ++i) {
    const double phi = -pi + 2.0 * pi * i / kScan;
    const double v = nll(phi);
    if (v < best_v) {
      best_v = v;
      best = phi;
    }
  }
  const double step = 2.0 * pi / kScan;
  const auto r = boost::math::tools::brent_find_minima(nll, best - step, best + step, 40);
  return std::remainder(r.first, 2.0 * pi);
}

}  // namespace mu::nanobeam
