#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mu/constants.hpp"
#include "mu/model_qrw.hpp"
#include "mu/oracle.hpp"

using namespace mu;
using namespace mu::qrw;
using constants::hbar;

namespace {
const QrwParams kDefault{};
const double kTenth = hbar / (kDefault.site_spacing / 10.0);
}  // namespace

TEST_SUITE("qrw") {

TEST_CASE("reduction factor limits") {
  CHECK(reduction_factor(kDefault.t_rest, kDefault, make_modification(INFINITY, kTenth)) == 1.0);
  CHECK(reduction_factor(kDefault.t_rest, kDefault, make_modification(1.0, hbar / 1e3)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  const double a = mass_amplification(kDefault);
  const double r1 = reduction_factor(kDefault.t_rest, kDefault, make_modification(3e-6 * a, kTenth));
  const double r2 = reduction_factor(kDefault.t_rest, kDefault, make_modification(3e-5 * a, kTenth));
  CHECK(r1 < r2);
  CHECK(r2 < 1.0);
  CHECK(r1 > 0.0);
}

TEST_CASE("reduction factor against the walk oracle") {
  // tau_e m_e^2 / m_Cs^2 = 100 us: the left-protocol vector carries R directly
  const double tau = 100e-6 * mass_amplification(kDefault);
  const auto mod = make_modification(tau, kTenth);
  const auto w = oracle::qrw_density_matrix_walk(kDefault, mod);
  const auto f = site_probabilities(Protocol::full, kDefault, mod);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(f[k] - w.full[k]) < 1e-10);
}

TEST_CASE("site vectors") {
  for (double tau : {1e-6, 1.0, 1e6, 1e12}) {
    const auto mod = make_modification(tau, kTenth);
    for (Protocol p : {Protocol::full, Protocol::postselect_left, Protocol::postselect_right}) {
      const auto v = site_probabilities(p, kDefault, mod);
      CHECK(std::accumulate(v.begin(), v.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
      for (double x : v) CHECK(x >= 0.0);
    }
    CHECK(site_probabilities(Protocol::full, kDefault, mod)[0] == doctest::Approx(1.0 / 16));
    const auto l = site_probabilities(Protocol::postselect_left, kDefault, mod);
    const auto r = site_probabilities(Protocol::postselect_right, kDefault, mod);
    for (int k = 0; k < 5; ++k) CHECK(l[k] == doctest::Approx(r[4 - k]));
  }
  CHECK_THROWS_AS(site_probabilities(Protocol::phase_sweep, kDefault, make_modification(1.0, kTenth)),
                  DomainError);
}

TEST_CASE("exact log-tau derivatives match differences") {
  const QrwModel model;
  for (Protocol p : {Protocol::full, Protocol::postselect_left}) {
    const Context ctx{0, 0, p};
    const auto mod = make_modification(3e5, kTenth);
    const auto d = model.probability_log_tau_derivatives(ctx, mod, 1e-4);
    const double h = 1e-5;
    const auto up = model.probabilities(ctx, make_modification(3e5 * std::exp(h), kTenth));
    const auto dn = model.probabilities(ctx, make_modification(3e5 * std::exp(-h), kTenth));
    for (int k = 0; k < 5; ++k) CHECK(d[k] == doctest::Approx((up[k] - dn[k]) / (2 * h)).epsilon(1e-6).scale(1e-12));
  }
}

TEST_CASE("Leggett-Garg left-hand side") {
  double prev = 0.0;
  for (double lt = -8; lt <= 10; lt += 0.5) {
    const auto mod = make_modification(std::pow(10.0, lt), kTenth);
    const double v = leggett_garg_lhs(kDefault, mod);
    CHECK(v >= 0.0);
    CHECK(v >= prev);
    CHECK(leggett_garg_log_lhs(kDefault, mod) > -INFINITY);
    prev = v;
  }
  CHECK(leggett_garg_lhs(kDefault, make_modification(INFINITY, kTenth)) == doctest::Approx(2.0));
  CHECK(std::isfinite(leggett_garg_log_lhs(kDefault, make_modification(1e-12, kTenth))));
  // exponential approach to zero: log LHS proportional to 1/tau_e
  const double a = leggett_garg_log_lhs(kDefault, make_modification(1e-9, kTenth));
  const double b = leggett_garg_log_lhs(kDefault, make_modification(2e-9, kTenth));
  CHECK(a / b == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("heating estimate") {
  const double dur = walk_duration(kDefault);
  CHECK(dur == doctest::Approx(4 * (kDefault.t_shift + kDefault.t_rest)));
  CHECK(heating_check(kDefault, make_modification(INFINITY, kTenth), dur).temperature_rise == 0.0);
  // 3 sigma_q^2 / 2m per kick, kicks at rate A / tau_e, Delta T = 2E / 3k_B
  const double a = mass_amplification(kDefault);
  const auto h = heating_check(kDefault, make_modification(16.75e-6 * a, kTenth), dur);
  const double kicks = dur / 16.75e-6;
  CHECK(h.temperature_rise ==
        doctest::Approx(kicks * kTenth * kTenth / (kDefault.atom_mass * constants::boltzmann)).epsilon(1e-12));
  CHECK(h.temperature_rise == doctest::Approx(12.1e-6).epsilon(0.01));
}

TEST_CASE("model interface") {
  const QrwModel model;
  const Context ctx{0, 0, Protocol::full};
  const auto mod = make_modification(1e4, kTenth);
  const auto p = model.probabilities(ctx, mod);
  for (int k = 0; k < 5; ++k) CHECK(model.log_likelihood(Outcome{k}, ctx, mod) == doctest::Approx(std::log(p[k])));
  CHECK(model.outcome_space(ctx).size() == 5);
}

}
