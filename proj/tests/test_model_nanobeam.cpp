#include <doctest.h>

#include <cmath>
#include <random>

#include "mu/constants.hpp"
#include "mu/model_nanobeam.hpp"
#include "mu/oracle.hpp"

using namespace mu;
using namespace mu::nanobeam;
using constants::hbar;
using constants::pi;

TEST_SUITE("nanobeam") {

TEST_CASE("mode geometry") {
  const NanobeamParams p;
  CHECK(p.length_z() == doctest::Approx(0.84e-6).epsilon(0.03));
  CHECK(p.length_x() == doctest::Approx(0.31e-6).epsilon(0.03));
  CHECK(p.critical_momentum() == doctest::Approx(std::sqrt(2 * p.si_mass * p.binding_energy)));
}

TEST_CASE("geometric factor") {
  const NanobeamParams p;
  double prev = 0.0;
  for (double len : {1e-3, 1e-4, 1e-5}) {
    const double u = geometric_factor(p, hbar / len);
    CHECK(u > prev);
    prev = u;
  }
  CHECK(geometric_factor(p, hbar / 1e-2) < 1e-6 * geometric_factor(p, hbar / 1e-6));
  const double s = 1e-4 * p.critical_momentum();
  const double r = p.si_mass / constants::electron_mass;
  CHECK(geometric_factor_atomic(p, s) ==
        doctest::Approx(p.atom_count() * r * r * s * s / (4 * hbar * hbar)).epsilon(0.01));
  CHECK(xi(p, hbar / 1e-2) < xi(p, hbar / 1e-6));
  const double u_cont = geometric_factor_continuum(p, hbar / 1e-7);
  CHECK(u_cont == doctest::Approx(oracle::nanobeam_geometric_quadrature(p, hbar / 1e-7)).epsilon(1e-4));
}

TEST_CASE("coincidence limits") {
  const NanobeamParams p;
  const double t = 123e-9;
  const double aligned = p.delta_omega * t + p.phi0;
  const auto v = coincidence_probabilities(aligned, t, 0.0, p);
  CHECK(v[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(v[3] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(v[1]) < 1e-12);
  CHECK(std::abs(v[2]) < 1e-12);
  const auto w = coincidence_probabilities(1.3, t, INFINITY, p);
  for (double x : w) CHECK(x == doctest::Approx(0.25));
  const auto big = coincidence_probabilities(1.3, t, 1e8, p);
  for (double x : big) CHECK(x == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("coincidences sum to one and stay nonnegative") {
  const NanobeamParams p;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> th(-pi, pi), lx(-6, 6), lt(-8, -6);
  for (int i = 0; i < 100; ++i) {
    const auto v = coincidence_probabilities(th(rng), std::pow(10.0, lt(rng)), std::pow(10.0, lx(rng)), p);
    CHECK(v[0] + v[1] + v[2] + v[3] == doctest::Approx(1.0).epsilon(1e-15));
    for (double x : v) CHECK(x >= 0.0);
  }
}

TEST_CASE("derivative in x") {
  const NanobeamParams p;
  for (double x : {1e-3, 0.3, 2.0, 50.0}) {
    const auto d = coincidence_derivatives(0.7, 100e-9, x, p);
    const double h = 1e-6 * x;
    const auto up = coincidence_probabilities(0.7, 100e-9, x + h, p);
    const auto dn = coincidence_probabilities(0.7, 100e-9, x - h, p);
    for (int k = 0; k < 4; ++k) CHECK(d[k] == doctest::Approx((up[k] - dn[k]) / (2 * h)).epsilon(1e-4).scale(1e-9));
  }
}

TEST_CASE("oracle agreement") {
  const NanobeamParams p;
  for (double x : {0.1, 1.0}) {
    const auto a = coincidence_probabilities(2.0, 80e-9, x, p);
    const auto o = oracle::nanobeam_char_quadrature(p, x, 2.0, 80e-9);
    for (int k = 0; k < 4; ++k) CHECK(a[k] == doctest::Approx(o[k]).epsilon(0.05));
    CHECK(o[0] == doctest::Approx(o[3]).epsilon(1e-10));
    CHECK(o[1] == doctest::Approx(o[2]).epsilon(1e-10));
  }
}

TEST_CASE("phase offset fit") {
  NanobeamParams p;
  const NanobeamModel truth(p);
  Dataset d{"nanobeam", {}};
  std::mt19937_64 rng(5);
  const double t = 100e-9;
  for (double theta = -pi; theta < pi; theta += 0.25) {
    const Context ctx{t, theta, Protocol::phase_sweep};
    for (int i = 0; i < 60; ++i)
      d.runs.push_back(Run{truth.sample(ctx, make_modification(INFINITY, hbar / 1e-7), rng), ctx, 1});
  }
  NanobeamParams guess = p;
  guess.phi0 = 0.0;
  const double fitted = fit_phase_offset(d, guess);
  CHECK(std::remainder(fitted - p.phi0, 2 * pi) == doctest::Approx(0.0).scale(1.0).epsilon(0.1));
}

}
