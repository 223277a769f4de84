#include <doctest.h>

#include <cmath>

#include "mu/constants.hpp"
#include "mu/oracle.hpp"

using namespace mu;
using namespace mu::oracle;
using constants::hbar;
using constants::pi;

TEST_SUITE("oracle") {

TEST_CASE("spin operators") {
  const double J = 3.5;
  const auto x = spin_x(J), y = spin_y(J), z = spin_z(J);
  const std::complex<double> i(0.0, 1.0);
  CHECK((x * y - y * x - i * z).norm() < 1e-12);
  CHECK(((x * x + y * y + z * z) - J * (J + 1) * Eigen::MatrixXcd::Identity(8, 8)).norm() < 1e-12);
}

TEST_CASE("coherent state and squeezing") {
  const auto c = coherent_state_x(50.0);
  const auto m = moments(c);
  CHECK(m.jz2 == doctest::Approx(25.0).epsilon(1e-10));
  CHECK(m.jx == doctest::Approx(50.0).epsilon(1e-10));
  CHECK(std::abs(c.rho.trace() - 1.0) < 1e-10);

  const auto s = one_axis_squeeze(50.0, 20.0);
  const auto sm = moments(s);
  CHECK(sm.jz2 == doctest::Approx(20.0).epsilon(0.01));
  CHECK(std::abs(sm.jy) < 1e-6 * 50.0);
  CHECK(sm.jz2 * sm.jy2 >= 0.25 * sm.jx * sm.jx * (1 - 1e-9));
  CHECK_THROWS_AS(one_axis_squeeze(50.0, 40.0), DomainError);
}

TEST_CASE("Dicke evolution") {
  const auto s = one_axis_squeeze(20.0, 8.0);
  const auto e = evolve_dicke(s, 1.0, 0.01, 0.05, 7.0);
  CHECK(std::abs(e.rho.trace() - 1.0) < 1e-10);
  CHECK((e.rho - e.rho.adjoint()).norm() < 1e-12);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(e.rho);
  CHECK(es.eigenvalues().minCoeff() > -1e-8);

  // phase flips alone: <J_y> and the transverse length decay as exp(-gamma t / 2)
  const auto c = coherent_state_x(20.0);
  const double g = 0.3, t = 2.0;
  const auto d = moments(evolve_dicke(c, 0.0, 0.0, g, t));
  CHECK(d.jx == doctest::Approx(std::exp(-0.5 * g * t) * 20.0).epsilon(0.01));

  // free rotation at epsilon
  const auto r = moments(evolve_dicke(c, 1.0, 0.0, 0.0, 0.5 * pi));
  CHECK(std::abs(r.jx) < 1e-8);
  CHECK(std::abs(std::abs(r.jy) - 20.0) < 1e-8);

  const auto h = measure_after_recombiner(e);
  CHECK(h.sum() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(h.minCoeff() > -1e-12);
}

TEST_CASE("second-moment law under phase flips") {
  const auto s = one_axis_squeeze(20.0, 6.0);
  const auto m0 = moments(s);
  for (double gt : {0.2, 1.0}) {
    const auto m = moments(evolve_dicke(s, 0.0, 0.0, gt, 1.0));
    // x-y moments at t = 0
    const double jx2 = (spin_x(20.0) * spin_x(20.0) * s.rho).trace().real();
    const double want = 0.5 * (jx2 + m0.jy2) - 0.5 * std::exp(-2.0 * gt) * (jx2 - m0.jy2);
    CHECK(m.jy2 == doctest::Approx(want).epsilon(0.01));
  }
}

TEST_CASE("QRW walk oracle") {
  const qrw::QrwParams p;
  const auto q = qrw_density_matrix_walk(p, make_modification(INFINITY, hbar / p.site_spacing));
  const double want[] = {1.0 / 16, 5.0 / 8, 1.0 / 8, 1.0 / 8, 1.0 / 16};
  for (int k = 0; k < 5; ++k) CHECK(q.full[k] == doctest::Approx(want[k]).epsilon(1e-12));
}

TEST_CASE("nanobeam characteristic-function quadrature") {
  const nanobeam::NanobeamParams p;
  const auto o = nanobeam_char_quadrature(p, 0.5, 1.1, 90e-9);
  CHECK(o[0] + o[1] + o[2] + o[3] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(o[0] == doctest::Approx(o[3]).epsilon(1e-10));
  const double u = nanobeam_geometric_quadrature(p, hbar / 1e-7);
  CHECK(u > 0.0);
  CHECK(nanobeam_atomic_quadrature(p, 1e-3 * p.critical_momentum()) > 0.0);
}

TEST_CASE("shear diffusion Monte Carlo") {
  SUBCASE("no diffusion is a deterministic shear") {
    const auto mc = shear_diffusion_mc(4.0, 0.0, 540.0, 30.0, 8.0, 0.02, 40000, 3);
    const double want = 900.0 + 4.0 * 16.0 * 4e-4 * 64.0;
    CHECK(std::abs(mc.variance - want) < 4.0 * mc.standard_error);
  }
  SUBCASE("no shear keeps the variance") {
    const auto mc = shear_diffusion_mc(0.0, 50.0, 540.0, 30.0, 8.0, 0.02, 40000, 3);
    CHECK(std::abs(mc.variance - 900.0) < 4.0 * mc.standard_error);
  }
  SUBCASE("seeded runs repeat") {
    const auto a = shear_diffusion_mc(4.0, 50.0, 540.0, 30.0, 8.0, 0.02, 10000, 9, 100);
    const auto b = shear_diffusion_mc(4.0, 50.0, 540.0, 30.0, 8.0, 0.02, 10000, 9, 100);
    CHECK(a.variance == b.variance);
  }
}

}
