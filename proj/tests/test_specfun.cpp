#include <doctest.h>

#include <cmath>
#include <complex>

#include "mu/constants.hpp"
#include "mu/core.hpp"
#include "mu/specfun.hpp"

using namespace mu;
using namespace mu::specfun;
using constants::pi;

TEST_SUITE("specfun") {

TEST_CASE("theta3 values") {
  CHECK(theta3(0.7, 0.0) == 1.0);
  double direct = 1.0;
  for (int n = 1; n < 20; ++n) direct += 2.0 * std::pow(0.5, n * n);
  CHECK(theta3(0.0, 0.5) == doctest::Approx(direct).epsilon(1e-15));
  CHECK(theta3(0.0, 0.5) == doctest::Approx(2.128936827211877).epsilon(1e-14));
  double alt = 1.0;
  for (int n = 1; n < 20; ++n) alt += 2.0 * ((n % 2) ? -1.0 : 1.0) * std::pow(0.3, n * n);
  CHECK(theta3(pi / 2, 0.3) == doctest::Approx(alt).epsilon(1e-14));
  CHECK_THROWS_AS(theta3(0.0, 1.0), DomainError);
}

TEST_CASE("theta3 periodicity and monotonicity") {
  for (double q : {0.1, 0.5, 0.9, 0.99})
    for (double u : {-1.3, 0.2, 2.9})
      CHECK(theta3(u + pi, q) == doctest::Approx(theta3(u, q)).epsilon(1e-12));
  double prev = 0.0;
  for (double q = 0.0; q < 0.99; q += 0.05) {
    const double v = theta3(0.0, q);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("theta3 with nome exp(-s) agrees across the Jacobi transform") {
  for (double s : {0.01, 0.3, 1.0, 3.0, 20.0})
    for (double u : {0.0, 0.4, 1.2}) {
      CHECK(theta3_s(u, s) == doctest::Approx(theta3(u, std::exp(-s))).epsilon(1e-10));
      CHECK(std::exp(log_theta3_s(u, s)) == doctest::Approx(theta3_s(u, s)).epsilon(1e-12));
    }
  // deep dephasing limit
  CHECK(theta3_s(1.0, 50.0) == doctest::Approx(1.0).epsilon(1e-15));
  // the sum can underflow for tiny s away from u = 0, its log does not
  CHECK(std::isfinite(log_theta3_s(pi / 2, 1e-4)));
}

TEST_CASE("erf") {
  CHECK(erf_real(0.0) == 0.0);
  CHECK(erf_real(1.0) == doctest::Approx(0.8427007929497149).epsilon(1e-15));
  for (double x : {0.1, 1.7, 4.0}) CHECK(erf_real(-x) == -erf_real(x));
  const auto z = erf_complex({0.5, 0.0});
  CHECK(z.real() == doctest::Approx(std::erf(0.5)).epsilon(1e-14));
  CHECK(std::abs(z.imag()) < 1e-15);
  // erf(i) = i erfi(1)
  const auto w = erf_complex({0.0, 1.0});
  CHECK(w.imag() == doctest::Approx(1.6504257587975428).epsilon(1e-13));
}

TEST_CASE("Faddeeva function") {
  CHECK(std::abs(faddeeva({0.0, 0.0}) - std::complex<double>(1.0, 0.0)) < 1e-14);
  // w(iy) = exp(y^2) erfc(y)
  for (double y : {0.5, 3.0, 8.0})
    CHECK(faddeeva({0.0, y}).real() == doctest::Approx(std::exp(y * y) * std::erfc(y)).epsilon(1e-12));
  // asymptotic erfcx(y) = (1 - 1/(2y^2) + 3/(4y^4) - 15/(8y^6)) / (y sqrt(pi))
  const double y = 30.0, y2 = y * y;
  CHECK(faddeeva({0.0, y}).real() ==
        doctest::Approx((1.0 - 0.5 / y2 + 0.75 / (y2 * y2) - 1.875 / (y2 * y2 * y2)) / (y * std::sqrt(pi)))
            .epsilon(1e-9));
}

TEST_CASE("h_aux") {
  // direct evaluation where the exponential does not overflow
  for (double a : {1.0, 3.0}) {
    const std::complex<double> i(0.0, 1.0);
    const double b = 0.4;
    const auto pre = std::sqrt(pi / 2) * (3.0 * i * a * a + pi * b * b - i * pi * pi);
    const auto arg = pi / a - i * b;
    const auto direct = pre * std::exp(arg * arg / 2.0) * erf_complex((i * pi / a + b) / std::sqrt(2.0));
    const auto v = h_aux(a, b);
    CHECK(std::abs(v - direct) < 1e-10 * std::abs(direct));
  }
  for (double a : {1e-3, 1e-1, 10.0, 1e3})
    for (double b : {-1e3, -1.0, 0.0, 2.0, 1e3}) {
      const auto v = h_aux(a, b);
      CHECK_FALSE(std::isnan(v.real()));
      CHECK_FALSE(std::isnan(v.imag()));
    }
  CHECK_THROWS_AS(h_aux(0.0, 1.0), DomainError);
}

TEST_CASE("log binomial") {
  CHECK(log_binomial(600, 0) == 0.0);
  CHECK(log_binomial(5, 2) == doctest::Approx(std::log(10.0)).epsilon(1e-15));
  long double c = 1;
  for (int k = 1; k <= 10; ++k) c = c * (20 - k + 1) / k;
  CHECK(log_binomial(20, 10) == doctest::Approx(std::log(static_cast<double>(c))).epsilon(1e-14));
  const double ref = 828.0055785680923773;  // exact big-integer value
  CHECK(log_binomial(1200, 600) == doctest::Approx(ref).epsilon(1e-10));
  CHECK_THROWS_AS(log_binomial(5, 6), DomainError);
}

}
