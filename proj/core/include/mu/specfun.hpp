#pragma once

#include <complex>

namespace mu::specfun {

// Jacobi theta function of the third kind, sum_n q^(n^2) exp(2inu), for real u.
double theta3(double u, double q);

// Same function with nome q = exp(-s), s > 0. Small s uses the Jacobi
// imaginary transform, large s the direct series.
double theta3_s(double u, double s);

// log theta3 with nome exp(-s); finite even where theta3_s underflows.
double log_theta3_s(double u, double s);

double erf_real(double x);

// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
std::complex<double> faddeeva(std::complex<double> z);

std::complex<double> erf_complex(std::complex<double> z);

// sqrt(pi/2) (3ia^2 + pi b^2 - i pi^2) exp[(pi/a - ib)^2 / 2] erf[(i pi/a + b)/sqrt 2],
// evaluated without forming the exponential and the error function separately.
// Overflows to infinity when the true magnitude exceeds the double range.
std::complex<double> h_aux(double a, double b);

// log C(n, k)
double log_binomial(long n, long k);

}  // namespace mu::specfun
