#include <array>
#include <cmath>
#include <complex>

#include "mu/constants.hpp"
#include "mu/specfun.hpp"

namespace mu::specfun {
namespace {

using cd = std::complex<double>;
constexpr double inv_sqrt_pi = 0.5641895835477562869480794515607725858;

// Weideman (1994) rational expansion, N terms.
constexpr int kTerms = 40;

struct WeidemanTable {
  double L;
  std::array<double, kTerms> a;  // highest power first

  WeidemanTable() {
    constexpr int M = 2 * kTerms;
    constexpr int M2 = 2 * M;
    L = std::sqrt(kTerms / std::sqrt(2.0));
    // f sampled on theta_k = k pi / M, k = -M..M-1, with f(-M) = 0
    std::array<double, M2> f{};
    for (int j = 0; j < M2; ++j) {
      const int k = j - M;
      if (k == -M) continue;
      const double t = L * std::tan(0.5 * k * constants::pi / M);
      f[j] = std::exp(-t * t) * (L * L + t * t);
    }
    // a_n = Re(fft(fftshift f))_n / M2 for n = 1..N
    for (int n = 1; n <= kTerms; ++n) {
      double s = 0.0;
      for (int j = 0; j < M2; ++j) {
        const int shifted = (j + M) % M2;
        s += f[shifted] * std::cos(2.0 * constants::pi * n * j / M2);
      }
      a[kTerms - n] = s / M2;
    }
  }
};

const WeidemanTable& table() {
  static const WeidemanTable t;
  return t;
}

// Laplace continued fraction, accurate for |z| large in the upper half plane.
cd continued_fraction(cd z) {
  cd r = z;
  for (int k = 60; k >= 1; --k) r = z - (0.5 * k) / r;
  return cd(0.0, inv_sqrt_pi) / r;
}

cd faddeeva_upper(cd z) {
  if (std::abs(z) > 12.0) return continued_fraction(z);
  const auto& t = table();
  const cd iz(-z.imag(), z.real());
  const cd denom = t.L - iz;
  const cd Z = (t.L + iz) / denom;
  cd p = t.a[0];
  for (int n = 1; n < kTerms; ++n) p = p * Z + t.a[n];
  return 2.0 * p / (denom * denom) + inv_sqrt_pi / denom;
}

}  // namespace

cd faddeeva(cd z) {
  if (z.imag() >= 0.0) return faddeeva_upper(z);
  return 2.0 * std::exp(-z * z) - faddeeva_upper(-z);
}

cd erf_complex(cd z) {
  if (z.imag() == 0.0) return std::erf(z.real());
  if (std::abs(z) < 0.5) {
    // Maclaurin series avoids the cancellation in 1 - exp(-z^2) w(iz)
    const cd z2 = z * z;
    cd term = z, sum = z;
    for (int n = 1; n < 30; ++n) {
      term *= -z2 / static_cast<double>(n);
      const cd add = term / static_cast<double>(2 * n + 1);
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return 2.0 * inv_sqrt_pi * sum;
  }
  const cd iz(-z.imag(), z.real());
  if (z.real() >= 0.0) return 1.0 - std::exp(-z * z) * faddeeva(iz);
  return std::exp(-z * z) * faddeeva(-iz) - 1.0;
}

}  // namespace mu::specfun
