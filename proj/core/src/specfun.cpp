#include "mu/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "mu/constants.hpp"
#include "mu/core.hpp"

namespace mu::specfun {
namespace {

using constants::pi;

// Below this the imaginary-transform series converges in a handful of terms.
constexpr double kDualThreshold = 2.0;

// Reduce u to [-pi/2, pi/2]; theta3 has period pi in u.
double reduce(double u) {
  double r = std::remainder(u, pi);
  return r;
}

int dual_terms(double s) {
  // exp(-(k pi - pi/2)^2 / s) < 1e-17 beyond this k
  return static_cast<int>(std::ceil(std::sqrt(40.0 * s) / pi)) + 2;
}

int direct_terms(double s) {
  // q^(n^2) < 1e-16 with q = exp(-s), at least 4 terms
  const int n = static_cast<int>(std::ceil(std::sqrt(36.85 / s)));
  return std::max(n, 4);
}

}  // namespace

double theta3_s(double u, double s) {
  if (!(s > 0.0)) throw DomainError("theta3: nome must lie in [0, 1)");
  if (std::isinf(s)) return 1.0;
  const double r = reduce(u);
  if (s < kDualThreshold) {
    const int K = dual_terms(s);
    double sum = 0.0;
    for (int k = -K; k <= K; ++k) {
      const double d = r - k * pi;
      sum += std::exp(-d * d / s);
    }
    return std::sqrt(pi / s) * sum;
  }
  const int N = direct_terms(s);
  double sum = 0.0;
  for (int n = N; n >= 1; --n) sum += std::exp(-s * n * n) * std::cos(2.0 * n * r);
  return 1.0 + 2.0 * sum;
}

double log_theta3_s(double u, double s) {
  if (!(s > 0.0)) throw DomainError("theta3: nome must lie in [0, 1)");
  if (s >= kDualThreshold) return std::log(theta3_s(u, s));
  const double r = reduce(u);
  const int K = dual_terms(s);
  double mx = -std::numeric_limits<double>::infinity();
  for (int k = -K; k <= K; ++k) {
    const double d = r - k * pi;
    mx = std::max(mx, -d * d / s);
  }
  double sum = 0.0;
  for (int k = -K; k <= K; ++k) {
    const double d = r - k * pi;
    sum += std::exp(-d * d / s - mx);
  }
  return 0.5 * std::log(pi / s) + mx + std::log(sum);
}

double theta3(double u, double q) {
  if (!(q >= 0.0) || !(q < 1.0)) throw DomainError("theta3: nome must lie in [0, 1)");
  if (q == 0.0) return 1.0;
  return theta3_s(u, -std::log(q));
}

double erf_real(double x) { return std::erf(x); }

std::complex<double> h_aux(double a, double b) {
  if (!(a > 0.0)) throw DomainError("h_aux: a must be positive");
  using cd = std::complex<double>;
  const cd prefactor = std::sqrt(pi / 2.0) * cd(pi * b * b, 3.0 * a * a - pi * pi);
  const cd z = cd(b, pi / a) / std::sqrt(2.0);
  const cd mz2 = -z * z;
  // exp(-z^2) erf(z) = exp(-z^2 + log erf z), with erf(z) = +-(1 - exp(L)),
  // L = -z^2 + log w(+-iz), kept in log form so that neither factor overflows
  const cd iz(-z.imag(), z.real());
  const double sign = z.real() >= 0.0 ? 1.0 : -1.0;
  const cd L = mz2 + std::log(faddeeva(sign * iz));
  const cd log_one_minus = L.real() > 0.0 ? L + std::log(std::exp(-L) - 1.0) : std::log(1.0 - std::exp(L));
  const cd e = mz2 + log_one_minus;
  if (e.real() > 709.0) {
    const cd dir = prefactor * sign * std::exp(cd(0.0, e.imag()));
    const auto blow = [](double x) {
      return x == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), x);
    };
    return {blow(dir.real()), blow(dir.imag())};
  }
  const cd fused = sign * std::exp(e);
  return prefactor * fused;
}

double log_binomial(long n, long k) {
  if (n < 0 || k < 0 || k > n) throw DomainError("log_binomial: need 0 <= k <= n");
  if (n <= 60) {
    std::uint64_t c = 1;
    const long kk = std::min(k, n - k);
    for (long i = 1; i <= kk; ++i) c = c * static_cast<std::uint64_t>(n - kk + i) / static_cast<std::uint64_t>(i);
    return std::log(static_cast<double>(c));
  }
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace mu::specfun
