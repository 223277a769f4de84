#pragma once

#include <functional>
#include <vector>

namespace mu::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite rule for weight exp(-x^2).
Rule gauss_hermite(int n);

// Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);

// Globally adaptive Gauss-Kronrod (7/15) on [a, b]; a or b may be infinite.
// Throws NumericalError if the error estimate misses max(abs_tol, rel_tol |I|).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 0.0, double rel_tol = 1e-10, unsigned max_intervals = 4000);

// Integral of f over [a, b] split at the interior points of `breaks`.
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> breaks, double abs_tol = 0.0,
                       double rel_tol = 1e-10);

}  // namespace mu::quad
