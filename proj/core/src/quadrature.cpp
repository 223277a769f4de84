#include "mu/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "mu/constants.hpp"
#include "mu/core.hpp"

namespace mu::quad {
namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights mu0 * v0^2.
Rule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
  const Eigen::Index n = offdiag.size() + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = offdiag[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()[i];
    const double v = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v * v;
  }
  return r;
}

}  // namespace

Rule gauss_hermite(int n) {
  if (n < 1) throw DomainError("gauss_hermite: n >= 1");
  Eigen::VectorXd b(n - 1);
  for (int i = 1; i < n; ++i) b[i - 1] = std::sqrt(0.5 * i);
  return golub_welsch(b, std::sqrt(constants::pi));
}

Rule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n >= 1");
  Eigen::VectorXd b(n - 1);
  for (int i = 1; i < n; ++i) b[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
  return golub_welsch(b, 2.0);
}

namespace {

struct Panel {
  double a, b, value, error, l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  Panel p{a, b, 0.0, 0.0, 0.0};
  p.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &p.error,
                                                                          &p.l1);
  return p;
}

double integrate_finite(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, double rel_tol, unsigned max_intervals) {
  // globally adaptive: always bisect the panel with the largest error estimate
  std::priority_queue<Panel> heap;
  heap.push(gk15(f, a, b));
  double value = heap.top().value, error = heap.top().error, l1 = heap.top().l1;
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && heap.size() < max_intervals) {
    const Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    const Panel left = gk15(f, worst.a, mid);
    const Panel right = gk15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
  }
  // re-sum to shed the drift of the running updates
  value = error = l1 = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    l1 += heap.top().l1;
    heap.pop();
  }
  if (!std::isfinite(value)) throw NumericalError("quadrature produced a non-finite value");
  if (error > std::max(abs_tol, 10.0 * rel_tol * std::abs(value)) && error > 1e3 * rel_tol * l1)
    throw NumericalError(fmt::format("quadrature on [{:g}, {:g}] did not converge: {:g} +- {:g}",
                                     a, b, value, error));
  return value;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 double rel_tol, unsigned max_intervals) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, abs_tol, rel_tol, max_intervals);
  const bool lo_inf = std::isinf(a), hi_inf = std::isinf(b);
  if (lo_inf && hi_inf)
    return integrate(f, a, 0.0, 0.5 * abs_tol, rel_tol, max_intervals) +
           integrate(f, 0.0, b, 0.5 * abs_tol, rel_tol, max_intervals);
  if (hi_inf) {
    auto g = [&](double t) {
      const double u = 1.0 - t;
      return f(a + t / u) / (u * u);
    };
    return integrate_finite(g, 0.0, 1.0, abs_tol, rel_tol, max_intervals);
  }
  if (lo_inf) {
    auto g = [&](double t) {
      const double u = 1.0 - t;
      return f(b - t / u) / (u * u);
    };
    return integrate_finite(g, 0.0, 1.0, abs_tol, rel_tol, max_intervals);
  }
  return integrate_finite(f, a, b, abs_tol, rel_tol, max_intervals);
}

double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> breaks, double abs_tol, double rel_tol) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i], hi = breaks[i + 1];
    if (lo < a || hi > b) continue;
    s += integrate(f, lo, hi, abs_tol, rel_tol);
  }
  return s;
}

}  // namespace mu::quad
