#include "mu/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "mu/constants.hpp"
#include "mu/quadrature.hpp"
#include "mu/specfun.hpp"

namespace mu::oracle {
namespace {

using cd = std::complex<double>;
using constants::hbar;
using constants::pi;

int dimension(double J) {
  const double two_j = 2.0 * J;
  if (!(J >= 0.5) || std::abs(two_j - std::round(two_j)) > 1e-9)
    throw DomainError(fmt::format("spin J = {} must be a positive multiple of 1/2", J));
  return static_cast<int>(std::lround(two_j)) + 1;
}

double m_of(double J, int k) { return -J + k; }

Eigen::MatrixXcd raising(double J) {
  const int n = dimension(J);
  Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    const double m = m_of(J, k);
    jp(k + 1, k) = std::sqrt(J * (J + 1.0) - m * (m + 1.0));
  }
  return jp;
}

// exp(-i angle J_x) from the eigenbasis of the real symmetric J_x
Eigen::MatrixXcd rotation_x(double J, double angle) {
  const Eigen::MatrixXd jx = spin_x(J).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jx);
  const Eigen::VectorXd& ev = es.eigenvalues();
  Eigen::VectorXcd phase(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) phase(k) = std::exp(cd(0.0, -angle * ev(k)));
  const Eigen::MatrixXcd v = es.eigenvectors().cast<cd>();
  return v * phase.asDiagonal() * v.adjoint();
}

double real_trace(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& op) {
  return (rho * op).trace().real();
}

Eigen::VectorXcd twisted_coherent(double J, double mu) {
  const int n = dimension(J);
  Eigen::VectorXcd psi(n);
  const long two_j = n - 1;
  for (int k = 0; k < n; ++k) {
    const double m = m_of(J, k);
    const double amp = std::exp(0.5 * (specfun::log_binomial(two_j, k) - two_j * std::log(2.0)));
    psi(k) = amp * std::exp(cd(0.0, -0.5 * mu * m * m));
  }
  return psi;
}

struct Squeeze {
  double min_var;
  double angle;  // rotation about x that brings the minimum onto z
};

Squeeze squeeze_of(double J, double mu, const Eigen::MatrixXcd& jy, const Eigen::MatrixXcd& jz) {
  const Eigen::VectorXcd psi = twisted_coherent(J, mu);
  const double vyy = (psi.adjoint() * jy * jy * psi)(0).real();
  const double vzz = (psi.adjoint() * jz * jz * psi)(0).real();
  const double cyz = 0.5 * (psi.adjoint() * (jy * jz + jz * jy) * psi)(0).real();
  const double mean = 0.5 * (vyy + vzz);
  const double half = std::sqrt(0.25 * (vyy - vzz) * (vyy - vzz) + cyz * cyz);
  return {mean - half, 0.5 * std::atan2(-2.0 * cyz, vyy - vzz)};
}

// Integral over [t0, t0 + T] of 1 - exp(-c^2 D(t)^2) for D linear from d0 to d1, divided by T.
double mean_deficit(double d0, double d1, double c, double scale) {
  if (std::abs(d1 - d0) <= 1e-9 * scale) return -std::expm1(-c * c * d0 * d0);
  const double mean_k = std::sqrt(pi) / (2.0 * c) * (std::erf(c * d1) - std::erf(c * d0)) / (d1 - d0);
  return 1.0 - mean_k;
}

}  // namespace

Eigen::MatrixXcd spin_x(double J) {
  const Eigen::MatrixXcd jp = raising(J);
  return 0.5 * (jp + jp.adjoint());
}

Eigen::MatrixXcd spin_y(double J) {
  const Eigen::MatrixXcd jp = raising(J);
  return (jp - jp.adjoint()) / cd(0.0, 2.0);
}

Eigen::MatrixXcd spin_z(double J) {
  const int n = dimension(J);
  Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) jz(k, k) = m_of(J, k);
  return jz;
}

SpinMoments moments(const DickeState& s) {
  const auto jx = spin_x(s.J), jy = spin_y(s.J), jz = spin_z(s.J);
  SpinMoments m;
  m.jx = real_trace(s.rho, jx);
  m.jy = real_trace(s.rho, jy);
  m.jz = real_trace(s.rho, jz);
  m.jy2 = real_trace(s.rho, jy * jy);
  m.jz2 = real_trace(s.rho, jz * jz);
  return m;
}

DickeState coherent_state_x(double J) {
  const Eigen::VectorXcd psi = twisted_coherent(J, 0.0);
  return {J, psi * psi.adjoint()};
}

DickeState one_axis_squeeze(double J, double target_jz_var) {
  if (!(target_jz_var > 0.0) || target_jz_var > 0.5 * J * (1.0 + 1e-12))
    throw DomainError(fmt::format("squeezing target {} outside (0, J/2]", target_jz_var));
  const auto jy = spin_y(J), jz = spin_z(J);
  if (target_jz_var >= 0.5 * J * (1.0 - 1e-12)) return coherent_state_x(J);

  // the reachable minimum lies below mu ~ J^(-2/3); scan up to well past it
  const double mu_max = 4.0 * std::pow(J, -2.0 / 3.0);
  constexpr int kScan = 400;
  double mu_best = 0.0, v_best = 0.5 * J;
  for (int i = 1; i <= kScan; ++i) {
    const double mu = mu_max * i / kScan;
    const double v = squeeze_of(J, mu, jy, jz).min_var;
    if (v < v_best) {
      v_best = v;
      mu_best = mu;
    } else if (v > 1.5 * v_best) {
      break;
    }
  }
  if (target_jz_var < v_best)
    throw DomainError(fmt::format("squeezing target {} below the reachable minimum {:.4g}",
                                  target_jz_var, v_best));
  double lo = 0.0, hi = mu_best;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * mu_best; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (squeeze_of(J, mid, jy, jz).min_var > target_jz_var)
      lo = mid;
    else
      hi = mid;
  }
  const double mu = 0.5 * (lo + hi);
  const Squeeze sq = squeeze_of(J, mu, jy, jz);
  const Eigen::VectorXcd psi = twisted_coherent(J, mu);
  DickeState best{J, {}};
  double best_var = 0.0;
  for (double sign : {1.0, -1.0}) {
    const Eigen::VectorXcd rotated = rotation_x(J, sign * sq.angle) * psi;
    const double v = (rotated.adjoint() * jz * jz * rotated)(0).real();
    if (best.rho.size() == 0 || v < best_var) {
      best_var = v;
      best.rho = rotated * rotated.adjoint();
    }
  }
  return best;
}

DickeState evolve_dicke(const DickeState& s, double epsilon_over_hbar, double zeta, double gamma_p,
                        double t) {
  if (!(gamma_p >= 0.0)) throw DomainError("gamma_p must be >= 0");
  if (!(t >= 0.0)) throw DomainError("t must be >= 0");
  DickeState out = s;
  const int n = s.dim();
  for (int a = 0; a < n; ++a) {
    const double ma = m_of(s.J, a);
    for (int b = 0; b < n; ++b) {
      const double mb = m_of(s.J, b);
      const double dm = ma - mb;
      const double phase = (epsilon_over_hbar * dm + zeta * (ma * ma - mb * mb)) * t;
      out.rho(a, b) *= std::exp(cd(-0.5 * gamma_p * dm * dm * t, -phase));
    }
  }
  return out;
}

Eigen::VectorXd measure_after_recombiner(const DickeState& s) {
  const Eigen::MatrixXcd r = rotation_x(s.J, 0.5 * pi);
  const Eigen::MatrixXcd out = r * s.rho * r.adjoint();
  Eigen::VectorXd p(out.rows());
  for (Eigen::Index k = 0; k < out.rows(); ++k) p(k) = std::max(out(k, k).real(), 0.0);
  return p;
}

// ---------------------------------------------------------------------------

WalkProbabilities qrw_density_matrix_walk(const qrw::QrwParams& params,
                                          const ModificationParams& mod) {
  params.validate();
  require_momentum_only(mod);
  constexpr int kSites = 9;  // half-site positions -4..4
  constexpr int kDim = 2 * kSites;
  const double d = params.site_spacing;
  const double ratio = params.atom_mass / constants::electron_mass;
  const double rate = std::isinf(mod.tau_e) ? 0.0 : ratio * ratio / mod.tau_e;
  const double c = mod.sigma_q / (std::sqrt(2.0) * hbar);

  // index = 2 * position + spin; spin 0 moves right, spin 1 moves left
  auto pos = [&](int i) { return (i / 2 - 4) * 0.5 * d; };
  auto vel = [&](int i) { return (i % 2 == 0) ? 0.5 * d : -0.5 * d; };

  Eigen::MatrixXcd coin = Eigen::MatrixXcd::Zero(kDim, kDim);
  Eigen::MatrixXcd shift = Eigen::MatrixXcd::Zero(kDim, kDim);
  const double h = 1.0 / std::sqrt(2.0);
  for (int x = 0; x < kSites; ++x) {
    coin(2 * x, 2 * x) = h;
    coin(2 * x, 2 * x + 1) = h;
    coin(2 * x + 1, 2 * x) = h;
    coin(2 * x + 1, 2 * x + 1) = -h;
    if (x + 1 < kSites) shift(2 * (x + 1), 2 * x) = 1.0;
    if (x - 1 >= 0) shift(2 * (x - 1) + 1, 2 * x + 1) = 1.0;
  }
  Eigen::MatrixXd hold(kDim, kDim), ramp(kDim, kDim);
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      const double d0 = pos(i) - pos(j);
      const double d1 = d0 + vel(i) - vel(j);
      hold(i, j) = std::exp(-rate * params.t_rest * -std::expm1(-c * c * d0 * d0));
      ramp(i, j) = std::exp(-rate * params.t_shift * mean_deficit(d0, d1, c, d));
    }
  }

  auto run = [&](int postselect_spin) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(kDim, kDim);
    rho(2 * 4 + 1, 2 * 4 + 1) = 1.0;
    for (int step = 0; step < 4; ++step) {
      rho = coin * rho * coin.adjoint();
      rho = rho.cwiseProduct(hold.cast<cd>());
      rho = rho.cwiseProduct(ramp.cast<cd>());
      rho = shift * rho * shift.adjoint();
      if (step == 0 && postselect_spin >= 0) {
        for (int i = 0; i < kDim; ++i)
          for (int j = 0; j < kDim; ++j)
            if (i % 2 != postselect_spin || j % 2 != postselect_spin) rho(i, j) = 0.0;
        rho /= rho.trace().real();
      }
    }
    qrw::SiteVector p{};
    for (int k = 0; k < 5; ++k) {
      const int x = 2 * k;
      p[k] = rho(2 * x, 2 * x).real() + rho(2 * x + 1, 2 * x + 1).real();
    }
    return p;
  };

  WalkProbabilities w;
  w.full = run(-1);
  w.left = run(1);
  w.right = run(0);
  return w;
}

// ---------------------------------------------------------------------------

namespace {

nanobeam::CoincidenceVector char_quadrature_once(double diffusion, double theta, double beta,
                                                 int nodes) {
  const auto rule = quad::gauss_hermite(nodes);
  const double scale = 2.0 / std::sqrt(2.0 + diffusion);
  const double cb = std::cos(beta), sb = -std::sin(beta);
  const double ct = std::cos(theta), st = std::sin(theta);
  // accumulators: [s1][term] where term 0 is the constant part of eta, 1 the s2 part
  double acc[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  const int n = nodes;
  std::vector<double> u(n), w(n);
  for (int i = 0; i < n; ++i) {
    u[i] = scale * rule.nodes[i];
    w[i] = rule.weights[i];
  }
  for (int a = 0; a < n; ++a) {
    const double x1 = u[a];
    for (int b = 0; b < n; ++b) {
      const double p1 = u[b];
      const double wab = w[a] * w[b];
      for (int c = 0; c < n; ++c) {
        const double x2 = u[c];
        for (int e = 0; e < n; ++e) {
          const double p2 = u[e];
          const double wt = wab * w[c] * w[e];
          // mode 2 lags mode 1 by beta
          const double x2r = cb * x2 + sb * p2;
          const double p2r = cb * p2 - sb * x2;
          const double cross = ct * (p1 * p2 + x1 * x2) + st * (p1 * x2 - p2 * x1);
          for (int s = 0; s < 2; ++s) {
            const double sg = s == 0 ? 1.0 : -1.0;
            const double qp = sg * p1 + p2r;
            const double qx = sg * x1 + x2r;
            const double chi = 0.5 * (1.0 - 0.25 * qp * qp - 0.25 * qx * qx);
            acc[s][0] += wt * chi;
            acc[s][1] += wt * chi * cross;
          }
        }
      }
    }
  }
  const double jac = scale * scale * scale * scale;
  nanobeam::CoincidenceVector p{};
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) {
      const double sg2 = s2 == 0 ? 1.0 : -1.0;
      const double integral = jac * (acc[s1][0] + sg2 * acc[s1][1]);
      p[2 * s1 + s2] = 0.25 - integral / (8.0 * pi * pi);
    }
  }
  double total = 0.0;
  for (double v : p) total += v;
  for (double& v : p) v /= total;
  return p;
}

}  // namespace

nanobeam::CoincidenceVector nanobeam_char_quadrature(const nanobeam::NanobeamParams& params,
                                                     double diffusion, double theta, double t,
                                                     int nodes) {
  if (nodes < 40) throw DomainError("characteristic-function quadrature needs >= 40 nodes");
  if (!(diffusion >= 0.0) || !std::isfinite(diffusion))
    throw DomainError("diffusion strength must be finite and >= 0");
  const double beta = params.delta_omega * t + params.phi0;
  const auto p = char_quadrature_once(diffusion, theta, beta, nodes);
  const auto q = char_quadrature_once(diffusion, theta, beta, 2 * nodes);
  for (int k = 0; k < 4; ++k)
    if (std::abs(p[k] - q[k]) > 1e-4)
      throw NumericalError(fmt::format("characteristic-function quadrature not converged: {} vs {}",
                                       p[k], q[k]));
  return q;
}

nanobeam::CoincidenceVector nanobeam_char_quadrature(const nanobeam::NanobeamParams& params,
                                                     const ModificationParams& mod, double theta,
                                                     double t, int nodes) {
  require_momentum_only(mod);
  const double x =
      std::isinf(mod.tau_e) ? 0.0 : nanobeam::xi(params, mod.sigma_q) * t / mod.tau_e;
  return nanobeam_char_quadrature(params, x, theta, t, nodes);
}

double nanobeam_geometric_quadrature(const nanobeam::NanobeamParams& params, double sigma_q,
                                     double rel_tol) {
  if (!(sigma_q > 0.0)) throw DomainError("sigma_q must be positive");
  const double lx = params.length_x();
  const double lz = params.length_z();
  // y = q / sigma_q, a = L sigma_q / hbar, so k L = a y
  const double ax = lx * sigma_q / hbar;
  const double az = lz * sigma_q / hbar;
  auto normal = [](double y) { return std::exp(-0.5 * y * y) / std::sqrt(2.0 * pi); };
  // 2 int_0^12 f(y) dy, split every `period` in y
  auto integrate_even = [&](const std::function<double(double)>& f, double period) {
    constexpr double hi = 12.0;
    const double step = std::max(period, hi / 20000.0);
    double sum = 0.0;
    for (double lo = 0.0; lo < hi; lo += step) {
      // the Gaussian tail panels only need to be accurate relative to the running total
      const double abs_tol = 1e-3 * rel_tol * std::abs(sum);
      sum += quad::integrate(f, lo, std::min(lo + step, hi), abs_tol, rel_tol);
    }
    return 2.0 * sum;
  };
  // |int_{-1/2}^{1/2} exp(-i u x) dx|^2 with u = k L
  auto box2 = [](double u) {
    if (std::abs(u) < 1e-8) return 1.0;
    const double v = 2.0 * std::sin(0.5 * u) / u;
    return v * v;
  };
  // int_{-1/2}^{1/2} sin(pi x) sin(u x) dx = 2 u cos(u / 2) / (pi^2 - u^2),
  // with cos(u / 2) = sin((pi - u) / 2)
  auto sine_mode = [](double u) {
    u = std::abs(u);
    const double gap = pi - u;
    const double sinc = std::abs(gap) < 1e-8 ? 0.5 : std::sin(0.5 * gap) / gap;
    return 2.0 * u * sinc / (pi + u);
  };
  const double ix = integrate_even([&](double y) { return normal(y) * box2(ax * y); }, 2.0 * pi / ax);
  const double iz = integrate_even(
      [&](double y) {
        const double g = sine_mode(az * y);
        return normal(y) * y * y * g * g;
      },
      2.0 * pi / az);
  // restore units: Ix = lx^2 ix, Iz = sigma^2 lz^2 iz
  const double r = params.density / constants::electron_mass;
  const double lx2 = lx * lx;
  return r * r / (2.0 * hbar * hbar) * lx2 * lx2 * ix * ix * sigma_q * sigma_q * lz * lz * iz;
}

double nanobeam_atomic_quadrature(const nanobeam::NanobeamParams& params, double sigma_q,
                                  double rel_tol) {
  if (!(sigma_q > 0.0)) throw DomainError("sigma_q must be positive");
  const double uc = params.critical_momentum() / sigma_q;
  auto normal = [](double y) { return std::exp(-0.5 * y * y) / std::sqrt(2.0 * pi); };
  const double hi = std::min(uc, 40.0);
  const double kept = 2.0 * quad::integrate(normal, 0.0, hi, 0.0, rel_tol);
  const double second =
      2.0 * quad::integrate([&](double y) { return y * y * normal(y); }, 0.0, hi, 0.0, rel_tol);
  const double r = params.si_mass / constants::electron_mass;
  // sin^2 of the mode averages to 1/2 over the atoms
  return params.atom_count() * r * r / (2.0 * hbar * hbar) * 0.5 * kept * kept * second *
         sigma_q * sigma_q;
}

// ---------------------------------------------------------------------------

McVariance shear_diffusion_mc(double zeta, double gamma_s, double J, double sigma_y0,
                              double sigma_z0, double t, std::int64_t n_samples, std::uint64_t seed,
                              int steps, int threads) {
  if (n_samples < 10000) throw DomainError("shear_diffusion_mc needs at least 1e4 samples");
  if (!(gamma_s >= 0.0) || !(t >= 0.0) || steps < 1 || threads < 1)
    throw DomainError("shear_diffusion_mc: invalid arguments");
  const double dt = t / steps;
  const double kick = std::sqrt(0.5 * gamma_s * dt) * J;

  std::vector<double> finals(static_cast<std::size_t>(n_samples));
  auto worker = [&](int tid) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(tid));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::int64_t i = tid; i < n_samples; i += threads) {
      double jy = sigma_y0 * normal(rng);
      double jz = sigma_z0 * normal(rng);
      for (int k = 0; k < steps; ++k) {
        jy += 2.0 * zeta * jz * dt;
        jz += kick * normal(rng);
      }
      finals[static_cast<std::size_t>(i)] = jy;
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker, k);
    for (auto& th : pool) th.join();
  }

  const double n = static_cast<double>(n_samples);
  double mean = 0.0;
  for (double v : finals) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : finals) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  const double var = m2 / (n - 1.0);
  const double mu4 = m4 / n;
  const double v2 = m2 / n;
  return {var, std::sqrt(std::max(mu4 - v2 * v2, 0.0) / n)};
}

}  // namespace mu::oracle
