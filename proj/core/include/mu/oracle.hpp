#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "mu/core.hpp"
#include "mu/model_nanobeam.hpp"
#include "mu/model_qrw.hpp"

// Brute-force reference computations. Nothing here calls the analytic
// likelihood code it is meant to check.
namespace mu::oracle {

// Collective spin state in the |J, m> basis, m = -J..J in index order.
struct DickeState {
  double J = 0.0;
  Eigen::MatrixXcd rho;

  int dim() const { return static_cast<int>(rho.rows()); }
};

struct SpinMoments {
  double jx = 0.0, jy = 0.0, jz = 0.0;
  double jy2 = 0.0, jz2 = 0.0;
};

Eigen::MatrixXcd spin_x(double J);
Eigen::MatrixXcd spin_y(double J);
Eigen::MatrixXcd spin_z(double J);

SpinMoments moments(const DickeState& s);

// Coherent state on the equator pointing along +x.
DickeState coherent_state_x(double J);

// One-axis twist of the coherent state followed by the rotation about x that
// moves the squeezed quadrature onto z. Throws DomainError if the target
// variance is above J/2 or below the best the twist can reach.
DickeState one_axis_squeeze(double J, double target_jz_var);

// Exact evolution under H/hbar = epsilon J_z + zeta J_z^2 with J_z phase-flip
// noise normalized so that <J_y> decays as exp(-gamma_p t / 2).
DickeState evolve_dicke(const DickeState& s, double epsilon_over_hbar, double zeta, double gamma_p,
                        double t);

// Distribution of m after exp(-i pi J_x / 2).
Eigen::VectorXd measure_after_recombiner(const DickeState& s);

struct WalkProbabilities {
  qrw::SiteVector full{};
  qrw::SiteVector left{};
  qrw::SiteVector right{};
};

// Four-step walk on 9 half-site positions times 2 internal states, with
// position decoherence applied as Schur factors during pulses and shifts.
WalkProbabilities qrw_density_matrix_walk(const qrw::QrwParams& params,
                                          const ModificationParams& mod);

// Coincidence probabilities from the phase-space overlap of the
// characteristic functions, tensor Gauss-Hermite with `nodes` per axis.
// Throws NumericalError if doubling the node count moves a value by > 1e-4.
nanobeam::CoincidenceVector nanobeam_char_quadrature(const nanobeam::NanobeamParams& params,
                                                     double diffusion, double theta, double t,
                                                     int nodes = 40);
nanobeam::CoincidenceVector nanobeam_char_quadrature(const nanobeam::NanobeamParams& params,
                                                     const ModificationParams& mod, double theta,
                                                     double t, int nodes = 40);

// U(sigma_q) for the sine mode by direct quadrature of the separable
// momentum integrals (no q_c window).
double nanobeam_geometric_quadrature(const nanobeam::NanobeamParams& params, double sigma_q,
                                     double rel_tol = 1e-8);

// Atomic-regime U: independent atoms, each kept only while every momentum
// component of its kick stays below q_c. Direct quadrature of the 1-D factors.
double nanobeam_atomic_quadrature(const nanobeam::NanobeamParams& params, double sigma_q,
                                  double rel_tol = 1e-10);

struct McVariance {
  double variance = 0.0;
  double standard_error = 0.0;
};

// Euler-Maruyama for dj_y = 2 zeta j_z dt, dj_z = sqrt(gamma_s / 2) J dW with
// Gaussian initial conditions; returns the sample variance of j_y(t).
McVariance shear_diffusion_mc(double zeta, double gamma_s, double J, double sigma_y0,
                              double sigma_z0, double t, std::int64_t n_samples,
                              std::uint64_t seed = 1, int steps = 1000, int threads = 1);

}  // namespace mu::oracle
