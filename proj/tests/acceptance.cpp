// Acceptance checks. One criterion per invocation:  mu_acceptance --criterion N
// Prints one PASS/FAIL line for the criterion, with detail lines indented
// underneath, and exits 0 on pass, 1 on fail.

#include <CLI11.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mu/bayes.hpp"
#include "mu/config.hpp"
#include "mu/constants.hpp"
#include "mu/model_bec.hpp"
#include "mu/model_nanobeam.hpp"
#include "mu/model_qrw.hpp"
#include "mu/pipeline.hpp"
#include "mu/simulate.hpp"
#include "mu/validation.hpp"

using namespace mu;
using constants::hbar;
using constants::pi;

namespace {

struct Verdict {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

template <typename... A>
std::string f(fmt::format_string<A...> s, A&&... a) {
  return fmt::format(s, std::forward<A>(a)...);
}

// ---- 1: QRW site vectors at R = 1 and R = 0
Verdict criterion_1() {
  constexpr double kTol = 1e-15;
  const qrw::QrwParams qp;
  const qrw::SiteVector want_quantum{1.0 / 16, 5.0 / 8, 1.0 / 8, 1.0 / 8, 1.0 / 16};
  const qrw::SiteVector want_classical{1.0 / 16, 1.0 / 4, 3.0 / 8, 1.0 / 4, 1.0 / 16};
  const auto sigma = hbar / qp.site_spacing;
  const auto quantum = qrw::site_probabilities(Protocol::full, qp,
                                               make_modification(std::numeric_limits<double>::infinity(), sigma));
  const auto classical = qrw::site_probabilities(Protocol::full, qp, make_modification(1e-30, sigma));
  double worst = 0.0;
  Verdict o;
  for (int k = 0; k < 5; ++k) {
    worst = std::max({worst, std::abs(quantum[k] - want_quantum[k]), std::abs(classical[k] - want_classical[k])});
    o.details.push_back(f("site {:+d}: R=1 {:.17g}  R=0 {:.17g}", k - 2, quantum[k], classical[k]));
  }
  o.pass = worst <= kTol;
  o.summary = f("QRW limits max_abs_error={:.3e} tol={:.0e}", worst, kTol);
  return o;
}

// ---- 2: QRW analytic vs density-matrix walk
Verdict criterion_2() {
  constexpr double kTol = 1e-10;
  const double d = validation::qrw_oracle_max_difference(qrw::QrwParams{}, 20, 3);
  return {d < kTol, f("QRW oracle max_abs_difference={:.3e} tol={:.0e} draws=20", d, kTol), {}};
}

// ---- 3: Jeffreys-prior 5% quantile at hbar/sigma_q = d/10
Verdict criterion_3() {
  constexpr double kTarget = 16.75e-6;
  constexpr double kRelTol = 0.10;
  const auto grid = bayes::LogTauGrid::uniform();
  const std::array<std::pair<const char*, double>, 2> conventions{
      {{"A=(m_Cs/m_e)^2", constants::cesium133_mass}, {"A=1", constants::electron_mass}}};
  const std::array<Protocol, 3> protocols{Protocol::full, Protocol::postselect_left,
                                          Protocol::postselect_right};
  Verdict o;
  double best = std::numeric_limits<double>::infinity();
  std::string best_label;
  for (const auto& [label, mass] : conventions) {
    qrw::QrwParams qp;
    qp.atom_mass = mass;
    const qrw::QrwModel model(qp);
    const double sigma = hbar / (qp.site_spacing / 10.0);
    double least = std::numeric_limits<double>::infinity();
    for (Protocol p : protocols) {
      const auto prior = bayes::jeffreys_prior(model, Context{0.0, 0.0, p}, sigma, grid);
      const double q = bayes::quantile(prior, 0.05);
      least = std::min(least, q);
      const double dev = std::abs(q / kTarget - 1.0);
      o.details.push_back(f("{} {}: tau_0.05={:.4e} s rel_dev={:.3f}", label, to_string(p), q, dev));
      if (dev < best) {
        best = dev;
        best_label = f("{} {}", label, to_string(p));
      }
    }
    o.details.push_back(f("{} least favorable: tau_0.05={:.4e} s", label, least));
  }
  o.pass = best <= kRelTol;
  o.summary = f("QRW prior quantile closest=({}) rel_dev={:.3f} target={:.2e} s tol={:.2f}", best_label,
                best, kTarget, kRelTol);
  return o;
}

// ---- 4: prior tail exponents
Verdict criterion_4() {
  constexpr double kTol = 0.05;
  const auto grid = bayes::LogTauGrid::uniform();
  const qrw::QrwModel qrw_model;
  const double qrw_sigma = hbar / (qrw_model.params().site_spacing / 10.0);
  const auto q = bayes::tail_exponents(
      bayes::jeffreys_prior(qrw_model, Context{0.0, 0.0, Protocol::full}, qrw_sigma, grid));

  const nanobeam::NanobeamModel nb_model;
  const auto& np = nb_model.params();
  const double t = 123e-9;
  const double theta = pi + np.delta_omega * t + np.phi0;
  const auto n = bayes::tail_exponents(bayes::jeffreys_prior(
      nb_model, Context{t, theta, Protocol::phase_sweep}, hbar / 1e-7, grid));

  const double dq = std::abs(q.high + 2.0), dn = std::abs(n.high + 1.5);
  Verdict o;
  o.pass = dq <= kTol && dn <= kTol;
  o.summary = f("tail slopes qrw={:.4f} (target -2) nanobeam={:.4f} (target -1.5) tol={:.2f}", q.high,
                n.high, kTol);
  o.details.push_back(f("qrw full, hbar/sigma_q = d/10: low={:.4f} high={:.4f}", q.low, q.high));
  o.details.push_back(f("nanobeam theta-dOmega t-phi0 = pi, t = 123 ns: low={:.4f} high={:.4f}", n.low, n.high));
  return o;
}

// ---- 5: theta-function p_J vs exact Dicke evolution
Verdict criterion_5() {
  constexpr double kTol = 0.05;
  const std::array<double, 3> times{0.0, 5.25 * pi, 400.0 * pi};
  const auto r = validation::dicke_histogram_comparison(100, 20.0, 0.002, 0.002, times);
  Verdict o;
  double worst = 0.0;
  for (const auto& c : r) {
    worst = std::max(worst, c.total_variation);
    o.details.push_back(f("t={:.4g} hbar/eps: TV={:.4f} oracle_sum={:.12f}", c.t, c.total_variation, c.oracle_sum));
  }
  o.pass = worst < kTol;
  o.summary = f("BEC p_J vs Dicke max_total_variation={:.4f} tol={:.2f}", worst, kTol);
  return o;
}

std::function<void(std::size_t, std::size_t, double, double)> progress_printer() {
  const auto t0 = std::chrono::steady_clock::now();
  return [t0](std::size_t i, std::size_t n, double len, double tau_m) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fmt::print(stderr, "  scan {}/{} length_scale_m={:.3e} log10_tau_m={:.3f} elapsed_s={:.0f}\n", i + 1, n, len,
               std::log10(tau_m), s);
  };
}

// ---- 6: BEC rate ratio at the maximizing sigma_q
Verdict criterion_6() {
  constexpr double kTarget = 15.5;
  constexpr double kRelTol = 0.25;
  // Coarser scan than the shipped default to stay inside the runtime budget.
  auto cfg = cli::default_config(cli::Experiment::bec_double_well);
  cfg.sigma_scan.points = 8;
  cfg.inference.fisher_grid_stride = 32;
  const auto data = cli::simulate_dataset(cfg);
  const auto r = cli::run_pipeline(cfg, data, progress_printer());
  const auto rates = bec::rates_double_well(cfg.bec, make_modification(1.0, r.report.sigma_q_star));
  const double ratio = rates.gamma_p / rates.gamma_l;
  const double a = bec::mass_amplification(cfg.bec);
  Verdict o;
  o.pass = std::abs(ratio / kTarget - 1.0) <= kRelTol;
  o.summary = f("BEC Gamma_P/Gamma_L={:.3f} at hbar/sigma_q*={:.3e} m target={} tol={:.0f}%", ratio,
                hbar / r.report.sigma_q_star, kTarget, 100 * kRelTol);
  o.details.push_back(f("mu_m={:.3f} boundary_maximum={} scan_points={} fisher_grid_stride={}", r.report.mu_m,
                        r.report.boundary_maximum, cfg.sigma_scan.points, cfg.inference.fisher_grid_stride));
  o.details.push_back(f("Gamma_P tau/A={:.4f} Gamma_L tau/A={:.4f}", rates.gamma_p / a, rates.gamma_l / a));
  for (double len : {0.3e-6, 0.77e-6, 2e-6}) {
    const auto x = bec::rates_double_well(cfg.bec, make_modification(1.0, hbar / len));
    o.details.push_back(f("reference hbar/sigma_q={:.2e} m: Gamma_P/Gamma_L={:.3f}", len, x.gamma_p / x.gamma_l));
  }
  return o;
}

// ---- 7: nanobeam geometric factor
Verdict criterion_7() {
  constexpr double kQuadTol = 1e-4;
  constexpr double kAtomicTol = 0.01;
  const nanobeam::NanobeamParams np;
  const std::array<double, 3> lengths{1e-8, 1e-7, 1e-6};
  const auto g = validation::geometric_factor_comparison(np, lengths);
  Verdict o;
  double worst = 0.0;
  for (const auto& c : g) {
    worst = std::max(worst, c.rel_difference);
    o.details.push_back(f("hbar/sigma_q={:.0e} m: closed={:.10e} quadrature={:.10e} rel={:.2e}", c.length_scale,
                          c.closed_form, c.quadrature, c.rel_difference));
  }
  const double atomic = validation::atomic_small_momentum_deviation(np, 1e-3);
  o.details.push_back(f("atomic U at sigma_q = 1e-3 q_c vs N (m_Si/m_e)^2 sigma^2/(4 hbar^2): rel={:.2e}", atomic));
  o.pass = worst < kQuadTol && atomic < kAtomicTol;
  o.summary = f("nanobeam U max_rel_error={:.2e} tol={:.0e} atomic_limit_rel={:.2e} tol={:.2f}", worst,
                kQuadTol, atomic, kAtomicTol);
  return o;
}

// ---- 8: nanobeam likelihood vs characteristic-function quadrature
Verdict criterion_8() {
  constexpr double kRelTol = 0.05;
  constexpr double kSumTol = 4.0 * std::numeric_limits<double>::epsilon();
  const nanobeam::NanobeamParams np;
  const std::array<double, 2> xs{0.1, 1.0};
  const std::array<double, 5> thetas{0.0, 1.0, 2.5, pi, 4.5};
  const auto r = validation::nanobeam_oracle_comparison(np, xs, thetas, 123e-9);
  Verdict o;
  double worst = 0.0, worst_sum = 0.0;
  for (const auto& c : r) {
    worst = std::max(worst, c.max_rel_difference);
    worst_sum = std::max(worst_sum, std::abs(c.analytic_sum - 1.0));
    o.details.push_back(f("x={} theta={:.3f}: max_rel={:.2e} sum-1={:.1e}", c.x, c.theta, c.max_rel_difference,
                          c.analytic_sum - 1.0));
  }
  o.pass = worst < kRelTol && worst_sum <= kSumTol;
  o.summary = f("nanobeam likelihood vs oracle max_rel={:.2e} tol={:.2f} max|sum-1|={:.1e} tol={:.1e}", worst,
                kRelTol, worst_sum, kSumTol);
  return o;
}

// ---- 9: shear-diffusion variance by Monte Carlo
Verdict criterion_9() {
  constexpr double kMaxZ = 3.0;
  const auto c = validation::shear_diffusion_comparison(4.0, 50.0, 540.0, 30.0, 8.0, 0.02, 100000);
  return {std::abs(c.z) < kMaxZ,
          f("shear variance mc={:.4f} se={:.4f} formula={:.4f} z={:.2f} tol=|z|<{}", c.variance,
            c.standard_error, c.expected, c.z, kMaxZ),
          {}};
}

// ---- 10: end-to-end synthetic macroscopicities
struct Surrogate {
  cli::Experiment experiment;
  double target;
};

bool two_peak_structure(const bayes::MacroscopicityReport& rep, const nanobeam::NanobeamParams& np,
                        std::vector<std::string>& details) {
  constexpr double kFactor = 10.0;
  // scan order is increasing sigma_q, i.e. decreasing length scale
  std::vector<std::pair<double, double>> peaks;  // (length, log10 tau_m)
  const auto& s = rep.sigma_q_samples;
  const auto& t = rep.tau_m_values;
  for (std::size_t i = 1; i + 1 < s.size(); ++i)
    if (t[i] > t[i - 1] && t[i] >= t[i + 1]) peaks.emplace_back(hbar / s[i], std::log10(t[i]));
  for (const auto& [len, lt] : peaks) details.push_back(f("nanobeam local maximum at {:.3e} m, log10 tau_m={:.3f}", len, lt));
  if (peaks.size() != 2) return false;
  const auto global = peaks[0].second > peaks[1].second ? peaks[0] : peaks[1];
  const auto local = peaks[0].second > peaks[1].second ? peaks[1] : peaks[0];
  const double lz = np.length_z();
  const double lc = hbar / np.critical_momentum();
  details.push_back(f("L_z={:.3e} m, hbar/q_c={:.3e} m, window factor {}", lz, lc, kFactor));
  const auto near = [&](double a, double b) { return std::abs(std::log10(a / b)) <= std::log10(kFactor); };
  return near(local.first, lz) && near(global.first, lc);
}

Verdict criterion_10() {
  constexpr double kTol = 0.5;
  const std::array<Surrogate, 3> runs{{{cli::Experiment::qrw, 7.1},
                                       {cli::Experiment::bec_double_well, 8.5},
                                       {cli::Experiment::nanobeam, 7.8}}};
  Verdict o;
  bool all = true;
  std::string values;
  for (const auto& s : runs) {
    const auto cfg = cli::default_config(s.experiment);
    const auto data = cli::simulate_dataset(cfg);
    fmt::print(stderr, "{}: {} runs, weight {}\n", to_string(s.experiment), data.runs.size(), data.total_weight());
    const auto r = cli::run_pipeline(cfg, data, progress_printer());
    const bool ok = std::abs(r.report.mu_m - s.target) <= kTol;
    all = all && ok;
    values += f(" {}={:.3f}", to_string(s.experiment), r.report.mu_m);
    o.details.push_back(f("{}: mu_m={:.3f} target={} {} hbar/sigma_q*={:.3e} m boundary={} prior={} weight={} seed={}",
                          to_string(s.experiment), r.report.mu_m, s.target, ok ? "ok" : "off",
                          hbar / r.report.sigma_q_star, r.report.boundary_maximum, r.report.prior_protocol,
                          data.total_weight(), cfg.seed));
    if (s.experiment == cli::Experiment::nanobeam) {
      const bool peaks = two_peak_structure(r.report, r.config.nanobeam, o.details);
      o.details.push_back(f("nanobeam two-peak structure: {}", peaks ? "reproduced" : "not reproduced"));
      all = all && peaks;
    }
  }
  o.pass = all;
  o.summary = f("synthetic mu_m{} tol=+-{}", values, kTol);
  return o;
}

// ---- 11: Leggett-Garg left-hand side
Verdict criterion_11() {
  const qrw::QrwParams qp;
  const double sigma = hbar / (qp.site_spacing / 10.0);
  const auto grid = bayes::LogTauGrid::uniform();
  bool positive = true, monotone = true;
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double l = qrw::leggett_garg_log_lhs(qp, make_modification(grid.tau(i), sigma));
    positive = positive && std::isfinite(l);
    monotone = monotone && l >= prev;
    prev = l;
  }
  const double lo = qrw::leggett_garg_log_lhs(qp, make_modification(grid.tau(0), sigma));
  const double hi = qrw::leggett_garg_log_lhs(qp, make_modification(grid.tau(grid.size() - 1), sigma));
  const bool decays = lo < hi;
  Verdict o;
  o.pass = positive && monotone && decays;
  o.summary = f("Leggett-Garg LHS positive={} nondecreasing_in_tau={} ln_lhs(tau_min)={:.4g} ln_lhs(tau_max)={:.4g}",
                positive, monotone, lo, hi);
  o.details.push_back(f("grid {} points, hbar/sigma_q = d/10", grid.size()));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int n = 0;
  app.add_option("-n,--criterion", n, "criterion number")->required()->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::function<Verdict()>> table{
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3},  {4, criterion_4},
      {5, criterion_5}, {6, criterion_6}, {7, criterion_7},  {8, criterion_8},
      {9, criterion_9}, {10, criterion_10}, {11, criterion_11}};

  const auto t0 = std::chrono::steady_clock::now();
  Verdict o;
  try {
    o = table.at(n)();
  } catch (const std::exception& e) {
    o.pass = false;
    o.summary = f("error: {}", e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  fmt::print("criterion {} {}: {} (runtime {:.1f} s)\n", n, o.pass ? "PASS" : "FAIL", o.summary, secs);
  for (const auto& d : o.details) fmt::print("  {}\n", d);
  return o.pass ? 0 : 1;
}
