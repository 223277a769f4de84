#include "mu/bayes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "mu/constants.hpp"
#include "mu/quadrature.hpp"

namespace mu::bayes {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double fisher_discrete(const ExperimentModel& model, const Context& ctx,
                       const ModificationParams& p, double h) {
  const auto p0 = model.probabilities(ctx, p);
  const auto dp = model.probability_log_tau_derivatives(ctx, p, h);
  double f = 0.0;
  for (std::size_t d = 0; d < p0.size(); ++d) {
    if (!(p0[d] > 0.0)) continue;
    f += dp[d] * dp[d] / p0[d];
  }
  return f;
}

double fisher_continuous(const ExperimentModel& model, const Context& ctx,
                         const std::array<ModificationParams, 3>& ps, const FisherOptions& opt) {
  const auto space = model.outcome_space(ctx);
  const auto f0 = model.density_at(ctx, ps[0]);
  const auto fp = model.density_at(ctx, ps[1]);
  const auto fm = model.density_at(ctx, ps[2]);
  const double h = opt.log_step;

  std::vector<double> edges{space.lo(), space.hi()};
  for (double x : model.singular_points(ctx, ps))
    if (x > space.lo() && x < space.hi()) edges.push_back(x);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const auto peaks = model.peak_points(ctx, ps);

  // Within kCap of a panel end, m = c + r sin(psi) no longer resolves the distance to
  // the edge, so that sliver is taken as a rectangle; the integrand is flat there.
  constexpr double kCap = 1e-4;
  constexpr double kHalfPi = 0.5 * constants::pi;
  std::vector<std::function<double(double)>> integrands;
  std::vector<std::vector<double>> breaks;
  double rough = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double c = 0.5 * (edges[k] + edges[k + 1]);
    const double r = 0.5 * (edges[k + 1] - edges[k]);
    integrands.emplace_back([&, c, r](double psi) {
      const double m = c + r * std::sin(psi);
      const double p0 = f0(m);
      if (!(p0 > 0.0) || !std::isfinite(p0)) return 0.0;
      const double dp = (fp(m) - fm(m)) / (2.0 * h);
      return dp * dp / p0 * r * std::cos(psi);
    });
    std::vector<double> b;
    for (double x : peaks)
      if (x > edges[k] && x < edges[k + 1]) b.push_back(std::asin((x - c) / r));
    breaks.push_back(std::move(b));
    const auto& g = integrands.back();
    for (int i = -3; i <= 3; ++i) rough += std::abs(g(i * (kHalfPi - kCap) / 3.0)) * kHalfPi / 3.5;
  }
  const double panel_tol =
      std::max(opt.abs_tol, 1e-2 * opt.rel_tol * rough) / static_cast<double>(integrands.size());
  double total = 0.0;
  for (std::size_t k = 0; k < integrands.size(); ++k) {
    const auto& g = integrands[k];
    total += quad::integrate_split(g, -kHalfPi + kCap, kHalfPi - kCap, breaks[k], panel_tol,
                                   opt.rel_tol);
    total += kCap * (g(-kHalfPi + kCap) + g(kHalfPi - kCap));
  }
  return total;
}

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

void check_normalized_input(const DensityOnGrid& d) {
  if (d.values.size() != d.grid.size()) throw DomainError("density and grid sizes differ");
}

}  // namespace

LogTauGrid LogTauGrid::uniform(double log10_lo, double log10_hi, std::size_t points) {
  if (points < 100) throw DomainError("log-tau grid needs at least 100 points");
  if (!(log10_lo < log10_hi)) throw DomainError("log-tau grid needs lo < hi");
  LogTauGrid g;
  g.log10_tau.resize(points);
  for (std::size_t i = 0; i < points; ++i)
    g.log10_tau[i] = log10_lo + (log10_hi - log10_lo) * static_cast<double>(i) /
                                    static_cast<double>(points - 1);
  return g;
}

double LogTauGrid::tau(std::size_t i) const { return std::pow(10.0, log10_tau[i]); }

std::vector<double> LogTauGrid::taus() const {
  std::vector<double> t(size());
  for (std::size_t i = 0; i < size(); ++i) t[i] = tau(i);
  return t;
}

std::vector<double> cumulative(const DensityOnGrid& d) {
  check_normalized_input(d);
  std::vector<double> c(d.values.size(), 0.0);
  for (std::size_t i = 1; i < c.size(); ++i)
    c[i] = c[i - 1] + 0.5 * (d.values[i] + d.values[i - 1]) * (d.grid.tau(i) - d.grid.tau(i - 1));
  return c;
}

double integral(const DensityOnGrid& d) {
  const auto c = cumulative(d);
  return c.empty() ? 0.0 : c.back();
}

DensityOnGrid normalize(DensityOnGrid d) {
  const double z = integral(d);
  if (!(z > 0.0) || !std::isfinite(z))
    throw NumericalError(fmt::format("density cannot be normalized (integral {})", z));
  for (double& v : d.values) v /= z;
  d.normalized = true;
  return d;
}

double fisher_information_log_tau(const ExperimentModel& model, const Context& ctx,
                                  const ModificationParams& p, const FisherOptions& opt) {
  const double h = opt.log_step;
  if (model.outcome_space(ctx).is_discrete()) return fisher_discrete(model, ctx, p, h);
  std::array<ModificationParams, 3> ps{p, p, p};
  ps[1].tau_e = p.tau_e * std::exp(h);
  ps[2].tau_e = p.tau_e * std::exp(-h);
  return fisher_continuous(model, ctx, ps, opt);
}

double fisher_information(const ExperimentModel& model, const Context& ctx,
                          const ModificationParams& p, const FisherOptions& opt) {
  return fisher_information_log_tau(model, ctx, p, opt) / (p.tau_e * p.tau_e);
}

TailExponents tail_exponents(const DensityOnGrid& d, double decades) {
  check_normalized_input(d);
  const auto& lg = d.grid.log10_tau;
  std::vector<double> xl, yl, xh, yh;
  for (std::size_t i = 0; i < lg.size(); ++i) {
    if (!(d.values[i] > 0.0)) continue;
    if (lg[i] <= lg.front() + decades) {
      xl.push_back(lg[i]);
      yl.push_back(std::log10(d.values[i]));
    }
    if (lg[i] >= lg.back() - decades) {
      xh.push_back(lg[i]);
      yh.push_back(std::log10(d.values[i]));
    }
  }
  return {slope_fit(xl, yl), slope_fit(xh, yh)};
}

DensityOnGrid jeffreys_prior(const ExperimentModel& model, std::span<const WeightedContext> contexts,
                             double sigma_q, const LogTauGrid& grid, const FisherOptions& opt) {
  if (contexts.empty()) throw DomainError("jeffreys_prior: no contexts");
  double wsum = 0.0;
  for (const auto& c : contexts) wsum += c.weight;
  if (!(wsum > 0.0)) throw DomainError("jeffreys_prior: context weights must be positive");

  const std::size_t n = grid.size();
  const std::size_t stride = std::max<std::size_t>(opt.grid_stride, 1);
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < n; i += stride) nodes.push_back(i);
  if (nodes.back() != n - 1) nodes.push_back(n - 1);

  // sqrt of the ln-tau Fisher information at the nodes
  std::vector<double> root(n, 0.0);
  for (std::size_t i : nodes) {
    const double tau = grid.tau(i);
    const ModificationParams p{tau, sigma_q, 0.0};
    double f = 0.0;
    for (const auto& c : contexts) f += c.weight * fisher_information_log_tau(model, c.context, p, opt);
    f /= wsum;
    if (!(f >= 0.0)) throw NumericalError(fmt::format("Fisher information {} at tau_e={:g}", f, tau));
    root[i] = std::sqrt(f);
  }
  // between nodes: linear in log-log where both ends are positive, linear otherwise
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const std::size_t a = nodes[k], b = nodes[k + 1];
    const double xa = grid.log10_tau[a], xb = grid.log10_tau[b];
    for (std::size_t i = a + 1; i < b; ++i) {
      const double w = (grid.log10_tau[i] - xa) / (xb - xa);
      if (root[a] > 0.0 && root[b] > 0.0)
        root[i] = std::exp((1.0 - w) * std::log(root[a]) + w * std::log(root[b]));
      else
        root[i] = (1.0 - w) * root[a] + w * root[b];
    }
  }
  DensityOnGrid d{grid, std::vector<double>(n, 0.0), false};
  for (std::size_t i = 0; i < n; ++i) d.values[i] = root[i] / grid.tau(i);
  const auto tails = tail_exponents(d);
  if (tails.high >= -1.0 || tails.low <= -1.0)
    throw NumericalError(fmt::format(
        "Jeffreys prior not normalizable on the grid: tail exponents {:.3f} (small tau), {:.3f} (large tau)",
        tails.low, tails.high));
  return normalize(std::move(d));
}

DensityOnGrid jeffreys_prior(const ExperimentModel& model, const Context& ctx, double sigma_q,
                             const LogTauGrid& grid, const FisherOptions& opt) {
  const WeightedContext wc{ctx, 1.0};
  return jeffreys_prior(model, std::span<const WeightedContext>(&wc, 1), sigma_q, grid, opt);
}

DensityOnGrid posterior_update(const DensityOnGrid& prior, const ExperimentModel& model,
                               std::span<const ContextGroup> groups, double sigma_q) {
  check_normalized_input(prior);
  if (groups.empty()) return prior;
  const auto& grid = prior.grid;
  std::vector<double> ll(grid.size());
  double mx = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(prior.values[i] > 0.0)) {
      ll[i] = -kInf;
      continue;
    }
    ll[i] = dataset_log_likelihood(model, groups, {grid.tau(i), sigma_q, 0.0});
    mx = std::max(mx, ll[i]);
  }
  if (mx == -kInf) throw DataError("data have zero likelihood at every grid point");
  DensityOnGrid post{grid, std::vector<double>(grid.size()), false};
  for (std::size_t i = 0; i < grid.size(); ++i)
    post.values[i] = ll[i] == -kInf ? 0.0 : prior.values[i] * std::exp(ll[i] - mx);
  post = normalize(std::move(post));
  const auto c = cumulative(post);
  const std::size_t n = c.size();
  if (c[2] > 0.2 || c[n - 1] - c[n - 3] > 0.2)
    throw NumericalError("posterior mass piles up at the grid boundary; extend the log-tau grid");
  return post;
}

DensityOnGrid posterior_update(const DensityOnGrid& prior, const ExperimentModel& model,
                               const Dataset& data, double sigma_q) {
  const auto groups = group_runs(model, data);
  return posterior_update(prior, model, groups, sigma_q);
}

double quantile(const DensityOnGrid& d, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0, 1)");
  const auto c = cumulative(d);
  const double target = p * c.back();
  const auto it = std::lower_bound(c.begin(), c.end(), target);
  const auto i = static_cast<std::size_t>(it - c.begin());
  if (i == 0) return d.grid.tau(0);
  if (i >= c.size()) return d.grid.tau(c.size() - 1);
  const double t0 = d.grid.tau(i - 1), t1 = d.grid.tau(i);
  const double frac = (target - c[i - 1]) / (c[i] - c[i - 1]);
  return t0 + frac * (t1 - t0);
}

double odds_ratio(const DensityOnGrid& d, double tau_star) {
  const auto c = cumulative(d);
  const double z = c.back();
  double F;
  if (tau_star <= d.grid.tau(0)) {
    F = 0.0;
  } else if (tau_star >= d.grid.tau(c.size() - 1)) {
    F = 1.0;
  } else {
    const double lt = std::log10(tau_star);
    const auto& lg = d.grid.log10_tau;
    const auto i = static_cast<std::size_t>(std::upper_bound(lg.begin(), lg.end(), lt) - lg.begin());
    const double t0 = d.grid.tau(i - 1), t1 = d.grid.tau(i);
    F = (c[i - 1] + (tau_star - t0) / (t1 - t0) * (c[i] - c[i - 1])) / z;
  }
  if (F >= 1.0 - 1e-15) return kInf;
  return F / (1.0 - F);
}

double condition_on_heating(double log_joint, double log_marginal) {
  if (std::isnan(log_joint) || std::isnan(log_marginal) || log_marginal == -kInf)
    throw NumericalError("heating conditioning: survival probability underflows");
  if (log_joint == -kInf) return -kInf;
  return log_joint - log_marginal;
}

ProtocolChoice select_prior_protocol(const ExperimentModel& model,
                                     std::span<const ProtocolCandidate> candidates, double sigma_q,
                                     const LogTauGrid& grid, double p, const FisherOptions& opt) {
  if (candidates.empty()) throw DomainError("no prior protocol candidates");
  ProtocolChoice best;
  best.prior_tau_m.resize(candidates.size());
  double best_q = kInf;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    auto prior = jeffreys_prior(model, candidates[k].contexts, sigma_q, grid, opt);
    const double q = quantile(prior, p);
    best.prior_tau_m[k] = q;
    if (q < best_q) {
      best_q = q;
      best.index = k;
      best.name = candidates[k].name;
      best.prior = std::move(prior);
    }
  }
  return best;
}

MacroscopicityReport maximize_macroscopicity(
    const std::function<TauMEvaluation(double sigma_q)>& tau_m_of_sigma, double sigma_lo,
    double sigma_hi, const ScanOptions& opt) {
  if (!(sigma_lo > 0.0 && sigma_lo < sigma_hi)) throw DomainError("sigma_q range must be 0 < lo < hi");
  if (opt.points < 2) throw DomainError("sigma_q scan needs at least two points");
  MacroscopicityReport rep;
  const double a = std::log(sigma_lo), b = std::log(sigma_hi);
  const std::size_t n = opt.points;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    const auto ev = tau_m_of_sigma(s);
    rep.sigma_q_samples.push_back(s);
    rep.tau_m_values.push_back(ev.tau_m);
    rep.prior_protocols.push_back(ev.prior_protocol);
    if (opt.progress) opt.progress(i, n, s, ev.tau_m);
  }
  const auto best = static_cast<std::size_t>(
      std::max_element(rep.tau_m_values.begin(), rep.tau_m_values.end()) - rep.tau_m_values.begin());
  rep.sigma_q_star = rep.sigma_q_samples[best];
  rep.tau_m_star = rep.tau_m_values[best];
  rep.prior_protocol = rep.prior_protocols[best];

  const double xa = std::log(rep.sigma_q_samples[best == 0 ? 0 : best - 1]);
  const double xb = std::log(rep.sigma_q_samples[std::min(best + 1, n - 1)]);
  auto objective = [&](double x) {
    const double s = std::exp(xa + x);
    const auto ev = tau_m_of_sigma(s);
    if (ev.tau_m > rep.tau_m_star) {
      rep.tau_m_star = ev.tau_m;
      rep.sigma_q_star = s;
      rep.prior_protocol = ev.prior_protocol;
    }
    return -std::log(ev.tau_m);
  };
  // tolerance in ln sigma_q, i.e. relative in sigma_q
  const int bits = std::max(4, static_cast<int>(std::ceil(-std::log2(opt.sigma_rel_tol))) + 1);
  std::uintmax_t iters = 40;
  if (xb > xa) boost::math::tools::brent_find_minima(objective, 0.0, xb - xa, bits, iters);
  rep.mu_m = std::log10(rep.tau_m_star);
  const double edge_tol = 2.0 * opt.sigma_rel_tol;
  rep.boundary_maximum = std::abs(std::log(rep.sigma_q_star / sigma_lo)) < edge_tol ||
                         std::abs(std::log(rep.sigma_q_star / sigma_hi)) < edge_tol;
  return rep;
}

MacroscopicityReport maximize_macroscopicity(const ExperimentModel& model, const Dataset& data,
                                             std::span<const ProtocolCandidate> candidates,
                                             const LogTauGrid& grid, double sigma_lo,
                                             double sigma_hi, const ScanOptions& opt) {
  const auto groups = group_runs(model, data);
  auto f = [&](double sigma_q) {
    const auto choice = select_prior_protocol(model, candidates, sigma_q, grid, opt.quantile_p, opt.fisher);
    const auto post = posterior_update(choice.prior, model, groups, sigma_q);
    return TauMEvaluation{quantile(post, opt.quantile_p), choice.name};
  };
  return maximize_macroscopicity(f, sigma_lo, sigma_hi, opt);
}

}  // namespace mu::bayes
