// mu: empirical macroscopicity of superposition experiments.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mu/bayes.hpp"
#include "mu/config.hpp"
#include "mu/constants.hpp"
#include "mu/dataset_io.hpp"
#include "mu/pipeline.hpp"
#include "mu/simulate.hpp"
#include "mu/validation.hpp"

namespace {

using namespace mu;
using namespace mu::cli;
using constants::hbar;

enum Exit { kOk = 0, kConfig = 2, kData = 3, kNumerical = 4 };

struct Common {
  std::string config_path;
  std::string experiment;
  std::string data_path;
};

void add_common(CLI::App* app, Common& c, bool with_data) {
  app->add_option("-c,--config", c.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("-e,--experiment", c.experiment,
                  "experiment defaults when no config is given: bec_double_well, bec_single_well, qrw, nanobeam");
  if (with_data) app->add_option("-d,--data", c.data_path, "CSV dataset");
}

ExperimentConfig resolve_config(const Common& c) {
  if (!c.config_path.empty()) {
    auto cfg = load_config(c.config_path);
    if (!c.experiment.empty() && experiment_from_string(c.experiment) != cfg.experiment)
      throw ConfigError("--experiment disagrees with the config file");
    return cfg;
  }
  if (c.experiment.empty()) throw ConfigError("need --config or --experiment");
  try {
    return default_config(experiment_from_string(c.experiment));
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("--experiment: {}", e.what()));
  }
}

// The dataset if one was given, otherwise a synthetic one from the config.
Dataset resolve_data(const Common& c, const ExperimentConfig& cfg, bool allow_synthetic) {
  if (!c.data_path.empty()) return load_dataset(c.data_path, cfg);
  if (!allow_synthetic) throw ConfigError("--data is required");
  return simulate_dataset(cfg);
}

// Writes to `path`, or stdout for "" and "-".
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw DomainError(fmt::format("cannot write {}", path));
  write(out);
  if (!out) throw DomainError(fmt::format("write to {} failed", path));
}

double sigma_from_length(double length) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw ConfigError(fmt::format("--length-scale-m: {} is not a positive length", length));
  if (length < constants::min_length_scale * (1.0 - 1e-12))
    throw ConfigError("--length-scale-m: below 10 fm");
  return hbar / length;
}

void print_progress(std::size_t i, std::size_t n, double length, double tau_m) {
  std::fprintf(stderr, "scan point=%zu total=%zu length_scale_m=%.6e tau_m_seconds=%.6e\n", i, n, length,
               tau_m);
  std::fflush(stderr);
}

int run_prior(const Common& c, double length, const std::string& protocol, const std::string& table) {
  auto cfg = resolve_config(c);
  if (!protocol.empty()) cfg.inference.prior_protocol = protocol;
  const auto model = make_model(cfg);
  const auto grid = make_grid(cfg);
  const auto candidates = c.data_path.empty()
                              ? prior_candidates(cfg, cfg.synthetic.contexts)
                              : prior_candidates(cfg, load_dataset(c.data_path, cfg));
  const double sigma = sigma_from_length(length);
  const auto choice = bayes::select_prior_protocol(*model, candidates, sigma, grid,
                                                   cfg.inference.quantile, fisher_options(cfg));
  const auto tails = bayes::tail_exponents(choice.prior);
  std::cout << fmt::format("experiment = {}\n", to_string(cfg.experiment));
  std::cout << fmt::format("length_scale_m = {:.9e}\n", length);
  std::cout << fmt::format("prior_protocol = {}\n", choice.name);
  for (std::size_t i = 0; i < candidates.size(); ++i)
    std::cout << fmt::format("prior_quantile_seconds.{} = {:.9e}\n", candidates[i].name,
                             choice.prior_tau_m[i]);
  std::cout << fmt::format("prior_tail_exponent_low = {:.6f}\n", tails.low);
  std::cout << fmt::format("prior_tail_exponent_high = {:.6f}\n", tails.high);
  if (!table.empty())
    emit(table, [&](std::ostream& out) {
      out << "tau_seconds,prior_density_per_s\n";
      for (std::size_t i = 0; i < grid.size(); ++i)
        out << fmt::format("{:.9e},{:.9e}\n", grid.tau(i), choice.prior.values[i]);
    });
  return kOk;
}

int run_posterior(const Common& c, double length, const std::string& table) {
  const auto cfg = resolve_config(c);
  const auto data = resolve_data(c, cfg, false);
  const auto model = make_model(cfg);
  const auto grid = make_grid(cfg);
  const auto candidates = prior_candidates(cfg, data);
  const double sigma = sigma_from_length(length);
  const auto choice = bayes::select_prior_protocol(*model, candidates, sigma, grid,
                                                   cfg.inference.quantile, fisher_options(cfg));
  const auto post = bayes::posterior_update(choice.prior, *model, data, sigma);
  const double tau_m = bayes::quantile(post, cfg.inference.quantile);
  std::cout << fmt::format("experiment = {}\n", to_string(cfg.experiment));
  std::cout << fmt::format("runs = {}\n", data.runs.size());
  std::cout << fmt::format("total_weight = {}\n", data.total_weight());
  std::cout << fmt::format("length_scale_m = {:.9e}\n", length);
  std::cout << fmt::format("prior_protocol = {}\n", choice.name);
  std::cout << fmt::format("tau_m_seconds = {:.9e}\n", tau_m);
  std::cout << fmt::format("log10_tau_m = {:.6f}\n", std::log10(tau_m));
  if (!table.empty()) emit(table, [&](std::ostream& out) { write_posterior_table(out, choice.prior, post); });
  return kOk;
}

int run_macroscopicity(const Common& c, const std::string& out_dir, bool synthetic, bool quiet) {
  const auto cfg = resolve_config(c);
  if (!synthetic && c.data_path.empty()) throw ConfigError("need --data or --synthetic");
  const auto data = resolve_data(c, cfg, synthetic);
  const auto result = run_pipeline(cfg, data, quiet ? ProgressFn{} : ProgressFn{print_progress});
  write_summary(std::cout, result);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    emit((dir / "summary.txt").string(), [&](std::ostream& o) { write_summary(o, result); });
    emit((dir / "posterior.csv").string(),
         [&](std::ostream& o) { write_posterior_table(o, result.prior, result.posterior); });
    emit((dir / "scan.csv").string(), [&](std::ostream& o) { write_scan_table(o, result.report); });
    emit((dir / "config.json").string(), [&](std::ostream& o) { o << serialize_config(result.config); });
  }
  return kOk;
}

int run_simulate(const Common& c, const std::string& out, std::optional<std::int64_t> runs,
                 std::optional<std::uint64_t> seed, std::optional<std::string> tau_true,
                 std::optional<double> length) {
  auto cfg = resolve_config(c);
  if (runs) {
    if (*runs < 1) throw ConfigError("--runs: must be >= 1");
    cfg.synthetic.runs = *runs;
  }
  if (seed) cfg.seed = *seed;
  if (tau_true) {
    if (*tau_true == "inf") {
      cfg.synthetic.tau_true = std::numeric_limits<double>::infinity();
    } else {
      try {
        cfg.synthetic.tau_true = std::stod(*tau_true);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("--tau-true-seconds: '{}' is not a number", *tau_true));
      }
      if (!(cfg.synthetic.tau_true > 0.0)) throw ConfigError("--tau-true-seconds: must be > 0");
    }
  }
  if (length) {
    sigma_from_length(*length);
    cfg.synthetic.length_scale = *length;
  }
  if (cfg.synthetic.runs < 1) throw ConfigError("synthetic.runs: must be >= 1");
  const auto data = simulate_dataset(cfg);
  emit(out, [&](std::ostream& o) { write_dataset(o, data, cfg.experiment); });
  return kOk;
}

struct CheckPrinter {
  bool all_ok = true;
  void operator()(const std::string& name, double value, double tol, bool ok) {
    all_ok = all_ok && ok;
    std::cout << fmt::format("{:<44} value={:<12.4e} tol={:<10.3e} {}\n", name, value, tol,
                             ok ? "PASS" : "FAIL");
  }
};

int run_oracle_check(const Common& c, const std::string& which) {
  const bool have_cfg = !c.config_path.empty() || !c.experiment.empty();
  const auto cfg = have_cfg ? resolve_config(c) : ExperimentConfig{};
  const auto want = [&](const char* name) { return which == "all" || which == name; };
  CheckPrinter check;

  if (want("qrw")) {
    const double d = validation::qrw_oracle_max_difference(cfg.qrw);
    check("qrw density-matrix walk, max |diff|", d, 1e-10, d < 1e-10);
  }
  if (want("bec")) {
    const double e = constants::pi;
    const double times[] = {0.0, 5.25 * e, 400.0 * e};
    for (const auto& r : validation::dicke_histogram_comparison(100, 20.0, 0.002, 0.002, times))
      check(fmt::format("dicke histogram TV at t={:.4g} hbar/eps", r.t), r.total_variation, 0.05,
            r.total_variation < 0.05);
  }
  if (want("nanobeam")) {
    const double xs[] = {0.1, 1.0};
    const double thetas[] = {0.0, 1.0, 2.5};
    for (const auto& r : validation::nanobeam_oracle_comparison(cfg.nanobeam, xs, thetas, 123e-9))
      check(fmt::format("coincidence x={} theta={}, max rel diff", r.x, r.theta), r.max_rel_difference,
            0.05, r.max_rel_difference < 0.05);
    const double lengths[] = {1e-8, 1e-7, 1e-6};
    for (const auto& r : validation::geometric_factor_comparison(cfg.nanobeam, lengths))
      check(fmt::format("geometric factor hbar/sigma={:g} m", r.length_scale), r.rel_difference, 1e-4,
            r.rel_difference < 1e-4);
    const double atomic[] = {4e-12, 4e-13, 1e-13};
    for (const auto& r : validation::atomic_factor_comparison(cfg.nanobeam, atomic))
      check(fmt::format("atomic factor hbar/sigma={:g} m", r.length_scale), r.rel_difference, 1e-2,
            r.rel_difference < 1e-2);
  }
  if (want("shear")) {
    const auto r = validation::shear_diffusion_comparison(4.0, 50.0, 540.0, 30.0, 8.0, 0.02, 100000);
    check("shear diffusion variance, |z|", std::abs(r.z), 3.0, std::abs(r.z) < 3.0);
  }
  return check.all_ok ? kOk : kNumerical;
}

int run_lg_test(const Common& c, double length, const std::string& table) {
  const auto cfg = resolve_config(c);
  if (cfg.experiment != Experiment::qrw) throw ConfigError("lg-test needs the qrw experiment");
  const double sigma = sigma_from_length(length > 0.0 ? length : cfg.qrw.site_spacing / 10.0);
  const auto grid = make_grid(cfg);
  // positivity and monotonicity are judged on the log, which does not underflow
  bool positive = true, monotone = true;
  double prev = -INFINITY;
  emit(table, [&](std::ostream& out) {
    out << "tau_seconds,lhs,log10_lhs\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto mod = make_modification(grid.tau(i), sigma);
      const double log_lhs = qrw::leggett_garg_log_lhs(cfg.qrw, mod);
      out << fmt::format("{:.9e},{:.9e},{:.9e}\n", grid.tau(i), qrw::leggett_garg_lhs(cfg.qrw, mod),
                         log_lhs / std::log(10.0));
      positive = positive && std::isfinite(log_lhs);
      monotone = monotone && log_lhs >= prev;
      prev = log_lhs;
    }
  });
  std::cerr << fmt::format("positive = {}\nmonotone = {}\n", positive, monotone);
  return positive && monotone ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical macroscopicity of quantum superposition experiments"};
  app.require_subcommand(1);
  Common common;

  double length = 0.0;
  std::string protocol, table, out_dir, out, which = "all";
  bool synthetic = false, quiet = false;
  std::optional<std::int64_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> tau_true;
  std::optional<double> sim_length;

  auto* prior = app.add_subcommand("prior", "Jeffreys prior at one length scale");
  add_common(prior, common, true);
  prior->add_option("-L,--length-scale-m", length, "hbar / sigma_q")->required();
  prior->add_option("-p,--protocol", protocol, "prior protocol instead of the least favorable one");
  prior->add_option("-t,--table", table, "prior table (CSV), '-' for stdout");

  auto* posterior = app.add_subcommand("posterior", "posterior and quantile at one length scale");
  add_common(posterior, common, true);
  posterior->add_option("-L,--length-scale-m", length, "hbar / sigma_q")->required();
  posterior->add_option("-t,--table", table, "prior/posterior table (CSV), '-' for stdout");

  auto* macro = app.add_subcommand("macroscopicity", "full recipe maximized over sigma_q");
  add_common(macro, common, true);
  macro->add_flag("--synthetic", synthetic, "simulate the dataset from the synthetic block");
  macro->add_option("-o,--out-dir", out_dir, "directory for summary.txt, posterior.csv, scan.csv");
  macro->add_flag("-q,--quiet", quiet, "no progress lines on stderr");

  auto* simulate = app.add_subcommand("simulate", "draw a synthetic dataset");
  add_common(simulate, common, false);
  simulate->add_option("-o,--out", out, "CSV output, stdout by default");
  simulate->add_option("-n,--runs", runs, "number of runs");
  simulate->add_option("-s,--seed", seed, "random seed");
  simulate->add_option("--tau-true-seconds", tau_true, "classicalization time, or 'inf'");
  simulate->add_option("--length-scale-m", sim_length, "hbar / sigma_q for finite tau");

  auto* oracle = app.add_subcommand("oracle-check", "analytic likelihoods against brute-force oracles");
  add_common(oracle, common, false);
  oracle->add_option("-w,--which", which, "all, qrw, bec, nanobeam or shear")
      ->check(CLI::IsMember({"all", "qrw", "bec", "nanobeam", "shear"}));

  auto* lg = app.add_subcommand("lg-test", "Leggett-Garg left-hand side over the tau grid");
  add_common(lg, common, false);
  lg->add_option("-L,--length-scale-m", length, "hbar / sigma_q, default d/10");
  lg->add_option("-t,--table", table, "CSV output, stdout by default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*prior) return run_prior(common, length, protocol, table);
    if (*posterior) return run_posterior(common, length, table);
    if (*macro) return run_macroscopicity(common, out_dir, synthetic, quiet);
    if (*simulate) return run_simulate(common, out, runs, seed, tau_true, sim_length);
    if (*oracle) return run_oracle_check(common, which);
    if (*lg) return run_lg_test(common, length, table);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
