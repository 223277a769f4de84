#include "mu/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "mu/constants.hpp"

namespace mu::cli {
namespace {

using json = nlohmann::ordered_json;
using constants::pi;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Longest first, so "_m_per_s" wins over "_m".
constexpr std::string_view kSuffixes[] = {"_kg_per_m3", "_rad_per_s", "_m_per_s", "_seconds",
                                          "_rad", "_kg", "_ev", "_m"};

std::string_view stem(std::string_view key) {
  for (auto s : kSuffixes)
    if (key.size() > s.size() && key.substr(key.size() - s.size()) == s)
      return key.substr(0, key.size() - s.size());
  return key;
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{}: expected an object", where()));
  }

  bool has(std::string_view key) const { return j_.contains(std::string(key)); }

  const json* get(std::string_view key) {
    known_.insert(std::string(key));
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  void number(std::string_view key, double& out) {
    if (const json* v = get(key)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else if (v->is_string() && (v->get<std::string>() == "inf" || v->get<std::string>() == "infinity")) {
        out = kInf;
      } else {
        throw ConfigError(fmt::format("{}: expected a number", join(path_, key)));
      }
      if (std::isnan(out)) throw ConfigError(fmt::format("{}: NaN is not allowed", join(path_, key)));
    }
  }

  template <typename Int>
  void integer(std::string_view key, Int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer())
        throw ConfigError(fmt::format("{}: expected an integer", join(path_, key)));
      const auto x = v->get<std::int64_t>();
      if (x < 0) throw ConfigError(fmt::format("{}: must be >= 0", join(path_, key)));
      out = static_cast<Int>(x);
    }
  }

  void string(std::string_view key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw ConfigError(fmt::format("{}: expected a string", join(path_, key)));
      out = v->get<std::string>();
    }
  }

  void boolean(std::string_view key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) throw ConfigError(fmt::format("{}: expected true or false", join(path_, key)));
      out = v->get<bool>();
    }
  }

  // Rejects keys that were never asked for, naming the right unit suffix
  // when only the suffix is off.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      const std::string& key = it.key();
      if (known_.count(key)) continue;
      for (const auto& k : known_) {
        const auto s = stem(k);
        if (s != k && key.size() > s.size() && key.compare(0, s.size(), s) == 0 && key[s.size()] == '_')
          throw ConfigError(fmt::format("{}: wrong unit suffix, expected '{}'", join(path_, key), k));
      }
      throw ConfigError(fmt::format("{}: unknown key", join(path_, key)));
    }
  }

  std::string child_path(std::string_view key) const { return join(path_, key); }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

void require(bool ok, const std::string& path, std::string_view what) {
  if (!ok) throw ConfigError(fmt::format("{}: {}", path, what));
}

template <typename Params>
void validate_model(const Params& p) {
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("model: {}", e.what()));
  }
}

double default_jz(int j0) { return 0.41 * 0.41 * j0 / 2.0; }

void read_bec(Block& b, bec::BecParams& p) {
  const bool n_given = b.has("atom_number");
  b.integer("atom_number", p.n_atoms);
  b.number("well_separation_m", p.delta_x);
  b.number("trap_omega_x_rad_per_s", p.omega_x);
  b.number("trap_omega_y_rad_per_s", p.omega_y);
  b.number("trap_omega_z_rad_per_s", p.omega_z);
  b.number("epsilon_over_hbar_rad_per_s", p.epsilon_over_hbar);
  b.number("zeta_rad_per_s", p.zeta);
  const bool jz_given = b.has("jz_variance");
  const bool jy_given = b.has("jy_variance");
  b.number("jz_variance", p.jz_var0);
  b.number("jy_variance", p.jy_var0);
  b.number("atom_mass_kg", p.atom_mass);
  b.number("detector_resolution", p.detector_resolution);
  require(p.n_atoms >= 2 && p.n_atoms % 2 == 0, b.child_path("atom_number"), "must be even and >= 2");
  if (n_given && !jz_given) p.jz_var0 = default_jz(p.j0());
  if (!jy_given) p.jy_var0 = bec::minimal_uncertainty_partner(p.j0(), p.jz_var0);
}

void read_qrw(Block& b, qrw::QrwParams& p) {
  b.number("shift_time_seconds", p.t_shift);
  b.number("pulse_time_seconds", p.t_rest);
  b.number("site_spacing_m", p.site_spacing);
  b.number("atom_mass_kg", p.atom_mass);
}

void read_nanobeam(Block& b, nanobeam::NanobeamParams& p) {
  b.number("effective_mass_kg", p.eff_mass);
  b.number("omega_rad_per_s", p.omega);
  b.number("delta_omega_rad_per_s", p.delta_omega);
  b.number("phase_offset_rad", p.phi0);
  b.number("sound_speed_m_per_s", p.sound_speed);
  b.number("density_kg_per_m3", p.density);
  double eb = p.binding_energy / constants::electron_volt;
  b.number("binding_energy_ev", eb);
  p.binding_energy = eb * constants::electron_volt;
  b.number("silicon_mass_kg", p.si_mass);
  b.number("continuum_min_length_m", p.continuum_min_length);
}

WeightedContext read_context(const json& j, const std::string& path) {
  Block b(j, path);
  WeightedContext w;
  std::string protocol = "none";
  b.string("protocol", protocol);
  b.number("t_seconds", w.context.t);
  b.number("theta_rad", w.context.theta);
  b.number("weight", w.weight);
  b.finish();
  try {
    w.context.protocol = protocol_from_string(protocol);
  } catch (const DomainError&) {
    throw ConfigError(fmt::format("{}.protocol: unknown protocol '{}'", path, protocol));
  }
  require(std::isfinite(w.context.t) && w.context.t >= 0.0, path + ".t_seconds", "must be finite and >= 0");
  require(std::isfinite(w.context.theta), path + ".theta_rad", "must be finite");
  require(std::isfinite(w.weight) && w.weight > 0.0, path + ".weight", "must be positive");
  return w;
}

json context_json(const WeightedContext& w) {
  return json{{"protocol", std::string(to_string(w.context.protocol))},
              {"t_seconds", w.context.t},
              {"theta_rad", w.context.theta},
              {"weight", w.weight}};
}

json number_json(double x) { return std::isinf(x) ? json("inf") : json(x); }

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::bec_double_well: return "bec_double_well";
    case Experiment::bec_single_well: return "bec_single_well";
    case Experiment::qrw: return "qrw";
    case Experiment::nanobeam: return "nanobeam";
  }
  return "qrw";
}

Experiment experiment_from_string(std::string_view s) {
  for (auto e : {Experiment::bec_double_well, Experiment::bec_single_well, Experiment::qrw,
                 Experiment::nanobeam})
    if (to_string(e) == s) return e;
  throw ConfigError(fmt::format("experiment: unknown experiment '{}'", s));
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  auto& syn = c.synthetic;
  switch (e) {
    case Experiment::qrw:
      c.sigma_scan = {1e-10, 1e-4, 40, 1e-3};
      syn.runs = 627;
      for (auto p : {Protocol::full, Protocol::postselect_left, Protocol::postselect_right})
        syn.contexts.push_back({Context{0.0, 0.0, p}, 1.0});
      break;
    case Experiment::bec_double_well:
    case Experiment::bec_single_well:
      c.sigma_scan = {1e-8, 1e-4, 24, 1e-2};
      c.inference.fisher_grid_stride = 16;
      syn.runs = 1457;
      // delay times spread over 0..20 ms
      for (double ms : {0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0, 12.5, 15.0, 17.5, 20.0})
        syn.contexts.push_back({Context{ms * 1e-3, 0.0, Protocol::none}, 1.0});
      break;
    case Experiment::nanobeam: {
      c.sigma_scan = {1e-14, 1e-4, 60, 1e-3};
      c.inference.fit_phase_offset = true;
      syn.runs = 4600;
      const auto& p = c.nanobeam;
      for (int k = 0; k < 12; ++k)
        syn.contexts.push_back({Context{123e-9, 2.0 * pi * k / 12.0, Protocol::phase_sweep}, 1.0});
      // time sweep at the phase of maximal correlation
      for (int k = 0; k <= 10; ++k) {
        const double t = 100e-9 + 5e-9 * k;
        const double theta = std::remainder(p.phi0 + p.delta_omega * t, 2.0 * pi);
        syn.contexts.push_back({Context{t, theta, Protocol::time_sweep}, 1.0});
      }
      break;
    }
  }
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("<root>: not valid JSON: {}", e.what()));
  }
  Block top(root, "");
  std::string exp_name;
  top.string("experiment", exp_name);
  if (exp_name.empty()) throw ConfigError("experiment: missing");
  ExperimentConfig c = default_config(experiment_from_string(exp_name));

  if (const json* m = top.get("model")) {
    Block b(*m, "model");
    switch (c.experiment) {
      case Experiment::qrw: read_qrw(b, c.qrw); break;
      case Experiment::nanobeam: read_nanobeam(b, c.nanobeam); break;
      default: read_bec(b, c.bec); break;
    }
    b.finish();
  }
  if (const json* g = top.get("grid")) {
    Block b(*g, "grid");
    b.number("log10_tau_min_seconds", c.grid.log10_tau_min);
    b.number("log10_tau_max_seconds", c.grid.log10_tau_max);
    b.integer("points", c.grid.points);
    b.finish();
  }
  require(std::isfinite(c.grid.log10_tau_min) && std::isfinite(c.grid.log10_tau_max) &&
              c.grid.log10_tau_min < c.grid.log10_tau_max,
          "grid", "need finite log10_tau_min_seconds < log10_tau_max_seconds");
  require(c.grid.points >= 16, "grid.points", "must be >= 16");

  if (const json* s = top.get("sigma_scan")) {
    Block b(*s, "sigma_scan");
    b.number("length_min_m", c.sigma_scan.length_min);
    b.number("length_max_m", c.sigma_scan.length_max);
    b.integer("points", c.sigma_scan.points);
    b.number("rel_tol", c.sigma_scan.rel_tol);
    b.finish();
  }
  require(c.sigma_scan.length_min >= constants::min_length_scale * (1.0 - 1e-12),
          "sigma_scan.length_min_m", "hbar/sigma_q below 10 fm is outside the admissible range");
  require(std::isfinite(c.sigma_scan.length_max) && c.sigma_scan.length_max > c.sigma_scan.length_min,
          "sigma_scan.length_max_m", "must be finite and above length_min_m");
  require(c.sigma_scan.points >= 2, "sigma_scan.points", "must be >= 2");
  require(c.sigma_scan.rel_tol > 0.0 && c.sigma_scan.rel_tol < 1.0, "sigma_scan.rel_tol",
          "must lie in (0, 1)");

  if (const json* s = top.get("inference")) {
    Block b(*s, "inference");
    b.number("quantile", c.inference.quantile);
    b.number("heat_survival_fraction", c.inference.heat_survival_fraction);
    b.string("prior_protocol", c.inference.prior_protocol);
    b.integer("fisher_grid_stride", c.inference.fisher_grid_stride);
    b.number("fisher_rel_tol", c.inference.fisher_rel_tol);
    b.boolean("fit_phase_offset", c.inference.fit_phase_offset);
    b.finish();
  }
  require(c.inference.quantile > 0.0 && c.inference.quantile < 1.0, "inference.quantile",
          "must lie in (0, 1)");
  require(c.inference.heat_survival_fraction > 0.0 && c.inference.heat_survival_fraction <= 1.0,
          "inference.heat_survival_fraction", "must lie in (0, 1]");
  require(c.inference.fisher_grid_stride >= 1, "inference.fisher_grid_stride", "must be >= 1");
  require(c.inference.fisher_rel_tol > 0.0 && c.inference.fisher_rel_tol < 1.0,
          "inference.fisher_rel_tol", "must lie in (0, 1)");
  if (c.inference.prior_protocol != "auto") {
    try {
      protocol_from_string(c.inference.prior_protocol);
    } catch (const DomainError&) {
      throw ConfigError(fmt::format("inference.prior_protocol: unknown protocol '{}'",
                                    c.inference.prior_protocol));
    }
  }
  c.bec.heat_survival_fraction = c.inference.heat_survival_fraction;

  if (const json* s = top.get("synthetic")) {
    Block b(*s, "synthetic");
    b.number("tau_true_seconds", c.synthetic.tau_true);
    b.number("length_scale_m", c.synthetic.length_scale);
    b.integer("runs", c.synthetic.runs);
    if (const json* list = b.get("contexts")) {
      require(list->is_array() && !list->empty(), "synthetic.contexts", "expected a non-empty array");
      c.synthetic.contexts.clear();
      for (std::size_t i = 0; i < list->size(); ++i)
        c.synthetic.contexts.push_back(
            read_context((*list)[i], fmt::format("synthetic.contexts[{}]", i)));
    }
    b.finish();
  }
  require(c.synthetic.tau_true > 0.0, "synthetic.tau_true_seconds", "must be positive or \"inf\"");
  require(c.synthetic.length_scale >= constants::min_length_scale * (1.0 - 1e-12) &&
              std::isfinite(c.synthetic.length_scale),
          "synthetic.length_scale_m", "hbar/sigma_q below 10 fm is outside the admissible range");

  top.integer("seed", c.seed);
  top.finish();

  switch (c.experiment) {
    case Experiment::qrw: validate_model(c.qrw); break;
    case Experiment::nanobeam: validate_model(c.nanobeam); break;
    default: validate_model(c.bec); break;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json root;
  root["experiment"] = std::string(to_string(c.experiment));
  json model;
  switch (c.experiment) {
    case Experiment::qrw:
      model = json{{"shift_time_seconds", c.qrw.t_shift},
                   {"pulse_time_seconds", c.qrw.t_rest},
                   {"site_spacing_m", c.qrw.site_spacing},
                   {"atom_mass_kg", c.qrw.atom_mass}};
      break;
    case Experiment::nanobeam:
      model = json{{"effective_mass_kg", c.nanobeam.eff_mass},
                   {"omega_rad_per_s", c.nanobeam.omega},
                   {"delta_omega_rad_per_s", c.nanobeam.delta_omega},
                   {"phase_offset_rad", c.nanobeam.phi0},
                   {"sound_speed_m_per_s", c.nanobeam.sound_speed},
                   {"density_kg_per_m3", c.nanobeam.density},
                   {"binding_energy_ev", c.nanobeam.binding_energy / constants::electron_volt},
                   {"silicon_mass_kg", c.nanobeam.si_mass},
                   {"continuum_min_length_m", c.nanobeam.continuum_min_length}};
      break;
    default:
      model = json{{"atom_number", c.bec.n_atoms},
                   {"well_separation_m", c.bec.delta_x},
                   {"trap_omega_x_rad_per_s", c.bec.omega_x},
                   {"trap_omega_y_rad_per_s", c.bec.omega_y},
                   {"trap_omega_z_rad_per_s", c.bec.omega_z},
                   {"epsilon_over_hbar_rad_per_s", c.bec.epsilon_over_hbar},
                   {"zeta_rad_per_s", c.bec.zeta},
                   {"jz_variance", c.bec.jz_var0},
                   {"jy_variance", c.bec.jy_var0},
                   {"atom_mass_kg", c.bec.atom_mass},
                   {"detector_resolution", c.bec.detector_resolution}};
      break;
  }
  root["model"] = model;
  root["grid"] = json{{"log10_tau_min_seconds", c.grid.log10_tau_min},
                      {"log10_tau_max_seconds", c.grid.log10_tau_max},
                      {"points", c.grid.points}};
  root["sigma_scan"] = json{{"length_min_m", c.sigma_scan.length_min},
                            {"length_max_m", c.sigma_scan.length_max},
                            {"points", c.sigma_scan.points},
                            {"rel_tol", c.sigma_scan.rel_tol}};
  root["inference"] = json{{"quantile", c.inference.quantile},
                           {"heat_survival_fraction", c.inference.heat_survival_fraction},
                           {"prior_protocol", c.inference.prior_protocol},
                           {"fisher_grid_stride", c.inference.fisher_grid_stride},
                           {"fisher_rel_tol", c.inference.fisher_rel_tol},
                           {"fit_phase_offset", c.inference.fit_phase_offset}};
  json contexts = json::array();
  for (const auto& w : c.synthetic.contexts) contexts.push_back(context_json(w));
  root["synthetic"] = json{{"tau_true_seconds", number_json(c.synthetic.tau_true)},
                           {"length_scale_m", c.synthetic.length_scale},
                           {"runs", c.synthetic.runs},
                           {"contexts", contexts}};
  root["seed"] = c.seed;
  return root.dump(2) + "\n";
}

std::unique_ptr<ExperimentModel> make_model(const ExperimentConfig& c) {
  switch (c.experiment) {
    case Experiment::qrw: return std::make_unique<qrw::QrwModel>(c.qrw);
    case Experiment::nanobeam: return std::make_unique<nanobeam::NanobeamModel>(c.nanobeam);
    case Experiment::bec_double_well: return std::make_unique<bec::BecDoubleWellModel>(c.bec);
    case Experiment::bec_single_well: return std::make_unique<bec::BecSingleWellModel>(c.bec);
  }
  throw ConfigError("experiment: unsupported");
}

}  // namespace mu::cli
