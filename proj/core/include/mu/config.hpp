#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mu/core.hpp"
#include "mu/model_bec.hpp"
#include "mu/model_nanobeam.hpp"
#include "mu/model_qrw.hpp"

namespace mu::cli {

// Bad configuration file; the message starts with the offending key path.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

enum class Experiment { bec_double_well, bec_single_well, qrw, nanobeam };

std::string_view to_string(Experiment e);
Experiment experiment_from_string(std::string_view s);

struct GridConfig {
  double log10_tau_min = -12.0;  // log10 of seconds
  double log10_tau_max = 14.0;
  std::size_t points = 2400;
};

// Scan over the length scale hbar / sigma_q.
struct SigmaScanConfig {
  double length_min = 1e-10;  // m
  double length_max = 1e-4;   // m
  std::size_t points = 40;
  double rel_tol = 1e-3;
};

struct InferenceConfig {
  double quantile = 0.05;
  double heat_survival_fraction = 0.9;
  std::string prior_protocol = "auto";  // or a protocol name present in the data
  std::size_t fisher_grid_stride = 1;
  double fisher_rel_tol = 1e-4;
  bool fit_phase_offset = false;  // nanobeam only
};

struct SyntheticConfig {
  double tau_true = std::numeric_limits<double>::infinity();  // s
  double length_scale = 1e-7;  // hbar / sigma_q used when tau_true is finite (m)
  std::int64_t runs = 0;
  std::vector<WeightedContext> contexts;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::qrw;
  bec::BecParams bec;
  qrw::QrwParams qrw;
  nanobeam::NanobeamParams nanobeam;
  GridConfig grid;
  SigmaScanConfig sigma_scan;
  InferenceConfig inference;
  SyntheticConfig synthetic;
  std::uint64_t seed = 1;
};

// Defaults for one experiment: model parameters, scan range and a synthetic
// context list shaped like the published runs.
ExperimentConfig default_config(Experiment e);

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
// Every field, so that parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& c);

std::unique_ptr<ExperimentModel> make_model(const ExperimentConfig& c);

}  // namespace mu::cli
