#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "mu/config.hpp"
#include "mu/core.hpp"

namespace mu::cli {

// Comma-separated, header row first. Columns by experiment:
//   bec_*     t_seconds,m
//   qrw       protocol,site,count
//   nanobeam  protocol,theta_rad,t_seconds,outcome,count   (outcome in pp,pm,mp,mm)
// Counts become run weights; rows with a zero count are dropped. Errors are
// DataError with "<source>:<line>:" in front.
Dataset parse_dataset(std::istream& in, const ExperimentConfig& config,
                      const std::string& source = "<input>");
Dataset load_dataset(const std::filesystem::path& path, const ExperimentConfig& config);

// Writes the same schema; identical datasets give identical bytes.
void write_dataset(std::ostream& out, const Dataset& data, Experiment experiment);

}  // namespace mu::cli
