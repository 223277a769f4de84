#include "mu/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <vector>

#include <fmt/format.h>

#include "mu/model_nanobeam.hpp"

namespace mu::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

class RowError {
 public:
  RowError(const std::string& source, std::size_t line) : source_(source), line_(line) {}

  [[noreturn]] void fail(std::string_view what) const {
    throw DataError(fmt::format("{}:{}: {}", source_, line_, what));
  }

  double real(const std::string& field, std::string_view name) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || p != field.data() + field.size() || !std::isfinite(v))
      fail(fmt::format("{} '{}' is not a finite number", name, field));
    return v;
  }

  std::int64_t integer(const std::string& field, std::string_view name) const {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || p != field.data() + field.size())
      fail(fmt::format("{} '{}' is not an integer", name, field));
    return v;
  }

  Protocol protocol(const std::string& field) const {
    try {
      return protocol_from_string(field);
    } catch (const DomainError&) {
      fail(fmt::format("unknown protocol '{}'", field));
    }
  }

 private:
  const std::string& source_;
  std::size_t line_;
};

std::vector<std::string> schema(Experiment e) {
  switch (e) {
    case Experiment::qrw: return {"protocol", "site", "count"};
    case Experiment::nanobeam: return {"protocol", "theta_rad", "t_seconds", "outcome", "count"};
    default: return {"t_seconds", "m"};
  }
}

}  // namespace

Dataset parse_dataset(std::istream& in, const ExperimentConfig& config, const std::string& source) {
  Dataset data;
  data.experiment_id = std::string(to_string(config.experiment));
  const auto columns = schema(config.experiment);
  std::map<std::string, std::size_t> col;

  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    const RowError err(source, lineno);
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (std::find(columns.begin(), columns.end(), fields[i]) == columns.end())
          err.fail(fmt::format("unexpected column '{}' for {}", fields[i], to_string(config.experiment)));
        if (!col.emplace(fields[i], i).second) err.fail(fmt::format("duplicate column '{}'", fields[i]));
      }
      for (const auto& c : columns)
        if (!col.count(c)) err.fail(fmt::format("missing column '{}'", c));
      have_header = true;
      continue;
    }
    if (fields.size() != col.size())
      err.fail(fmt::format("expected {} fields, found {}", col.size(), fields.size()));
    auto field = [&](const char* name) -> const std::string& { return fields[col.at(name)]; };

    Run run;
    switch (config.experiment) {
      case Experiment::qrw: {
        run.context.protocol = err.protocol(field("protocol"));
        if (run.context.protocol != Protocol::full && run.context.protocol != Protocol::postselect_left &&
            run.context.protocol != Protocol::postselect_right)
          err.fail(fmt::format("protocol '{}' is not a walk protocol", field("protocol")));
        const auto site = err.integer(field("site"), "site");
        if (site < -2 || site > 2) err.fail(fmt::format("site {} outside [-2, 2]", site));
        run.outcome = static_cast<int>(site + 2);
        run.weight = err.integer(field("count"), "count");
        break;
      }
      case Experiment::nanobeam: {
        run.context.protocol = err.protocol(field("protocol"));
        if (run.context.protocol != Protocol::phase_sweep && run.context.protocol != Protocol::time_sweep)
          err.fail(fmt::format("protocol '{}' is not phase_sweep or time_sweep", field("protocol")));
        run.context.theta = err.real(field("theta_rad"), "theta_rad");
        run.context.t = err.real(field("t_seconds"), "t_seconds");
        if (run.context.t < 0.0) err.fail("t_seconds must be >= 0");
        const auto& label = field("outcome");
        const auto it = std::find(nanobeam::kOutcomeLabels.begin(), nanobeam::kOutcomeLabels.end(), label);
        if (it == nanobeam::kOutcomeLabels.end())
          err.fail(fmt::format("outcome '{}' not one of pp, pm, mp, mm", label));
        run.outcome = static_cast<int>(it - nanobeam::kOutcomeLabels.begin());
        run.weight = err.integer(field("count"), "count");
        break;
      }
      default: {
        run.context.t = err.real(field("t_seconds"), "t_seconds");
        if (run.context.t < 0.0) err.fail("t_seconds must be >= 0");
        const double m = err.real(field("m"), "m");
        const double j0 = config.bec.j0();
        if (std::abs(m) > j0 * (1.0 + 1e-12) + 6.0 * config.bec.detector_resolution)
          err.fail(fmt::format("imbalance {} outside [-{}, {}]", m, j0, j0));
        run.outcome = m;
        break;
      }
    }
    if (run.weight < 0) err.fail("count must be >= 0");
    if (run.weight > 0) data.runs.push_back(run);
  }
  if (data.runs.empty()) throw DataError(fmt::format("{}: empty dataset", source));
  return data;
}

Dataset load_dataset(const std::filesystem::path& path, const ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("{}: cannot open dataset", path.string()));
  return parse_dataset(in, config, path.string());
}

void write_dataset(std::ostream& out, const Dataset& data, Experiment experiment) {
  const auto columns = schema(experiment);
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& r : data.runs) {
    switch (experiment) {
      case Experiment::qrw:
        out << fmt::format("{},{},{}\n", to_string(r.context.protocol), std::get<int>(r.outcome) - 2,
                           r.weight);
        break;
      case Experiment::nanobeam:
        out << fmt::format("{},{},{},{},{}\n", to_string(r.context.protocol), r.context.theta,
                           r.context.t, nanobeam::kOutcomeLabels[std::get<int>(r.outcome)], r.weight);
        break;
      default:
        for (std::int64_t k = 0; k < r.weight; ++k)
          out << fmt::format("{},{}\n", r.context.t, std::get<double>(r.outcome));
        break;
    }
  }
}

}  // namespace mu::cli
