#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mu/config.hpp"
#include "mu/dataset_io.hpp"
#include "mu/model_qrw.hpp"
#include "mu/simulate.hpp"

using namespace mu;
using namespace mu::cli;

namespace {

Dataset parse(const std::string& text, const ExperimentConfig& c) {
  std::istringstream in(text);
  return parse_dataset(in, c, "test.csv");
}

std::string dump(const Dataset& d, Experiment e) {
  std::ostringstream out;
  write_dataset(out, d, e);
  return out.str();
}

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("minimal config gives the defaults") {
  const auto c = parse_config(R"({"experiment": "qrw"})");
  CHECK(serialize_config(c) == serialize_config(default_config(Experiment::qrw)));
  CHECK(c.synthetic.runs == 627);
  CHECK(c.grid.points == 2400);
}

TEST_CASE("config round trip") {
  for (auto e : {Experiment::qrw, Experiment::bec_double_well, Experiment::bec_single_well, Experiment::nanobeam}) {
    const auto text = serialize_config(default_config(e));
    CHECK(serialize_config(parse_config(text)) == text);
  }
  auto c = parse_config(R"({"experiment": "nanobeam", "seed": 9, "grid": {"points": 500},
                            "synthetic": {"tau_true_seconds": 1e6, "length_scale_m": 2e-7}})");
  const auto again = parse_config(serialize_config(c));
  CHECK(again.seed == 9);
  CHECK(again.grid.points == 500);
  CHECK(again.synthetic.tau_true == 1e6);
  CHECK(again.synthetic.contexts.size() == c.synthetic.contexts.size());
}

TEST_CASE("config errors name the key") {
  const auto message = [](const char* text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({})").rfind("experiment", 0) == 0);
  CHECK(message(R"({"experiment": "laser"})").rfind("experiment", 0) == 0);
  CHECK(message(R"({"experiment": "qrw", "sigma_scan": {"length_min_m": 1e-15}})").rfind("sigma_scan.length_min_m", 0) == 0);
  CHECK(message(R"({"experiment": "qrw", "grid": {"pointz": 100}})").find("pointz") != std::string::npos);
  CHECK(message(R"({"experiment": "qrw", "inference": {"quantile": 1.5}})").rfind("inference.quantile", 0) == 0);
  CHECK(message(R"({"experiment": "qrw", "inference": {"prior_protocol": "sideways"}})")
            .rfind("inference.prior_protocol", 0) == 0);
  CHECK(message("not json").rfind("<root>", 0) == 0);
}

TEST_CASE("QRW dataset parsing") {
  const auto c = default_config(Experiment::qrw);
  const auto d = parse("protocol,site,count\nfull,-2,40\nfull,-1,390\nfull,0,80\nfull,1,78\nfull,2,39\n", c);
  CHECK(d.runs.size() == 5);
  CHECK(d.total_weight() == 627);
  CHECK(std::get<int>(d.runs[0].outcome) == 0);
  CHECK(d.runs[1].context.protocol == Protocol::full);
  CHECK(dump(d, Experiment::qrw) == dump(parse(dump(d, Experiment::qrw), c), Experiment::qrw));

  CHECK_THROWS_WITH_AS(parse("protocol,site,count\n", c), doctest::Contains("empty dataset"), DataError);
  CHECK_THROWS_WITH_AS(parse("protocol,site,count\nfull,3,1\n", c), doctest::Contains("test.csv:2"), DataError);
  CHECK_THROWS_AS(parse("protocol,site,count\nfull,1,-4\n", c), DataError);
  CHECK_THROWS_AS(parse("protocol,site\nfull,1\n", c), DataError);
  CHECK(parse("protocol,site,count\nfull,1,0\nfull,0,2\n", c).runs.size() == 1);
}

TEST_CASE("BEC dataset parsing") {
  const auto c = default_config(Experiment::bec_double_well);
  const auto d = parse("t_seconds,m\n0.001,-600\n0.001,600\n0.002,12.5\n", c);
  CHECK(d.runs.size() == 3);
  CHECK(std::get<double>(d.runs[0].outcome) == -600.0);
  CHECK_THROWS_AS(parse("t_seconds,m\n0.001,601\n", c), DataError);
  CHECK_THROWS_AS(parse("t_seconds,m\n-0.001,1\n", c), DataError);
}

TEST_CASE("nanobeam dataset parsing") {
  const auto c = default_config(Experiment::nanobeam);
  const auto d = parse("protocol,theta_rad,t_seconds,outcome,count\nphase_sweep,0.5,1.23e-7,pm,17\n", c);
  CHECK(d.runs.size() == 1);
  CHECK(std::get<int>(d.runs[0].outcome) == 1);
  CHECK(d.runs[0].weight == 17);
  CHECK_THROWS_AS(parse("protocol,theta_rad,t_seconds,outcome,count\nphase_sweep,0.5,1.23e-7,zz,1\n", c), DataError);
}

TEST_CASE("run allocation") {
  const std::vector<WeightedContext> ctx{{Context{0, 0, Protocol::full}, 1.0},
                                         {Context{0, 0, Protocol::postselect_left}, 1.0},
                                         {Context{0, 0, Protocol::postselect_right}, 1.0}};
  const auto a = allocate_runs(627, ctx);
  CHECK(a == std::vector<std::int64_t>{209, 209, 209});
  const auto b = allocate_runs(10, ctx);
  CHECK(b == std::vector<std::int64_t>{4, 3, 3});
  const std::vector<WeightedContext> skew{{Context{0, 0, Protocol::full}, 3.0}, {Context{1, 0, Protocol::full}, 1.0}};
  CHECK(allocate_runs(8, skew) == std::vector<std::int64_t>{6, 2});
}

TEST_CASE("simulation") {
  SUBCASE("same seed, same bytes") {
    const auto c = default_config(Experiment::nanobeam);
    CHECK(dump(simulate_dataset(c), c.experiment) == dump(simulate_dataset(c), c.experiment));
    auto other = c;
    other.seed = 2;
    CHECK(dump(simulate_dataset(c), c.experiment) != dump(simulate_dataset(other), c.experiment));
  }
  SUBCASE("QRW frequencies") {
    const qrw::QrwModel model;
    const std::vector<WeightedContext> ctx{{Context{0, 0, Protocol::full}, 1.0}};
    const auto mod = make_modification(3e5, constants::hbar / 43.3e-9);
    const std::int64_t n = 1000000;
    const auto d = simulate_dataset(model, mod.tau_e, mod.sigma_q, n, ctx, 17);
    const auto p = model.probabilities(ctx[0].context, mod);
    std::vector<double> counts(5, 0.0);
    for (const auto& r : d.runs) counts[std::get<int>(r.outcome)] += r.weight;
    for (int k = 0; k < 5; ++k) CHECK(std::abs(counts[k] - n * p[k]) < 3.0 * std::sqrt(n * p[k] * (1 - p[k])));
  }
}

}
