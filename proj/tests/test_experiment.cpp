#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>

#include "fdnet/experiment.hpp"

using namespace fdnet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
ConfigMap parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config_text(is);
}
}  // namespace

TEST_CASE("config text parsing") {
  const auto map = parse(
      "# comment\n"
      "[network]\n"
      "lambda = 0.02   # inline comment\n"
      "sigma_l2_db = -30\n"
      "\n"
      "[job]\n"
      "kind = outage-sweep\n"
      "scenarios = 2D,3U\n"
      "axis = rate\n"
      "values = 0.5,1,2\n");
  const auto spec = spec_from_config(map);
  CHECK(spec.network.lambda == 0.02);
  CHECK_THAT(spec.network.sigma_l2, WithinRel(1e-3, 1e-12));
  CHECK(spec.kind == JobKind::outage_sweep);
  REQUIRE(spec.scenarios.size() == 2);
  CHECK(spec.scenarios[1] == Scenario::ThreeU);
  CHECK(spec.values == std::vector<double>{0.5, 1.0, 2.0});
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(parse("key_without_section = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[job\nkind = validate\n"), ConfigError);
  CHECK_THROWS_AS(spec_from_config(parse("[job]\nkind = sideways\n")),
                  ConfigError);
  CHECK_THROWS_AS(spec_from_config(parse("[job]\nbogus_key = 1\n")),
                  ConfigError);
  CHECK_THROWS_AS(spec_from_config(parse("[network]\nlambda = fast\n")),
                  ConfigError);
}

TEST_CASE("range values expand inclusively") {
  const auto map = parse("[job]\nvalues = 1:0.5:3\n");
  const auto spec = spec_from_config(map);
  CHECK(spec.values == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
}

TEST_CASE("environment variables override config keys") {
  ConfigMap map = parse("[job]\nseed = 1\n[network]\nlambda = 0.01\n");
  ::setenv("FDNET_JOB_SEED", "42", 1);
  ::setenv("FDNET_NETWORK_LAMBDA", "0.5", 1);
  apply_env_overrides(map);
  ::unsetenv("FDNET_JOB_SEED");
  ::unsetenv("FDNET_NETWORK_LAMBDA");
  const auto spec = spec_from_config(map);
  CHECK(spec.seed == 42);
  CHECK(spec.network.lambda == 0.5);
}

TEST_CASE("csv round-trips through the bundled reader") {
  CsvTable table;
  table.header = {"a", "b", "c"};
  table.rows = {{"1", "x", "2.5"}, {"", "y", "-3"}};
  std::ostringstream os;
  write_csv(table, os);
  std::istringstream is(os.str());
  const CsvTable back = read_csv(is);
  CHECK(back.header == table.header);
  CHECK(back.rows == table.rows);
  CHECK(back.column("b") == 1);
  CHECK(back.column("missing") == -1);
}

TEST_CASE("figure preset fig5b spans the documented grid") {
  const auto spec = figure_preset("fig5b");
  CHECK(spec.kind == JobKind::outage_sweep);
  CHECK(spec.engine == Engine::both);
  CHECK(spec.scenarios ==
        std::vector<Scenario>{Scenario::TwoD, Scenario::ThreeD});
  CHECK(spec.sector_counts == std::vector<int>{1, 4, 8});
  CHECK_THAT(spec.network.sigma_l2, WithinRel(1e-3, 1e-12));
  REQUIRE_FALSE(spec.values.empty());
  CHECK(spec.values.front() == 0.1);
  CHECK_THAT(spec.values.back(), WithinAbs(8.0, 1e-12));

  const auto points = expand_grid(spec);
  // rates x engines x scenarios x sector counts
  CHECK(points.size() == spec.values.size() * 2 * 2 * 3);
  CHECK_THROWS_AS(figure_preset("fig99"), ConfigError);
}

TEST_CASE("grid runner emits a schema-stable table") {
  ExperimentSpec spec;
  spec.kind = JobKind::outage_sweep;
  spec.scenarios = {Scenario::ThreeD};
  spec.engine = Engine::both;
  spec.network.rate = 1.0;
  spec.axis = "rate";
  spec.values = {0.5, 1.0};
  spec.realizations = 500;
  spec.seed = 5;
  spec.workers = 2;

  const CsvTable table = run_grid(spec);
  const std::vector<std::string> want_header = {
      "scenario", "engine",      "rate",
      "metric",   "value",       "std_error",
      "error_bound", "n_realizations", "seed", "wall_time_ms"};
  CHECK(table.header == want_header);
  REQUIRE(table.rows.size() == 4);
  CHECK(table.rows[0][0] == "3D");
  CHECK(table.rows[0][1] == "analytic");
  CHECK(table.rows[1][1] == "mc");
  // analytic rows carry an error bound, mc rows a standard error
  const int se = table.column("std_error");
  const int eb = table.column("error_bound");
  CHECK(table.rows[0][se].empty());
  CHECK_FALSE(table.rows[0][eb].empty());
  CHECK_FALSE(table.rows[1][se].empty());
  CHECK(table.rows[1][eb].empty());

  // identical content modulo the wall-time column on a re-run
  const CsvTable again = run_grid(spec);
  const int wall = table.column("wall_time_ms");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < table.rows[i].size(); ++j) {
      if (static_cast<int>(j) == wall) continue;
      CHECK(table.rows[i][j] == again.rows[i][j]);
    }
  }
}

TEST_CASE("throughput surface evaluates the mix grid") {
  ExperimentSpec spec;
  spec.kind = JobKind::throughput_surface;
  spec.engine = Engine::analytic;
  spec.network.alpha1 = 4.0;
  spec.network.alpha2 = 3.0;
  spec.network.sigma_l2 = 1e-3;
  spec.antennas = AntennaSystem{};
  spec.antennas.m_b = spec.antennas.m_u = 8;
  spec.axis = "p_2n";
  spec.values = {0.0, 1.0};
  spec.axis2 = "p_u";
  spec.values2 = {1.0};
  spec.workers = 1;
  const CsvTable table = run_grid(spec);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0][table.column("metric")] == "throughput");
  const double t0 = std::stod(table.rows[0][table.column("value")]);
  const double t1 = std::stod(table.rows[1][table.column("value")]);
  CHECK(t0 > 0.0);
  CHECK(t1 > 0.0);
}

TEST_CASE("optimize job reports the three optima") {
  ExperimentSpec spec;
  spec.kind = JobKind::optimize;
  spec.network.alpha1 = 4.0;
  spec.network.alpha2 = 3.0;
  spec.network.lambda = 0.1;
  spec.network.sigma_l2 = 1e-3;
  spec.antennas.m_b = spec.antennas.m_u = 8;
  spec.mix = {0.5, 1.0};
  const CsvTable table = run_optimize(spec);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[2][0] == "throughput");
  CHECK(table.rows[2][table.column("p_2n_star")] == "1");
}

TEST_CASE("reseeded monte carlo points move within their noise") {
  ExperimentSpec spec;
  spec.kind = JobKind::outage_sweep;
  spec.scenarios = {Scenario::TwoD, Scenario::ThreeD};
  spec.engine = Engine::mc;
  spec.network.sigma_l2 = 1e-3;
  spec.antennas.m_b = spec.antennas.m_u = 4;
  spec.axis = "rate";
  spec.values = {0.5, 1.0, 2.0};
  spec.realizations = 2000;
  spec.workers = 2;
  spec.seed = 100;
  const CsvTable a = run_grid(spec);
  spec.seed = 200;
  const CsvTable b = run_grid(spec);
  const int vc = a.column("value");
  const int sec = a.column("std_error");
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const double va = std::stod(a.rows[i][vc]);
    const double vb = std::stod(b.rows[i][vc]);
    const double se = std::hypot(std::stod(a.rows[i][sec]),
                                 std::stod(b.rows[i][sec]));
    // a 4-sigma bound keeps the check meaningful without chance failures
    CHECK(std::abs(va - vb) <= 4.0 * se);
  }
}

TEST_CASE("numerical failures name the grid point") {
  ExperimentSpec spec;
  spec.kind = JobKind::outage_sweep;
  spec.scenarios = {Scenario::TwoD};
  spec.engine = Engine::analytic;
  spec.analytic_path = AnalyticPath::closed_form;  // needs alpha = 4
  spec.network.alpha1 = 3.5;
  spec.network.alpha2 = 3.5;
  spec.axis = "rate";
  spec.values = {1.0};
  try {
    run_grid(spec);
    FAIL("expected PointError");
  } catch (const PointError& e) {
    CHECK(std::string(e.what()).find("2D") != std::string::npos);
  }
}
