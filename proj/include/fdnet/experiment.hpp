#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fdnet/composite.hpp"
#include "fdnet/config.hpp"
#include "fdnet/csv.hpp"
#include "fdnet/montecarlo.hpp"
#include "fdnet/outage.hpp"
#include "fdnet/threegpp.hpp"

namespace fdnet {

/// Rejected configuration input (file syntax, unknown keys, bad values).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid-point evaluation failure, named so the CLI can report it.
class PointError : public std::runtime_error {
 public:
  PointError(const std::string& point, const std::string& why)
      : std::runtime_error("grid point [" + point + "]: " + why) {}
};

// ---------------------------------------------------------------------------
// flat key-value config text with [section] headers
// ---------------------------------------------------------------------------

using ConfigMap = std::map<std::string, std::string>;  // "section.key" -> value

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline ConfigMap parse_config_text(std::istream& is) {
  ConfigMap map;
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty() || section.empty())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": key outside a [section]");
    map[section + "." + key] = trim(line.substr(eq + 1));
  }
  return map;
}

inline ConfigMap parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  return parse_config_text(is);
}

/// Environment overrides: FDNET_<SECTION>_<KEY> replaces section.key.
inline void apply_env_overrides(ConfigMap& map) {
  for (auto& [key, value] : map) {
    std::string env = "FDNET_" + key;
    for (char& c : env) {
      if (c == '.') c = '_';
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    if (const char* v = std::getenv(env.c_str())) value = v;
  }
}

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key " + key + ": not a number: '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key " + key + ": not a boolean: '" + v + "'");
}

// "a,b,c" or "start:step:stop" into a numeric list
inline std::vector<double> parse_values(const std::string& key,
                                        const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') ||
        !std::getline(ss, c))
      throw ConfigError("key " + key + ": expected start:step:stop");
    const double start = to_double(key, trim(a));
    const double step = to_double(key, trim(b));
    const double stop = to_double(key, trim(c));
    if (step <= 0.0) throw ConfigError("key " + key + ": step must be > 0");
    for (double v = start; v <= stop + 1e-12 * std::abs(step); v += step)
      out.push_back(v);
  } else {
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ','))
      out.push_back(to_double(key, trim(cell)));
  }
  if (out.empty()) throw ConfigError("key " + key + ": empty value list");
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// experiment specification
// ---------------------------------------------------------------------------

enum class JobKind {
  outage_sweep,
  li_sweep,
  density_sweep,
  composite_surface,
  throughput_surface,
  optimize,
  validate,
  figure_preset,
};

enum class Engine { analytic, mc, both };
enum class AnalyticPath { theorem, approx, asymptotic, closed_form };
enum class NetworkModel { main, threegpp };

inline Engine engine_from_name(const std::string& s) {
  if (s == "analytic") return Engine::analytic;
  if (s == "mc") return Engine::mc;
  if (s == "both") return Engine::both;
  throw ConfigError("unknown engine '" + s + "'");
}

inline const char* engine_name(Engine e) {
  switch (e) {
    case Engine::analytic: return "analytic";
    case Engine::mc: return "mc";
    case Engine::both: return "both";
  }
  return "?";
}

struct ExperimentSpec {
  JobKind kind = JobKind::outage_sweep;
  NetworkModel model = NetworkModel::main;
  std::vector<Scenario> scenarios{Scenario::TwoD};
  Engine engine = Engine::analytic;
  AnalyticPath analytic_path = AnalyticPath::theorem;
  LinkDirection direction = LinkDirection::downlink;  // composite surfaces

  NetworkConfig network{};
  AntennaSystem antennas{};
  ThreeGppParams threegpp{};
  CompositeMix mix{1.0, 1.0};

  std::string axis = "rate";
  std::vector<double> values{1.0};
  std::string axis2;
  std::vector<double> values2;
  /// extra per-scenario sweep of the common sector count
  std::vector<int> sector_counts;

  std::uint64_t seed = 1;
  std::uint64_t realizations = 10000;
  unsigned workers = 1;
  McOptions mc_options{};
  std::string out_path = "results.csv";
  std::string preset;
};

namespace detail {

inline void apply_axis(ExperimentSpec& spec, NetworkConfig& cfg,
                       AntennaSystem& ant, CompositeMix& mix,
                       const std::string& axis, double v) {
  if (axis == "rate") {
    cfg.rate = v;
    spec.threegpp.rate = v;
  } else if (axis == "lambda") {
    cfg.lambda = v;
    spec.threegpp.lambda = v;
  } else if (axis == "sigma_l2_db") {
    cfg.sigma_l2 = db_to_linear(v);
  } else if (axis == "sigma_l2") {
    cfg.sigma_l2 = v;
  } else if (axis == "sigma_n2_db") {
    cfg.sigma_n2 = db_to_linear(v);
  } else if (axis == "m") {
    ant.m_b = ant.m_u = static_cast<int>(v);
  } else if (axis == "gamma") {
    ant.gamma_b = ant.gamma_u = v;
  } else if (axis == "theta_max") {
    ant.theta_max = v;
  } else if (axis == "p_2n") {
    mix.p_2n = v;
  } else if (axis == "p_u") {
    mix.p_u = v;
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }
}

}  // namespace detail

inline ExperimentSpec spec_from_config(const ConfigMap& map);

// ---------------------------------------------------------------------------
// figure presets (grids used by the reported figures)
// ---------------------------------------------------------------------------

inline ExperimentSpec figure_preset(const std::string& name) {
  ExperimentSpec s;
  s.preset = name;
  s.engine = Engine::both;
  s.network.lambda = 1e-2;
  s.antennas.gamma_b = s.antennas.gamma_u = 0.2;
  auto rates_01_to_8 = [] {
    std::vector<double> v{0.1};
    for (double r = 0.5; r <= 8.0 + 1e-9; r += 0.5) v.push_back(r);
    return v;
  };
  const std::vector<double> unit_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                      0.6, 0.7, 0.8, 0.9, 1.0};
  if (name == "fig3a" || name == "fig3b") {
    // downlink success surface of the composite mix
    s.kind = JobKind::composite_surface;
    s.direction = LinkDirection::downlink;
    s.engine = Engine::analytic;
    s.network.alpha1 = s.network.alpha2 = 4.0;
    s.network.rate = 1.0;
    s.network.sigma_l2 = name == "fig3a" ? db_to_linear(-30.0) : 1.0;
    s.axis = "p_2n";
    s.values = unit_grid;
    s.axis2 = "p_u";
    s.values2 = unit_grid;
  } else if (name == "fig4a" || name == "fig4b") {
    s.kind = JobKind::composite_surface;
    s.direction = LinkDirection::uplink;
    s.engine = Engine::analytic;
    s.network.alpha1 = 4.0;
    s.network.alpha2 = 3.0;
    s.network.rate = 1.0;
    s.network.sigma_l2 = name == "fig4a" ? db_to_linear(-30.0) : 1.0;
    s.axis = "p_2n";
    s.values = unit_grid;
    s.axis2 = "p_u";
    s.values2 = unit_grid;
  } else if (name == "fig5a" || name == "fig5b") {
    // downlink outage vs target rate
    s.kind = JobKind::outage_sweep;
    s.scenarios = {Scenario::TwoD, Scenario::ThreeD};
    s.network.alpha1 = s.network.alpha2 = 4.0;
    s.network.sigma_l2 = name == "fig5a" ? 0.0 : db_to_linear(-30.0);
    s.axis = "rate";
    s.values = rates_01_to_8();
    s.sector_counts = {1, 4, 8};
  } else if (name == "fig6a" || name == "fig6b" || name == "fig6c") {
    // uplink outage vs target rate
    s.kind = JobKind::outage_sweep;
    s.scenarios = {Scenario::TwoU, Scenario::ThreeU};
    s.network.alpha1 = 4.0;
    s.network.alpha2 = 3.0;
    s.network.sigma_l2 = name == "fig6a"
                             ? 0.0
                             : db_to_linear(name == "fig6b" ? -10.0 : -30.0);
    s.axis = "rate";
    s.values = rates_01_to_8();
    s.sector_counts = {1, 4, 8};
  } else if (name == "fig7a" || name == "fig7b") {
    // network throughput surface; downlink alpha 4, uplink (4, 3)
    s.kind = JobKind::throughput_surface;
    s.engine = Engine::analytic;
    s.network.alpha1 = 4.0;
    s.network.alpha2 = 3.0;
    s.network.rate = 1.0;
    s.network.sigma_l2 = db_to_linear(-30.0);
    s.network.lambda = name == "fig7a" ? 1e-2 : 1e-1;
    s.axis = "p_2n";
    s.values = unit_grid;
    s.axis2 = "p_u";
    s.values2 = unit_grid;
  } else if (name == "fig8") {
    // FD-node outage vs residual loopback, with and without passive
    // suppression (large-M asymptotics)
    s.kind = JobKind::li_sweep;
    s.scenarios = {Scenario::TwoU, Scenario::ThreeU};
    s.engine = Engine::analytic;
    s.analytic_path = AnalyticPath::asymptotic;
    s.network.alpha1 = 4.0;
    s.network.alpha2 = 3.0;
    s.network.rate = 0.1;
    s.axis = "sigma_l2_db";
    s.values.clear();
    for (double db = -40.0; db <= 10.0 + 1e-9; db += 2.0)
      s.values.push_back(db);
  } else if (name == "fig9") {
    // outage vs density
    s.kind = JobKind::density_sweep;
    s.scenarios = {Scenario::TwoU, Scenario::ThreeU};
    s.engine = Engine::analytic;
    s.analytic_path = AnalyticPath::asymptotic;
    s.network.alpha1 = 4.0;
    s.network.alpha2 = 3.0;
    s.network.rate = 0.1;
    s.network.sigma_l2 = db_to_linear(-10.0);
    s.axis = "lambda";
    s.values.clear();
    for (double e = -2.0; e <= 0.31; e += 0.1)
      s.values.push_back(std::pow(10.0, e));
  } else if (name == "fig10") {
    // pico-cell model outage vs target rate
    s.kind = JobKind::outage_sweep;
    s.model = NetworkModel::threegpp;
    s.engine = Engine::mc;
    s.scenarios = {Scenario::TwoD, Scenario::ThreeD};
    s.axis = "rate";
    s.values = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
    s.sector_counts = {1, 4, 8};
  } else {
    throw ConfigError("unknown figure preset '" + name + "'");
  }
  return s;
}

// ---------------------------------------------------------------------------
// spec construction from a config map
// ---------------------------------------------------------------------------

inline ExperimentSpec spec_from_config(const ConfigMap& map) {
  ExperimentSpec spec;
  ConfigMap remaining = map;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = remaining.find(key);
    if (it == remaining.end()) return std::nullopt;
    std::string v = it->second;
    remaining.erase(it);
    return v;
  };
  auto take_double = [&](const std::string& key, double& target) {
    if (auto v = take(key)) target = detail::to_double(key, *v);
  };
  auto take_bool = [&](const std::string& key, bool& target) {
    if (auto v = take(key)) target = detail::to_bool(key, *v);
  };

  // [job] drives everything else; a preset replaces the whole grid and
  // remaining [job]/[mc] keys act as overrides on it.
  if (auto v = take("job.preset")) {
    spec = figure_preset(*v);
  }
  if (auto v = take("job.kind")) {
    const std::string k = *v;
    if (k == "outage-sweep") spec.kind = JobKind::outage_sweep;
    else if (k == "li-sweep") spec.kind = JobKind::li_sweep;
    else if (k == "density-sweep") spec.kind = JobKind::density_sweep;
    else if (k == "composite-surface") spec.kind = JobKind::composite_surface;
    else if (k == "throughput-surface") spec.kind = JobKind::throughput_surface;
    else if (k == "optimize") spec.kind = JobKind::optimize;
    else if (k == "validate") spec.kind = JobKind::validate;
    else if (k == "figure-preset") spec.kind = JobKind::figure_preset;
    else throw ConfigError("unknown job kind '" + k + "'");
  }
  if (auto v = take("job.model")) {
    if (*v == "main") spec.model = NetworkModel::main;
    else if (*v == "3gpp") spec.model = NetworkModel::threegpp;
    else throw ConfigError("unknown model '" + *v + "'");
  }
  if (auto v = take("job.scenarios")) {
    spec.scenarios.clear();
    std::stringstream ss(*v);
    std::string cell;
    while (std::getline(ss, cell, ','))
      spec.scenarios.push_back(scenario_from_name(trim(cell)));
    if (spec.scenarios.empty()) throw ConfigError("job.scenarios empty");
  }
  if (auto v = take("job.engine")) spec.engine = engine_from_name(*v);
  if (auto v = take("job.analytic_path")) {
    if (*v == "theorem") spec.analytic_path = AnalyticPath::theorem;
    else if (*v == "approx") spec.analytic_path = AnalyticPath::approx;
    else if (*v == "asymptotic") spec.analytic_path = AnalyticPath::asymptotic;
    else if (*v == "closed-form") spec.analytic_path = AnalyticPath::closed_form;
    else throw ConfigError("unknown analytic path '" + *v + "'");
  }
  if (auto v = take("job.direction")) {
    if (*v == "downlink") spec.direction = LinkDirection::downlink;
    else if (*v == "uplink") spec.direction = LinkDirection::uplink;
    else throw ConfigError("unknown direction '" + *v + "'");
  }
  if (auto v = take("job.axis")) spec.axis = *v;
  if (auto v = take("job.values"))
    spec.values = detail::parse_values("job.values", *v);
  if (auto v = take("job.axis2")) spec.axis2 = *v;
  if (auto v = take("job.values2"))
    spec.values2 = detail::parse_values("job.values2", *v);
  if (auto v = take("job.sector_counts")) {
    spec.sector_counts.clear();
    for (double d : detail::parse_values("job.sector_counts", *v))
      spec.sector_counts.push_back(static_cast<int>(d));
  }
  if (auto v = take("job.seed"))
    spec.seed = static_cast<std::uint64_t>(detail::to_double("job.seed", *v));
  if (auto v = take("job.realizations"))
    spec.realizations = static_cast<std::uint64_t>(
        detail::to_double("job.realizations", *v));
  if (auto v = take("job.workers"))
    spec.workers =
        static_cast<unsigned>(detail::to_double("job.workers", *v));
  if (auto v = take("job.out")) spec.out_path = *v;

  take_double("network.lambda", spec.network.lambda);
  take_double("network.alpha1", spec.network.alpha1);
  take_double("network.alpha2", spec.network.alpha2);
  take_double("network.p_b", spec.network.p_b);
  take_double("network.p_u_tx", spec.network.p_u_tx);
  take_double("network.sigma_n2", spec.network.sigma_n2);
  if (auto v = take("network.sigma_n2_db"))
    spec.network.sigma_n2 = db_to_linear(detail::to_double("network.sigma_n2_db", *v));
  take_double("network.sigma_l2", spec.network.sigma_l2);
  if (auto v = take("network.sigma_l2_db"))
    spec.network.sigma_l2 = db_to_linear(detail::to_double("network.sigma_l2_db", *v));
  take_double("network.rate", spec.network.rate);
  if (auto v = take("network.bs_li_power"))
    spec.network.bs_li_power = detail::to_double("network.bs_li_power", *v);

  if (auto v = take("antenna.m_b"))
    spec.antennas.m_b = static_cast<int>(detail::to_double("antenna.m_b", *v));
  if (auto v = take("antenna.m_u"))
    spec.antennas.m_u = static_cast<int>(detail::to_double("antenna.m_u", *v));
  take_double("antenna.gamma_b", spec.antennas.gamma_b);
  take_double("antenna.gamma_u", spec.antennas.gamma_u);
  take_double("antenna.theta_max", spec.antennas.theta_max);

  take_double("composite.p_2n", spec.mix.p_2n);
  take_double("composite.p_u", spec.mix.p_u);

  take_double("mc.window_radius", spec.mc_options.window_radius);
  take_bool("mc.far_field_compensation",
            spec.mc_options.far_field_compensation);
  take_bool("mc.direct_case_sampling", spec.mc_options.direct_case_sampling);
  take_bool("mc.association_mode", spec.mc_options.association_mode);
  take_double("mc.user_density_factor", spec.mc_options.user_density_factor);

  take_double("threegpp.lambda", spec.threegpp.lambda);
  take_double("threegpp.sigma_n2_db", spec.threegpp.sigma_n2_db);
  take_double("threegpp.sigma_l2_db", spec.threegpp.sigma_l2_db);
  take_double("threegpp.p_b_dbm", spec.threegpp.p_b_dbm);
  take_double("threegpp.p_u_dbm", spec.threegpp.p_u_dbm);
  if (auto v = take("threegpp.force_los"))
    spec.threegpp.force_los = detail::to_bool("threegpp.force_los", *v);
  if (auto v = take("threegpp.disable_shadowing"))
    spec.threegpp.disable_shadowing =
        detail::to_bool("threegpp.disable_shadowing", *v);

  if (!remaining.empty())
    throw ConfigError("unknown config key '" + remaining.begin()->first + "'");
  return spec;
}

// ---------------------------------------------------------------------------
// runner
// ---------------------------------------------------------------------------

struct GridPoint {
  Scenario scenario = Scenario::TwoD;
  Engine engine = Engine::analytic;
  NetworkConfig network;
  AntennaSystem antennas;
  ThreeGppParams threegpp;
  CompositeMix mix;
  std::vector<std::pair<std::string, double>> coordinates;
  std::uint64_t point_seed = 0;
  std::string metric = "outage";
};

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

inline std::string point_label(const GridPoint& p) {
  std::ostringstream os;
  os << scenario_name(p.scenario) << " " << engine_name(p.engine);
  for (const auto& [k, v] : p.coordinates) os << " " << k << "=" << v;
  return os.str();
}

}  // namespace detail

/// Expands an experiment spec into its grid, in output order.
inline std::vector<GridPoint> expand_grid(const ExperimentSpec& spec) {
  std::vector<GridPoint> points;
  std::vector<Engine> engines;
  if (spec.engine == Engine::both) {
    engines = {Engine::analytic, Engine::mc};
  } else {
    engines = {spec.engine};
  }
  const std::vector<int> sectors =
      spec.sector_counts.empty() ? std::vector<int>{spec.antennas.m_b}
                                 : spec.sector_counts;
  const bool surface = spec.kind == JobKind::composite_surface ||
                       spec.kind == JobKind::throughput_surface;
  const std::vector<double> values2 =
      surface ? spec.values2 : std::vector<double>{0.0};
  if (surface && spec.values2.empty())
    throw ConfigError("surface jobs need axis2/values2");

  std::uint64_t index = 0;
  for (double v : spec.values) {
    for (double v2 : values2) {
      for (int m : sectors) {
        for (Scenario scn : spec.scenarios) {
          for (Engine eng : engines) {
            GridPoint p;
            p.scenario = scn;
            p.engine = eng;
            p.network = spec.network;
            p.antennas = spec.antennas;
            p.threegpp = spec.threegpp;
            p.mix = spec.mix;
            ExperimentSpec tmp = spec;
            detail::apply_axis(tmp, p.network, p.antennas, p.mix, spec.axis,
                               v);
            p.threegpp = tmp.threegpp;
            if (surface)
              detail::apply_axis(tmp, p.network, p.antennas, p.mix,
                                 spec.axis2, v2);
            if (!spec.sector_counts.empty()) {
              p.antennas.m_b = p.antennas.m_u = m;
              p.coordinates.emplace_back("m", m);
            }
            p.coordinates.emplace_back(spec.axis, v);
            if (surface) p.coordinates.emplace_back(spec.axis2, v2);
            p.metric = spec.kind == JobKind::throughput_surface
                           ? "throughput"
                           : (spec.kind == JobKind::composite_surface
                                  ? "composite-outage"
                                  : "outage");
            p.point_seed = spec.seed ^ detail::mix64(index);
            points.push_back(std::move(p));
            ++index;
          }
        }
      }
    }
  }
  return points;
}

struct PointResult {
  OutageEstimate estimate;
  double wall_ms = 0.0;
};

/// Evaluates one grid point.
inline PointResult evaluate_point(const ExperimentSpec& spec,
                                  const GridPoint& p) {
  const auto t0 = std::chrono::steady_clock::now();
  PointResult res;
  try {
    if (spec.kind == JobKind::composite_surface) {
      const auto sp = SpecialCaseParams::from(p.network, p.antennas);
      if (p.engine == Engine::mc) {
        McOptions opts = spec.mc_options;
        res.estimate = estimate_composite_outage_mc(
            spec.direction, p.network, sp, p.mix, spec.realizations,
            SeedPolicy{p.point_seed}, opts);
      } else {
        const CompositeOutage out =
            spec.direction == LinkDirection::downlink
                ? composite_outage_downlink(p.network, sp, p.mix)
                : composite_outage_uplink(p.network, sp, p.mix);
        res.estimate = {out.mixed, Method::quadrature};
      }
    } else if (spec.kind == JobKind::throughput_surface) {
      const auto sp = SpecialCaseParams::from(p.network, p.antennas);
      const ThroughputResult t = throughput(p.network, sp, p.mix);
      res.estimate = {t.throughput, Method::quadrature};
    } else if (p.engine == Engine::mc) {
      McOptions opts = spec.mc_options;
      if (spec.model == NetworkModel::threegpp) {
        ThreeGppParams gpp = p.threegpp;
        res.estimate =
            estimate_outage_3gpp(p.scenario, gpp, p.antennas,
                                 spec.realizations, SeedPolicy{p.point_seed},
                                 opts);
      } else {
        res.estimate = estimate_outage_mc(p.scenario, p.network, p.antennas,
                                          spec.realizations,
                                          SeedPolicy{p.point_seed}, opts);
      }
    } else {
      switch (spec.analytic_path) {
        case AnalyticPath::theorem:
          res.estimate = outage(p.scenario, p.network, p.antennas);
          break;
        case AnalyticPath::approx: {
          const auto sp = SpecialCaseParams::from(p.network, p.antennas);
          res.estimate =
              p.scenario == Scenario::ThreeD
                  ? outage_3d_special(p.network, sp)
                  : outage_approx_fd(p.scenario, p.network, sp);
          break;
        }
        case AnalyticPath::asymptotic: {
          const auto sp = SpecialCaseParams::from(p.network, p.antennas);
          res.estimate = outage_asymptotic(p.scenario, p.network, sp);
          break;
        }
        case AnalyticPath::closed_form: {
          const auto sp = SpecialCaseParams::from(p.network, p.antennas);
          res.estimate =
              p.scenario == Scenario::ThreeD
                  ? outage_3d_special(p.network, sp)
                  : outage_alpha4_closed(p.scenario, p.network, sp);
          break;
        }
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw PointError(detail::point_label(p), e.what());
  }
  res.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return res;
}

/// Runs a sweep/surface job: grid points dispatched to a worker pool,
/// rows buffered and emitted in grid order.
inline CsvTable run_grid(const ExperimentSpec& spec) {
  const std::vector<GridPoint> points = expand_grid(spec);
  std::vector<PointResult> results(points.size());
  std::vector<std::string> failures;
  std::mutex failure_mutex;

  const unsigned workers = std::max(1u, spec.workers);
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        results[i] = evaluate_point(spec, points[i]);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failures.emplace_back(e.what());
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (!failures.empty()) throw PointError(failures.front(), "evaluation failed");

  CsvTable table;
  table.header = {"scenario", "engine"};
  for (const auto& [k, v] : points.empty()
                                ? std::vector<std::pair<std::string, double>>{}
                                : points.front().coordinates)
    table.header.push_back(k);
  table.header.insert(table.header.end(),
                      {"metric", "value", "std_error", "error_bound",
                       "n_realizations", "seed", "wall_time_ms"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const GridPoint& p = points[i];
    const PointResult& r = results[i];
    std::vector<std::string> row{scenario_name(p.scenario),
                                 p.engine == Engine::mc ? "mc" : "analytic"};
    for (const auto& [k, v] : p.coordinates)
      row.push_back(detail::format_double(v));
    row.push_back(p.metric);
    row.push_back(detail::format_double(r.estimate.value));
    row.push_back(r.estimate.method == Method::monte_carlo
                      ? detail::format_double(r.estimate.std_error)
                      : "");
    row.push_back(r.estimate.method == Method::quadrature
                      ? detail::format_double(r.estimate.error_bound)
                      : "");
    row.push_back(r.estimate.method == Method::monte_carlo
                      ? std::to_string(r.estimate.n_realizations)
                      : "");
    row.push_back(std::to_string(spec.seed));
    row.push_back(detail::format_double(r.wall_ms));
    table.rows.push_back(std::move(row));
  }
  return table;
}

/// Optimizer job: reports the three optima for the configured network.
inline CsvTable run_optimize(const ExperimentSpec& spec) {
  const auto sp = SpecialCaseParams::from(spec.network, spec.antennas);
  CsvTable table;
  table.header = {"objective", "direction", "p_u",
                  "p_2n_star", "value", "seed"};
  const auto opt_d = optimize_p2n_success(LinkDirection::downlink,
                                          spec.network, sp, spec.mix.p_u);
  const auto opt_u = optimize_p2n_success(LinkDirection::uplink, spec.network,
                                          sp, spec.mix.p_u);
  table.rows.push_back({"success", "downlink",
                        detail::format_double(spec.mix.p_u),
                        detail::format_double(opt_d.p_2n),
                        detail::format_double(opt_d.value),
                        std::to_string(spec.seed)});
  table.rows.push_back({"success", "uplink",
                        detail::format_double(spec.mix.p_u),
                        detail::format_double(opt_u.p_2n),
                        detail::format_double(opt_u.value),
                        std::to_string(spec.seed)});
  const auto opt_t = optimize_p2n_throughput(spec.network, sp);
  table.rows.push_back({"throughput", "both", "1",
                        detail::format_double(opt_t.p_2n),
                        detail::format_double(opt_t.value),
                        std::to_string(spec.seed)});
  return table;
}

}  // namespace fdnet
