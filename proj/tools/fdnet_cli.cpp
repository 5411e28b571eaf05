// Experiment runner: loads a key-value config (or a figure preset), runs
// analytic/Monte Carlo jobs to CSV, and drives the validation suite.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "fdnet/fdnet.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitNumericalError = 2;

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string engine;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> realizations;
  std::optional<unsigned> workers;
  std::string out_path;
};

fdnet::ExperimentSpec build_spec(const CommonFlags& flags) {
  fdnet::ExperimentSpec spec;
  if (!flags.config_path.empty()) {
    fdnet::ConfigMap map = fdnet::parse_config_file(flags.config_path);
    fdnet::apply_env_overrides(map);
    spec = fdnet::spec_from_config(map);
  } else if (!flags.preset.empty()) {
    spec = fdnet::figure_preset(flags.preset);
  } else {
    throw fdnet::ConfigError("need --config or --preset");
  }
  if (!flags.preset.empty() && !flags.config_path.empty())
    spec = fdnet::figure_preset(flags.preset);  // preset wins the grid
  if (!flags.engine.empty())
    spec.engine = fdnet::engine_from_name(flags.engine);
  if (flags.seed) spec.seed = *flags.seed;
  if (flags.realizations) spec.realizations = *flags.realizations;
  if (flags.workers) spec.workers = *flags.workers;
  if (!flags.out_path.empty()) spec.out_path = flags.out_path;
  return spec;
}

int run_job(const CommonFlags& flags) {
  fdnet::ExperimentSpec spec = build_spec(flags);
  if (spec.kind == fdnet::JobKind::validate) {
    fdnet::AcceptanceOptions opts;
    if (flags.seed) opts.seed = *flags.seed;
    if (flags.workers) opts.workers = *flags.workers;
    if (flags.realizations) {
      opts.n_anchor = opts.n_grid = *flags.realizations;
    }
    const auto results = fdnet::run_acceptance(opts);
    const std::string report = fdnet::render_report(results);
    if (!spec.out_path.empty() && spec.out_path != "results.csv") {
      std::ofstream os(spec.out_path);
      os << report;
    }
    std::cout << report;
    for (const auto& r : results)
      if (!r.pass) return kExitNumericalError;
    return kExitOk;
  }
  fdnet::CsvTable table;
  if (spec.kind == fdnet::JobKind::optimize) {
    table = fdnet::run_optimize(spec);
  } else {
    table = fdnet::run_grid(spec);
  }
  fdnet::write_csv_file(table, spec.out_path);
  std::cout << "wrote " << table.rows.size() << " rows to " << spec.out_path
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "outage and throughput of full-duplex cellular networks with "
      "sectorized antennas"};
  app.require_subcommand(0, 1);

  CommonFlags flags;
  flags.workers = std::max(1u, std::thread::hardware_concurrency());

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_path,
                    "key-value experiment config file");
    cmd->add_option("--preset", flags.preset,
                    "figure preset name (fig3a..fig10)");
    cmd->add_option("--engine", flags.engine, "analytic, mc or both");
    cmd->add_option("--seed", [&](const CLI::results_t& r) {
      flags.seed = std::stoull(r[0]);
      return true;
    }, "master seed");
    cmd->add_option("--realizations", [&](const CLI::results_t& r) {
      flags.realizations = std::stoull(r[0]);
      return true;
    }, "Monte Carlo realizations per grid point");
    cmd->add_option("--workers", [&](const CLI::results_t& r) {
      flags.workers = static_cast<unsigned>(std::stoul(r[0]));
      return true;
    }, "worker threads");
    cmd->add_option("--out", flags.out_path, "output path");
  };

  CLI::App* run = app.add_subcommand("run", "run the configured job");
  add_common(run);

  CLI::App* validate =
      app.add_subcommand("validate", "run the acceptance suite");
  bool quick = false;
  validate->add_flag("--quick", quick, "reduced realization counts");
  add_common(validate);

  CLI::App* dump = app.add_subcommand(
      "dump", "write one sampled network realization as CSV points");
  std::string dump_scenario = "2D";
  dump->add_option("--scenario", dump_scenario, "2D, 2U, 3D or 3U");
  add_common(dump);

  CLI::App* presets =
      app.add_subcommand("presets", "list the figure presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets->parsed()) {
      for (const char* name :
           {"fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a",
            "fig6b", "fig6c", "fig7a", "fig7b", "fig8", "fig9", "fig10"}) {
        std::cout << name << "\n";
      }
      return kExitOk;
    }
    if (dump->parsed()) {
      fdnet::ExperimentSpec spec;
      if (!flags.config_path.empty()) {
        fdnet::ConfigMap map = fdnet::parse_config_file(flags.config_path);
        fdnet::apply_env_overrides(map);
        spec = fdnet::spec_from_config(map);
      }
      const fdnet::Scenario scn = fdnet::scenario_from_name(dump_scenario);
      fdnet::RandomStream stream =
          fdnet::realization_stream({flags.seed.value_or(spec.seed)}, 0);
      const double w =
          fdnet::mc_window_radius(spec.network.lambda, spec.mc_options);
      const auto real = fdnet::sample_realization(spec.network, spec.antennas,
                                                  scn, w, stream);
      if (flags.out_path.empty()) {
        fdnet::dump_realization_csv(real, std::cout);
      } else {
        std::ofstream os(flags.out_path);
        fdnet::dump_realization_csv(real, os);
        std::cout << "wrote realization to " << flags.out_path << "\n";
      }
      return kExitOk;
    }
    if (validate->parsed()) {
      fdnet::AcceptanceOptions opts;
      if (flags.seed) opts.seed = *flags.seed;
      if (flags.workers) opts.workers = *flags.workers;
      if (flags.realizations) opts.n_anchor = opts.n_grid = *flags.realizations;
      opts.quick = quick;
      const auto results = fdnet::run_acceptance(opts);
      const std::string report = fdnet::render_report(results);
      if (!flags.out_path.empty()) {
        std::ofstream os(flags.out_path);
        os << report;
      }
      std::cout << report;
      for (const auto& r : results)
        if (!r.pass) return kExitNumericalError;
      return kExitOk;
    }
    // default and `run`: execute the configured job
    return run_job(flags);
  } catch (const fdnet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const fdnet::PointError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const fdnet::QuadratureError& e) {
    std::cerr << "numerical failure: " << e.what()
              << " (best estimate " << e.best_estimate << ", bound "
              << e.error_bound << ")\n";
    return kExitNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalError;
  }
}
