#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hughes/experiments.hpp"
#include "hughes/kernels.hpp"

namespace fs = std::filesystem;
using namespace hughes;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string engine;
  std::optional<double> alpha;
  std::optional<std::size_t> n;
  std::optional<double> dt;
  bool allow_cfl = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "INI config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--engine", c.engine, "event or discrete")
      ->check(CLI::IsMember({"event", "discrete"}));
  cmd->add_option("--alpha", c.alpha, "cost slope");
  cmd->add_option("--n", c.n, "number of gaps");
  cmd->add_option("--dt", c.dt, "time step of the discrete engine");
  cmd->add_flag("--allow-cfl-violation", c.allow_cfl, "run with dt above the CFL bound");
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (!c.engine.empty()) cfg.engine = parse_engine(c.engine);
  if (c.alpha) cfg.alpha = *c.alpha;
  if (c.n) cfg.n = *c.n;
  if (c.dt) cfg.dt = *c.dt;
  if (c.allow_cfl) cfg.allow_cfl_violation = true;
  return cfg;
}

std::optional<fs::path> out_dir(const Common& c) {
  if (c.out.empty()) return std::nullopt;
  return fs::path(c.out);
}

void parse_range(const std::string& text, ExperimentConfig& cfg) {
  double a = 0, b = 0, s = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':' || !in.eof()) {
    throw ConfigError(fmt::format("--alpha-range expects a:b:step, got '{}'", text));
  }
  cfg.alpha_start = a;
  cfg.alpha_stop = b;
  cfg.alpha_step = s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D Hughes evacuation simulator (follow-the-leader particles)"};
  app.require_subcommand(1);

  Common run_c, sweep_c, conv_c, val_c;
  auto* run = app.add_subcommand("run", "single run to evacuation");
  add_common(run, run_c);

  auto* sweep = app.add_subcommand("sweep", "evacuation time over an alpha grid");
  add_common(sweep, sweep_c);
  std::string range;
  sweep->add_option("--alpha-range", range, "a:b:step");

  auto* conv = app.add_subcommand("converge", "n-refinement study");
  add_common(conv, conv_c);

  auto* val = app.add_subcommand("validate", "check the velocity-law assumptions");
  add_common(val, val_c);
  std::size_t grid = kDefaultAssumptionGrid;
  val->add_option("--grid", grid, "grid points")->check(CLI::Range(3, 100000000));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto cfg = resolve(run_c);
      const auto r = run_single(cfg, out_dir(run_c));
      for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      fmt::print("engine={} alpha={} n={} evacuation_time={} exits={} switches={} kernels={}\n",
                 engine_name(r.engine), format_double(r.alpha), cfg.n,
                 format_double(r.evacuation_time), r.log.exits.size(), r.log.switches.size(),
                 kernels::active().name);
    } else if (sweep->parsed()) {
      auto cfg = resolve(sweep_c);
      if (!range.empty()) parse_range(range, cfg);
      const auto alphas = alpha_grid(cfg.alpha_start, cfg.alpha_stop, cfg.alpha_step);
      const auto s = run_sweep(cfg, alphas, out_dir(sweep_c));
      std::size_t failed = 0;
      for (const auto& row : s.rows) failed += row.error.empty() ? 0 : 1;
      if (const auto m = s.minimum()) {
        fmt::print("rows={} failed={} min_alpha={} min_time={} jumps={}\n", s.rows.size(),
                   failed, format_double(m->alpha), format_double(m->evacuation_time),
                   s.jumps.size());
      } else {
        fmt::print("rows={} failed={} (no successful rows)\n", s.rows.size(), failed);
      }
    } else if (conv->parsed()) {
      auto cfg = resolve(conv_c);
      if (!conv_c.engine.empty()) cfg.converge_engine = parse_engine(conv_c.engine);
      const auto rows = run_convergence(cfg, out_dir(conv_c));
      fmt::print("n,ell,max_abs_xi_minus_zeta,xi_zeta_bound,l1_to_reference\n");
      for (const auto& r : rows) {
        fmt::print("{},{},{},{},{}\n", r.n, format_double(r.ell), format_double(r.max_xi_zeta),
                   format_double(r.xi_zeta_bound),
                   r.l1_reference ? format_double(*r.l1_reference) : "");
      }
    } else if (val->parsed()) {
      const auto cfg = resolve(val_c);
      const auto report = run_validate(cfg, grid, out_dir(val_c));
      for (const auto& c : report.checks) {
        fmt::print("{:<16} {}  worst={} at rho={}\n", c.name, c.passed ? "pass" : "FAIL",
                   format_double(c.worst_violation), format_double(c.worst_rho));
      }
      return report.all_passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
