#include "hughes/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "hughes/observables.hpp"
#include "hughes/turning.hpp"

namespace hughes {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

Engine parse_engine(const std::string& text) {
  if (text == "event") return Engine::EventDriven;
  if (text == "discrete") return Engine::FullyDiscrete;
  throw ConfigError(fmt::format("unknown engine '{}' (expected event or discrete)", text));
}

std::string engine_name(Engine e) { return e == Engine::EventDriven ? "event" : "discrete"; }

std::vector<DatumPiece> parse_pieces(const std::string& text) {
  std::vector<DatumPiece> pieces;
  std::stringstream all(text);
  std::string chunk;
  while (std::getline(all, chunk, ';')) {
    std::istringstream in(chunk);
    DatumPiece p;
    if (!(in >> p.a)) continue;  // blank entry
    std::string rest;
    if (!(in >> p.b >> p.value) || (in >> rest)) {
      throw ConfigError(fmt::format("datum piece '{}' is not 'a b value'", chunk));
    }
    pieces.push_back(p);
  }
  if (pieces.empty()) throw ConfigError("datum has no pieces");
  return pieces;
}

namespace {

template <class T>
T read_value(const pt::ptree& node, const std::string& key, const std::string& section) {
  try {
    return node.get_value<T>();
  } catch (const pt::ptree_error&) {
    throw ConfigError(fmt::format("[{}] {}: cannot parse '{}'", section, key,
                                  node.get_value<std::string>()));
  }
}

bool read_bool(const pt::ptree& node, const std::string& key, const std::string& section) {
  const auto s = node.get_value<std::string>();
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(fmt::format("[{}] {}: expected a boolean, got '{}'", section, key, s));
}

std::size_t read_count(const pt::ptree& node, const std::string& key,
                       const std::string& section) {
  const auto v = read_value<long long>(node, key, section);
  if (v < 0) throw ConfigError(fmt::format("[{}] {} must be non-negative", section, key));
  return static_cast<std::size_t>(v);
}

}  // namespace

ExperimentConfig load_config(const fs::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(fmt::format("{}: key '{}' outside a section", path.string(), section));
    }
    for (const auto& [key, node] : body) {
      const auto unknown = [&] {
        return ConfigError(fmt::format("{}: unknown key [{}] {}", path.string(), section, key));
      };
      if (section == "model") {
        if (key == "v_max") cfg.v_max = read_value<double>(node, key, section);
        else if (key == "rho_max") cfg.rho_max = read_value<double>(node, key, section);
        else if (key == "alpha") cfg.alpha = read_value<double>(node, key, section);
        else throw unknown();
      } else if (section == "datum") {
        if (key == "pieces") cfg.pieces = parse_pieces(node.get_value<std::string>());
        else throw unknown();
      } else if (section == "run") {
        if (key == "n") cfg.n = read_count(node, key, section);
        else if (key == "engine") cfg.engine = parse_engine(node.get_value<std::string>());
        else if (key == "dt") cfg.dt = read_value<double>(node, key, section);
        else if (key == "allow_cfl_violation") cfg.allow_cfl_violation = read_bool(node, key, section);
        else if (key == "sample_dt") cfg.sample_dt = read_value<double>(node, key, section);
        else if (key == "sample_every") cfg.sample_every = read_count(node, key, section);
        else throw unknown();
      } else if (section == "event") {
        if (key == "rtol") cfg.event.rtol = read_value<double>(node, key, section);
        else if (key == "atol") cfg.event.atol = read_value<double>(node, key, section);
        else if (key == "event_tol") cfg.event.event_tol = read_value<double>(node, key, section);
        else throw unknown();
      } else if (section == "sweep") {
        if (key == "alpha_start") cfg.alpha_start = read_value<double>(node, key, section);
        else if (key == "alpha_stop") cfg.alpha_stop = read_value<double>(node, key, section);
        else if (key == "alpha_step") cfg.alpha_step = read_value<double>(node, key, section);
        else if (key == "jump_threshold") cfg.jump_threshold = read_value<double>(node, key, section);
        else if (key == "threads") cfg.threads = static_cast<unsigned>(read_count(node, key, section));
        else throw unknown();
      } else if (section == "converge") {
        if (key == "n_list") {
          cfg.n_list.clear();
          std::istringstream in(node.get_value<std::string>());
          long long v = 0;
          while (in >> v) {
            if (v < 1) throw ConfigError("[converge] n_list entries must be >= 1");
            cfg.n_list.push_back(static_cast<std::size_t>(v));
          }
          if (!in.eof()) throw ConfigError("[converge] n_list must be whitespace-separated integers");
        } else if (key == "sample_time") {
          cfg.converge_time = read_value<double>(node, key, section);
        } else if (key == "engine") {
          cfg.converge_engine = parse_engine(node.get_value<std::string>());
        } else {
          throw unknown();
        }
      } else {
        throw ConfigError(fmt::format("{}: unknown section [{}]", path.string(), section));
      }
    }
  }
  return cfg;
}

std::vector<double> alpha_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) {
    throw ConfigError(fmt::format("bad alpha range {}:{}:{}", start, stop, step));
  }
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = start + static_cast<double>(k) * step;
  return grid;
}

ModelConfig model_config(const ExperimentConfig& cfg, double alpha) {
  if (!(alpha >= 0.0)) throw ConfigError(fmt::format("alpha must be >= 0, got {}", alpha));
  ModelConfig m;
  m.velocity = VelocityModel::affine(cfg.v_max, cfg.rho_max);
  m.cost.alpha = alpha;
  return m;
}

InitialDatum make_datum(const ExperimentConfig& cfg) {
  InitialDatum d(cfg.pieces);
  d.check_bounded_by(cfg.rho_max);
  return d;
}

double resolve_dt(const ExperimentConfig& cfg, const ParticleInit& init) {
  const double bound = cfl_bound(init.ell, VelocityModel::affine(cfg.v_max, cfg.rho_max));
  if (cfg.dt < 0.0) throw ConfigError("dt must be >= 0");
  const double dt = cfg.dt > 0.0 ? cfg.dt : bound;
  if (cfg.engine == Engine::FullyDiscrete && dt > bound * (1.0 + 1e-12) &&
      !cfg.allow_cfl_violation) {
    throw ConfigError(fmt::format(
        "dt = {} exceeds the CFL bound L/(rho_max v_max n) = {}; pass --allow-cfl-violation "
        "to run anyway",
        format_double(dt), format_double(bound)));
  }
  return dt;
}

RunOptions run_options(const ExperimentConfig& cfg, const ParticleInit& init) {
  RunOptions o;
  o.engine = cfg.engine;
  o.dt = resolve_dt(cfg, init);
  o.sample_dt = cfg.sample_dt;
  o.sample_every = cfg.sample_every;
  o.event = cfg.event;
  return o;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  return f;
}

void close_out(std::ofstream& f, const fs::path& path) {
  f.close();
  if (!f) throw std::runtime_error(fmt::format("error while writing {}", path.string()));
}

void write_json(const fs::path& path, const ordered_json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
  close_out(f, path);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  }
}

// Column documentation for every file this module writes.
ordered_json schema() {
  ordered_json s;
  s["float_format"] = "decimal, 17 significant digits";
  s["files"]["trajectories.csv"] = {
      {"columns", {"t", "x_0", "...", "x_n"}},
      {"description", "particle positions at each sample time"}};
  s["files"]["turning.csv"] = {
      {"columns", {"t", "zeta", "xi", "xi_discrete", "window_first", "window_last"}},
      {"description",
       "exact turning point zeta, classical xi, its counting-form solve, and the index "
       "range of particles inside (-1, 1) (empty when none)"}};
  s["files"]["density.csv"] = {
      {"columns", {"t", "x", "rho"}},
      {"description",
       "piecewise-constant particle density: rho on [x, next x); the last row of each "
       "time has rho = 0"}};
  s["files"]["events.csv"] = {
      {"columns", {"kind", "t", "index", "door", "direction", "zeta_before", "zeta_after"}},
      {"description",
       "kind is exit, switch or zeta_jump; door is -1/+1 (0 for both doors at once); "
       "direction is the new direction -1/+1; unused fields are empty"}};
  s["files"]["summary.json"] = {{"description", "run parameters, evacuation time, counts"}};
  s["files"]["sweep.csv"] = {
      {"columns", {"alpha", "evacuation_time", "exit_count", "switch_count", "min_gap", "error"}},
      {"description", "one row per alpha, ordered by alpha"}};
  s["files"]["jumps.json"] = {
      {"description", "alpha values where |T(alpha_k) - T(alpha_{k-1})| exceeds threshold"}};
  s["files"]["convergence.csv"] = {
      {"columns",
       {"n", "ell", "max_abs_xi_minus_zeta", "xi_zeta_bound", "max_abs_zeta", "max_abs_xi",
        "l1_to_reference"}},
      {"description",
       "per n; xi_zeta_bound = alpha ell / 2; l1_to_reference is empty unless the datum is "
       "one block symmetric about 0"}};
  s["files"]["assumptions.json"] = {{"description", "finite-difference assumption checks"}};
  return s;
}

void write_run_files(const RunResult& r, const ExperimentConfig& cfg, const fs::path& out) {
  ensure_dir(out);
  const std::size_t count = r.samples.empty() ? cfg.n + 1 : r.samples.front().x.size();

  {
    const auto path = out / "trajectories.csv";
    auto f = open_out(path);
    f << "t";
    for (std::size_t i = 0; i < count; ++i) f << ",x_" << i;
    f << '\n';
    for (const auto& s : r.samples) {
      f << format_double(s.t);
      for (double x : s.x) f << ',' << format_double(x);
      f << '\n';
    }
    close_out(f, path);
  }
  {
    const auto path = out / "turning.csv";
    auto f = open_out(path);
    f << "t,zeta,xi,xi_discrete,window_first,window_last\n";
    for (const auto& s : r.samples) {
      f << format_double(s.t) << ',' << format_double(s.zeta) << ',' << format_double(s.xi)
        << ',' << format_double(s.xi_discrete) << ',';
      if (!s.window.empty()) f << *s.window.first << ',' << *s.window.last;
      else f << ',';
      f << '\n';
    }
    close_out(f, path);
  }
  {
    const auto path = out / "density.csv";
    auto f = open_out(path);
    f << "t,x,rho\n";
    for (const auto& s : r.samples) {
      const auto prof = density_from_particles(s.x, r.ell);
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double rho = i < prof.values.size() ? prof.values[i] : 0.0;
        f << format_double(s.t) << ',' << format_double(s.x[i]) << ',' << format_double(rho)
          << '\n';
      }
    }
    close_out(f, path);
  }
  {
    const auto path = out / "events.csv";
    auto f = open_out(path);
    f << "kind,t,index,door,direction,zeta_before,zeta_after\n";
    for (const auto& e : r.log.exits) {
      f << "exit," << format_double(e.t) << ',' << e.index << ',' << e.door << ",,,\n";
    }
    for (const auto& s : r.log.switches) {
      f << "switch," << format_double(s.t) << ',' << s.index << ",," << s.direction << ",,\n";
    }
    for (const auto& z : r.log.zeta_jumps) {
      f << "zeta_jump," << format_double(z.t) << ",," << z.doors << ",,"
        << format_double(z.before) << ',' << format_double(z.after) << '\n';
    }
    close_out(f, path);
  }
  {
    ordered_json j;
    j["engine"] = engine_name(r.engine);
    j["alpha"] = r.alpha;
    j["n"] = count - 1;
    j["ell"] = r.ell;
    j["v_max"] = cfg.v_max;
    j["rho_max"] = cfg.rho_max;
    if (r.engine == Engine::FullyDiscrete) {
      j["dt"] = r.dt;
      j["cfl_bound"] = cfl_bound(r.ell, VelocityModel::affine(cfg.v_max, cfg.rho_max));
    }
    j["evacuation_time"] = r.evacuation_time;
    j["evacuation_time_definition"] =
        r.engine == Engine::FullyDiscrete
            ? "t^h = h dt at the first step with every |x_i| >= 1; resolution dt, no "
              "interpolation"
            : "time of the last exit event, bracketed to the event tolerance";
    j["exit_count"] = r.log.exits.size();
    j["switch_count"] = r.log.switches.size();
    j["min_gap"] = r.min_gap;
    j["initial_max_density"] = r.initial_max_density;
    j["steps"] = r.steps;
    j["warnings"] = r.warnings;
    write_json(out / "summary.json", j);
  }
  write_json(out / "schema.json", schema());
}

}  // namespace

RunResult run_single(const ExperimentConfig& cfg, const std::optional<fs::path>& out) {
  const auto datum = make_datum(cfg);
  const auto init = atomize(datum, cfg.n);
  const auto opts = run_options(cfg, init);
  RunResult r = run_to_evacuation(init, model_config(cfg, cfg.alpha), opts);
  if (out) write_run_files(r, cfg, *out);
  return r;
}

std::optional<SweepRow> SweepResult::minimum() const {
  std::optional<SweepRow> best;
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    if (!best || r.evacuation_time < best->evacuation_time) best = r;
  }
  return best;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const std::vector<double>& alphas,
                      const std::optional<fs::path>& out) {
  if (alphas.empty()) throw ConfigError("alpha grid is empty");
  const auto datum = make_datum(cfg);
  const auto init = atomize(datum, cfg.n);
  RunOptions opts = run_options(cfg, init);
  opts.record_samples = false;

  SweepResult result;
  result.threshold = cfg.jump_threshold;
  result.rows.resize(alphas.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < alphas.size(); k = next++) {
      SweepRow& row = result.rows[k];
      row.alpha = alphas[k];
      try {
        const RunResult r = run_to_evacuation(init, model_config(cfg, alphas[k]), opts);
        row.evacuation_time = r.evacuation_time;
        row.exit_count = r.log.exits.size();
        row.switch_count = r.log.switches.size();
        row.min_gap = r.min_gap;
      } catch (const std::exception& e) {
        row.error = e.what();
        row.evacuation_time = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, alphas.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  for (std::size_t k = 1; k < result.rows.size(); ++k) {
    const auto& a = result.rows[k - 1];
    const auto& b = result.rows[k];
    if (!a.error.empty() || !b.error.empty()) continue;
    if (std::abs(b.evacuation_time - a.evacuation_time) > cfg.jump_threshold) {
      result.jumps.push_back(b.alpha);
    }
  }

  if (out) {
    ensure_dir(*out);
    const auto path = *out / "sweep.csv";
    auto f = open_out(path);
    f << "alpha,evacuation_time,exit_count,switch_count,min_gap,error\n";
    for (const auto& r : result.rows) {
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      f << format_double(r.alpha) << ',' << format_double(r.evacuation_time) << ','
        << r.exit_count << ',' << r.switch_count << ',' << format_double(r.min_gap) << ','
        << err << '\n';
    }
    close_out(f, path);

    ordered_json j;
    j["threshold"] = result.threshold;
    ordered_json list = ordered_json::array();
    for (std::size_t k = 1; k < result.rows.size(); ++k) {
      const auto& a = result.rows[k - 1];
      const auto& b = result.rows[k];
      if (!a.error.empty() || !b.error.empty()) continue;
      const double d = b.evacuation_time - a.evacuation_time;
      if (std::abs(d) > cfg.jump_threshold) {
        list.push_back({{"alpha_before", a.alpha}, {"alpha", b.alpha}, {"delta_t", d}});
      }
    }
    j["jumps"] = list;
    if (const auto m = result.minimum()) {
      j["minimum"] = {{"alpha", m->alpha}, {"evacuation_time", m->evacuation_time}};
    }
    write_json(*out / "jumps.json", j);
    write_json(*out / "schema.json", schema());
  }
  return result;
}

namespace {

// Positions at time t: event engine integrated to t exactly, discrete engine
// at step floor(t / dt).
std::vector<double> positions_at(const ParticleInit& init, const ModelConfig& model,
                                 const RunOptions& opts, double t) {
  if (opts.engine == Engine::EventDriven) {
    EventLog log;
    ParticleSystem sys = make_particle_system(init, model, log, opts.event);
    advance_event_driven(sys, t, log, opts.event);
    return sys.x;
  }
  DiscreteState s{0, opts.dt, init.positions};
  const auto steps = static_cast<std::size_t>(std::floor(t / opts.dt + 1e-9));
  for (std::size_t h = 0; h < steps; ++h) {
    s = step_fully_discrete(s, init.ell, model.cost.alpha, model.velocity);
  }
  return s.x;
}

}  // namespace

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg,
                                            const std::optional<fs::path>& out) {
  const auto datum = make_datum(cfg);
  const auto& pieces = datum.pieces();
  const bool symmetric_block = pieces.size() == 1 && pieces[0].a == -pieces[0].b;
  const ModelConfig model = model_config(cfg, cfg.alpha);

  std::vector<ConvergenceRow> rows;
  for (std::size_t n : cfg.n_list) {
    const auto init = atomize(datum, n);
    ExperimentConfig c = cfg;
    c.n = n;
    c.engine = cfg.converge_engine;
    RunOptions opts = run_options(c, init);
    opts.record_xi_discrete = false;
    const RunResult r = run_to_evacuation(init, model, opts);

    ConvergenceRow row;
    row.n = n;
    row.ell = init.ell;
    row.xi_zeta_bound = 0.5 * cfg.alpha * init.ell;
    for (const auto& s : r.samples) {
      row.max_xi_zeta = std::max(row.max_xi_zeta, std::abs(s.xi - s.zeta));
      row.max_zeta = std::max(row.max_zeta, std::abs(s.zeta));
      row.max_xi = std::max(row.max_xi, std::abs(s.xi));
    }
    if (symmetric_block) {
      const auto x = positions_at(init, model, opts, cfg.converge_time);
      const auto prof = density_from_particles(x, init.ell);
      const auto ref = lwr_block_reference(model.velocity, pieces[0].value, pieces[0].b,
                                           cfg.converge_time);
      const double hi = std::max(x.back(), ref.pieces.empty() ? 0.0 : ref.pieces.back().b) + 1.0;
      row.l1_reference = l1_distance(prof, ref, 0.0, hi);
    }
    rows.push_back(row);
  }

  if (out) {
    ensure_dir(*out);
    const auto path = *out / "convergence.csv";
    auto f = open_out(path);
    f << "n,ell,max_abs_xi_minus_zeta,xi_zeta_bound,max_abs_zeta,max_abs_xi,l1_to_reference\n";
    for (const auto& r : rows) {
      f << r.n << ',' << format_double(r.ell) << ',' << format_double(r.max_xi_zeta) << ','
        << format_double(r.xi_zeta_bound) << ',' << format_double(r.max_zeta) << ','
        << format_double(r.max_xi) << ',';
      if (r.l1_reference) f << format_double(*r.l1_reference);
      f << '\n';
    }
    close_out(f, path);
    write_json(*out / "schema.json", schema());
  }
  return rows;
}

AssumptionReport run_validate(const ExperimentConfig& cfg, std::size_t grid_points,
                              const std::optional<fs::path>& out) {
  const auto model = VelocityModel::affine(cfg.v_max, cfg.rho_max);
  AssumptionReport report = validate_assumptions(model, grid_points);
  if (out) {
    ensure_dir(*out);
    ordered_json j;
    j["grid_points"] = report.grid_points;
    j["tolerance"] = report.tolerance;
    j["critical_density"] = model.critical_density();
    j["all_passed"] = report.all_passed();
    for (const auto& c : report.checks) {
      j["checks"].push_back({{"name", c.name},
                             {"passed", c.passed},
                             {"worst_violation", c.worst_violation},
                             {"worst_rho", c.worst_rho}});
    }
    write_json(*out / "assumptions.json", j);
    write_json(*out / "schema.json", schema());
  }
  return report;
}

}  // namespace hughes
