#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hughes/datum.hpp"
#include "hughes/dynamics.hpp"
#include "hughes/model.hpp"

namespace hughes {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run, sweep or convergence study needs. Defaults reproduce the
/// two-block evacuation experiment: 0.9 on [-1, -0.5) and [-0.4, 0), n = 200,
/// affine law with v_max = rho_max = 1, fully discrete engine at the CFL step.
struct ExperimentConfig {
  double v_max = 1.0;
  double rho_max = 1.0;
  double alpha = 1.3;
  std::vector<DatumPiece> pieces{{-1.0, -0.5, 0.9}, {-0.4, 0.0, 0.9}};

  std::size_t n = 200;
  Engine engine = Engine::FullyDiscrete;
  double dt = 0.0;  // 0 selects the CFL bound
  bool allow_cfl_violation = false;
  double sample_dt = 0.01;
  std::size_t sample_every = 1;
  EventDrivenOptions event{};

  double alpha_start = 0.0;
  double alpha_stop = 20.0;
  double alpha_step = 0.1;
  double jump_threshold = 0.05;
  unsigned threads = 0;  // 0 means hardware concurrency

  std::vector<std::size_t> n_list{25, 50, 100, 200};
  double converge_time = 0.5;
  Engine converge_engine = Engine::EventDriven;
};

/// Reads a sectioned key = value file. Unknown keys are rejected.
///
///   [model]    v_max, rho_max, alpha
///   [datum]    pieces = "a b value; a b value; ..."
///   [run]      n, engine (event|discrete), dt, allow_cfl_violation,
///              sample_dt, sample_every
///   [event]    rtol, atol, event_tol
///   [sweep]    alpha_start, alpha_stop, alpha_step, jump_threshold, threads
///   [converge] n_list = "25 50 100", sample_time, engine
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<DatumPiece> parse_pieces(const std::string& text);
Engine parse_engine(const std::string& text);
std::string engine_name(Engine e);

/// alpha_k = start + k step for k = 0 .. floor((stop - start) / step).
std::vector<double> alpha_grid(double start, double stop, double step);

ModelConfig model_config(const ExperimentConfig& cfg, double alpha);
InitialDatum make_datum(const ExperimentConfig& cfg);

/// Resolves dt (0 means the CFL bound) and rejects a fully discrete step
/// above the bound unless allow_cfl_violation is set.
double resolve_dt(const ExperimentConfig& cfg, const ParticleInit& init);

RunOptions run_options(const ExperimentConfig& cfg, const ParticleInit& init);

struct SweepRow {
  double alpha = 0.0;
  double evacuation_time = 0.0;
  std::size_t exit_count = 0;
  std::size_t switch_count = 0;
  double min_gap = 0.0;
  std::string error;  // empty on success
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by alpha
  std::vector<double> jumps;   // alpha where |T_k - T_{k-1}| > threshold
  double threshold = 0.0;

  /// Row with the smallest evacuation time among successful rows.
  std::optional<SweepRow> minimum() const;
};

struct ConvergenceRow {
  std::size_t n = 0;
  double ell = 0.0;
  double max_xi_zeta = 0.0;
  double xi_zeta_bound = 0.0;  // alpha ell / 2
  double max_zeta = 0.0;
  double max_xi = 0.0;
  std::optional<double> l1_reference;
};

/// Single run; writes trajectories.csv, turning.csv, density.csv, events.csv,
/// summary.json and schema.json into `out` when given.
RunResult run_single(const ExperimentConfig& cfg,
                     const std::optional<std::filesystem::path>& out = std::nullopt);

/// One run per grid alpha on a worker pool; writes sweep.csv, jumps.json and
/// schema.json when `out` is given. Failing rows carry their error.
SweepResult run_sweep(const ExperimentConfig& cfg, const std::vector<double>& alphas,
                      const std::optional<std::filesystem::path>& out = std::nullopt);

/// For each n: largest |xi - zeta| over samples and, when the datum is one
/// block symmetric about 0, the L1 distance on x >= 0 to the LWR reference at
/// converge_time. Writes convergence.csv and schema.json when `out` is given.
std::vector<ConvergenceRow> run_convergence(
    const ExperimentConfig& cfg,
    const std::optional<std::filesystem::path>& out = std::nullopt);

/// Text report of validate_assumptions; writes assumptions.json when `out` is given.
AssumptionReport run_validate(const ExperimentConfig& cfg, std::size_t grid_points,
                              const std::optional<std::filesystem::path>& out = std::nullopt);

/// 17 significant digits.
std::string format_double(double v);

}  // namespace hughes
