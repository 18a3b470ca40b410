#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hughes/datum.hpp"
#include "hughes/model.hpp"
#include "hughes/turning.hpp"

namespace hughes {

/// Thrown when a run exceeds its safety time cap.
class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Follow-the-leader velocities: particle i uses the gap behind it when
/// moves_left[i] != 0 and the gap ahead otherwise; the two ends see vacuum
/// and move at v_max. Speeds are [v(ell / gap)]_+.
void follow_the_leader_velocities(const VelocityModel& model, std::span<const double> x,
                                  std::span<const std::uint8_t> moves_left, double ell,
                                  std::span<double> out);

struct ExitEvent {
  double t = 0.0;
  std::size_t index = 0;
  int door = 0;  // -1 or +1
};

struct SwitchEvent {
  double t = 0.0;
  std::size_t index = 0;
  int direction = 0;  // new direction, -1 left, +1 right
};

/// Turning point just before and after an exit event.
struct ZetaJump {
  double t = 0.0;
  double before = 0.0;
  double after = 0.0;
  int doors = 0;  // -1, +1, or 0 for exits through both doors at once
};

struct EventLog {
  std::vector<ExitEvent> exits;
  std::vector<SwitchEvent> switches;
  std::vector<ZetaJump> zeta_jumps;
  std::optional<double> evacuation_time;
};

struct EventDrivenOptions {
  double rtol = 1e-10;
  double atol = 1e-13;
  double event_tol = 1e-10;         // exit time bracket width
  double door_tol = 1e-13;          // |x| >= 1 - door_tol counts as outside
  double simultaneous_tol = 1e-10;  // exits closer than this share one event
};

/// Semi-discrete state. Directions are frozen between exit events.
struct ParticleSystem {
  double t = 0.0;
  std::vector<double> x;
  double ell = 0.0;
  double alpha = 0.0;
  VelocityModel model = VelocityModel::affine(1.0, 1.0);
  double initial_max_density = 0.0;
  std::vector<std::uint8_t> inside;
  std::vector<std::uint8_t> moves_left;
  std::size_t left_count = 0;
  double zeta = 0.0;

  std::size_t gaps() const noexcept { return x.empty() ? 0 : x.size() - 1; }
  CorridorWindow window() const { return corridor_window(std::span<const std::uint8_t>(inside)); }
  bool evacuated() const noexcept;
};

/// Sets up the system at t = 0. Particles already at or beyond a door are
/// logged as exits at t = 0.
ParticleSystem make_particle_system(const ParticleInit& init, const ModelConfig& config,
                                    EventLog& log, const EventDrivenOptions& opts = {});

/// Integrates until t_end or full evacuation with adaptive Dormand-Prince
/// 5(4) steps, resolving exits (and the switches they trigger) as events.
/// Throws std::runtime_error on an ordering violation or too many exits.
void advance_event_driven(ParticleSystem& sys, double t_end, EventLog& log,
                          const EventDrivenOptions& opts = {});

struct DiscreteState {
  std::size_t h = 0;
  double dt = 0.0;
  std::vector<double> x;

  double t() const noexcept { return static_cast<double>(h) * dt; }
};

/// Largest stable step L / (rho_max v_max n) = ell / (rho_max v_max).
double cfl_bound(double ell, const VelocityModel& model);

/// Direction rule of the explicit scheme: x_0 left, x_n right, interior
/// particle i left iff (2 / (alpha ell)) x_i < #{inside, right of i} -
/// #{inside, left of i}; for alpha = 0 iff x_i < 0.
void discrete_directions(std::span<const double> x, double ell, double alpha,
                         std::span<std::uint8_t> moves_left);

/// One explicit Euler step of the follow-the-leader system with the counting
/// direction rule.
DiscreteState step_fully_discrete(const DiscreteState& state, double ell, double alpha,
                                  const VelocityModel& model);

enum class Engine { EventDriven, FullyDiscrete };

struct RunOptions {
  Engine engine = Engine::EventDriven;
  double dt = 0.0;               // discrete step; 0 means the CFL bound
  std::size_t sample_every = 1;  // discrete engine: every k-th step
  double sample_dt = 0.01;       // event engine cadence; 0 keeps first/last only
  bool record_samples = true;
  bool record_xi_discrete = true;
  EventDrivenOptions event{};
};

struct Sample {
  double t = 0.0;
  std::vector<double> x;
  CorridorWindow window;
  double zeta = 0.0;
  double xi = 0.0;
  double xi_discrete = 0.0;
};

struct RunResult {
  Engine engine = Engine::EventDriven;
  double alpha = 0.0;
  double ell = 0.0;
  double dt = 0.0;
  double initial_max_density = 0.0;
  std::vector<Sample> samples;
  EventLog log;
  double evacuation_time = 0.0;
  double min_gap = 0.0;
  std::size_t steps = 0;
  std::vector<std::string> warnings;
};

/// Safety horizon 10 (2 / v_max + n 2 / v_max).
double safety_time_cap(std::size_t n, const VelocityModel& model);

/// Runs until every particle satisfies |x_i| >= 1. The discrete engine
/// reports t^h of the first such step. Throws TimeoutError at the cap.
RunResult run_to_evacuation(const ParticleInit& init, const ModelConfig& config,
                            const RunOptions& opts = {});

}  // namespace hughes
