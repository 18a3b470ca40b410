#include "hughes/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hughes/kernels.hpp"

namespace hughes {

void follow_the_leader_velocities(const VelocityModel& model, std::span<const double> x,
                                  std::span<const std::uint8_t> moves_left, double ell,
                                  std::span<double> out) {
  const std::size_t count = x.size();
  if (model.is_affine()) {
    kernels::active().ftl_velocities(x.data(), moves_left.data(), count, ell, model.v_max(),
                                     model.rho_max(), out.data());
    return;
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (moves_left[i]) {
      out[i] = i == 0 ? -model.v_max() : -model.eval_v_plus(ell / (x[i] - x[i - 1]));
    } else {
      out[i] = i + 1 == count ? model.v_max() : model.eval_v_plus(ell / (x[i + 1] - x[i]));
    }
  }
}

bool ParticleSystem::evacuated() const noexcept {
  return std::none_of(inside.begin(), inside.end(), [](std::uint8_t f) { return f != 0; });
}

double safety_time_cap(std::size_t n, const VelocityModel& model) {
  const double cross = 2.0 / model.v_max();
  return 10.0 * (cross + static_cast<double>(n) * cross);
}

double cfl_bound(double ell, const VelocityModel& model) {
  return ell / (model.rho_max() * model.v_max());
}

namespace {

int door_of(double x) { return x < 0.0 ? -1 : 1; }

void refresh_directions(ParticleSystem& sys) {
  sys.moves_left.assign(sys.x.size(), 0);
  for (std::size_t i = 0; i < sys.left_count; ++i) sys.moves_left[i] = 1;
}

// Dormand-Prince 5(4) for the autonomous system x' = V(x) with frozen directions.
class DormandPrince {
 public:
  explicit DormandPrince(const ParticleSystem& sys) : sys_(sys) {
    const std::size_t m = sys.x.size();
    for (auto& k : k_) k.resize(m);
    stage_.resize(m);
  }

  // y = x + h * b5 . k, err = h * (b5 - b4) . k.
  void step(std::span<const double> x, double h, std::vector<double>& y,
            std::vector<double>& err) {
    static constexpr double a[6][6] = {
        {1.0 / 5, 0, 0, 0, 0, 0},
        {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
        {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static constexpr double e[7] = {71.0 / 57600,    0,           -71.0 / 16695, 71.0 / 1920,
                                    -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
    const std::size_t m = x.size();
    rhs(x, k_[0]);
    for (int s = 0; s < 6; ++s) {
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j = 0; j <= s; ++j) acc += a[s][j] * k_[j][i];
        stage_[i] = x[i] + h * acc;
      }
      rhs(stage_, k_[s + 1]);
    }
    // The last stage is evaluated at the fifth-order solution.
    y = stage_;
    err.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 7; ++j) acc += e[j] * k_[j][i];
      err[i] = h * acc;
    }
  }

 private:
  void rhs(std::span<const double> x, std::vector<double>& out) {
    follow_the_leader_velocities(sys_.model, x, sys_.moves_left, sys_.ell, out);
  }

  const ParticleSystem& sys_;
  std::array<std::vector<double>, 7> k_;
  std::vector<double> stage_;
};

bool crosses_door(const ParticleSystem& sys, std::span<const double> y, double door_tol) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (sys.inside[i] && std::abs(y[i]) >= 1.0 - door_tol) return true;
  }
  return false;
}

double smallest_gap(std::span<const double> x) {
  return kernels::active().min_gap(x.data(), x.size());
}

void check_order(const ParticleSystem& sys) {
  const double g = smallest_gap(sys.x);
  if (!(g > 1e-12)) {
    throw std::runtime_error(
        fmt::format("particle ordering violated at t = {} (min gap {})", sys.t, g));
  }
}

// Marks exits at the current time, recomputes zeta and logs switches.
void handle_exits(ParticleSystem& sys, EventLog& log, const EventDrivenOptions& opts) {
  std::vector<double> vel(sys.x.size());
  follow_the_leader_velocities(sys.model, sys.x, sys.moves_left, sys.ell, vel);

  const CorridorWindow before_window = sys.window();
  std::vector<std::size_t> leaving;
  for (std::size_t i = 0; i < sys.x.size(); ++i) {
    if (!sys.inside[i]) continue;
    const double dist = 1.0 - std::abs(sys.x[i]);
    const bool toward = (sys.x[i] < 0.0) == (vel[i] < 0.0);
    if (dist <= opts.door_tol || (toward && dist <= std::abs(vel[i]) * opts.simultaneous_tol)) {
      leaving.push_back(i);
    }
  }
  if (leaving.empty()) return;

  bool left_door = false;
  bool right_door = false;
  for (std::size_t i : leaving) {
    const int door = door_of(sys.x[i]);
    (door < 0 ? left_door : right_door) = true;
    sys.inside[i] = 0;
    log.exits.push_back({sys.t, i, door});
  }
  if (log.exits.size() > sys.x.size() + 1) {
    throw std::runtime_error(fmt::format("{} exit events for {} particles", log.exits.size(),
                                         sys.x.size()));
  }

  if (sys.evacuated()) {
    log.evacuation_time = sys.t;
    return;
  }

  const double zeta_before = solve_zeta(build_cost_profile(sys.x, sys.ell, sys.alpha, before_window));
  const double zeta_after = solve_zeta(build_cost_profile(sys.x, sys.ell, sys.alpha, sys.window()));
  log.zeta_jumps.push_back(
      {sys.t, zeta_before, zeta_after, left_door && right_door ? 0 : (left_door ? -1 : 1)});

  const std::size_t old_left = sys.left_count;
  const std::size_t new_left = split_count(sys.x, zeta_after);
  for (std::size_t i = std::min(old_left, new_left); i < std::max(old_left, new_left); ++i) {
    log.switches.push_back({sys.t, i, new_left > old_left ? -1 : 1});
  }
  sys.left_count = new_left;
  sys.zeta = zeta_after;
  refresh_directions(sys);
}

}  // namespace

ParticleSystem make_particle_system(const ParticleInit& init, const ModelConfig& config,
                                    EventLog& log, const EventDrivenOptions& opts) {
  if (init.positions.size() < 2) throw std::invalid_argument("need at least two particles");
  ParticleSystem sys;
  sys.x = init.positions;
  sys.ell = init.ell;
  sys.alpha = config.cost.alpha;
  sys.model = config.velocity;
  sys.initial_max_density = init.max_density;
  sys.inside.assign(sys.x.size(), 1);
  for (std::size_t i = 0; i < sys.x.size(); ++i) {
    if (std::abs(sys.x[i]) >= 1.0 - opts.door_tol) {
      sys.inside[i] = 0;
      log.exits.push_back({0.0, i, door_of(sys.x[i])});
    }
  }
  if (sys.evacuated()) {
    log.evacuation_time = 0.0;
  } else {
    sys.zeta = solve_zeta(build_cost_profile(sys.x, sys.ell, sys.alpha, sys.window()));
    sys.left_count = split_count(sys.x, sys.zeta);
  }
  refresh_directions(sys);
  return sys;
}

void advance_event_driven(ParticleSystem& sys, double t_end, EventLog& log,
                          const EventDrivenOptions& opts) {
  DormandPrince dp(sys);
  std::vector<double> y, err, probe, probe_err;
  const double v_max = sys.model.v_max();
  double h_try = sys.ell / (4.0 * v_max * std::max(sys.initial_max_density, 1e-300));

  while (sys.t < t_end && !sys.evacuated()) {
    const double remaining = t_end - sys.t;
    const double gap_cap = smallest_gap(sys.x) / (4.0 * v_max);
    double h = std::min({h_try, gap_cap, remaining});
    if (!(h > 0.0)) throw std::runtime_error("event engine step collapsed to zero");

    dp.step(sys.x, h, y, err);
    double norm = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double scale = opts.atol + opts.rtol * std::max(std::abs(sys.x[i]), std::abs(y[i]));
      norm = std::max(norm, std::abs(err[i]) / scale);
    }
    if (norm > 1.0) {
      h_try = h * std::max(0.2, 0.9 * std::pow(norm, -0.2));
      if (h_try < 1e-14) throw std::runtime_error("event engine step size underflow");
      continue;
    }
    h_try = h * std::min(5.0, norm > 0.0 ? 0.9 * std::pow(norm, -0.2) : 5.0);

    if (crosses_door(sys, y, opts.door_tol)) {
      // Shrink the step until it lands within event_tol past the first exit.
      double lo = 0.0;
      double hi = h;
      while (hi - lo > opts.event_tol) {
        const double mid = 0.5 * (lo + hi);
        dp.step(sys.x, mid, probe, probe_err);
        if (crosses_door(sys, probe, opts.door_tol)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      if (hi < h) dp.step(sys.x, hi, y, err);
      sys.x = y;
      sys.t = hi == remaining ? t_end : sys.t + hi;
      check_order(sys);
      handle_exits(sys, log, opts);
      continue;
    }

    sys.x = y;
    sys.t = h == remaining ? t_end : sys.t + h;
    check_order(sys);
  }
}

void discrete_directions(std::span<const double> x, double ell, double alpha,
                         std::span<std::uint8_t> moves_left) {
  const std::size_t count = x.size();
  if (count == 0) return;
  moves_left[0] = 1;
  moves_left[count - 1] = 0;
  if (count < 3) return;

  const bool sorted = std::is_sorted(x.begin(), x.end());
  const double scale = alpha > 0.0 ? 2.0 / (alpha * ell) : 0.0;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double xi = x[i];
    std::ptrdiff_t right = 0;
    std::ptrdiff_t left = 0;
    if (sorted) {
      // #{ x_i < x_j < 1 } and #{ -1 < x_j < x_i }
      right = std::lower_bound(x.begin(), x.end(), kCorridorRight) -
              std::upper_bound(x.begin(), x.end(), xi);
      left = std::lower_bound(x.begin(), x.end(), xi) -
             std::upper_bound(x.begin(), x.end(), kCorridorLeft);
      right = std::max<std::ptrdiff_t>(right, 0);
      left = std::max<std::ptrdiff_t>(left, 0);
    } else {
      for (double xj : x) {
        if (xi < xj && xj < kCorridorRight) ++right;
        if (kCorridorLeft < xj && xj < xi) ++left;
      }
    }
    const double diff = static_cast<double>(right - left);
    moves_left[i] = alpha > 0.0 ? (scale * xi < diff) : (xi < 0.0);
  }
}

namespace {

void discrete_update(const DiscreteState& state, std::span<const std::uint8_t> moves_left,
                     double ell, const VelocityModel& model, std::vector<double>& vel,
                     DiscreteState& next) {
  vel.resize(state.x.size());
  follow_the_leader_velocities(model, state.x, moves_left, ell, vel);
  next.x.resize(state.x.size());
  kernels::active().axpy(state.x.data(), vel.data(), state.x.size(), state.dt, next.x.data());
  next.h = state.h + 1;
  next.dt = state.dt;
}

Sample make_sample(double t, std::span<const double> x, double ell, double alpha,
                   const CorridorWindow& window, bool with_xi_discrete) {
  Sample s;
  s.t = t;
  s.x.assign(x.begin(), x.end());
  const TurningState ts = turning_state(x, ell, alpha, window);
  s.window = ts.window;
  s.zeta = ts.zeta;
  s.xi = ts.xi;
  s.xi_discrete = with_xi_discrete ? solve_xi_discrete(x, ell, alpha) : 0.0;
  return s;
}

RunResult run_event(const ParticleInit& init, const ModelConfig& config,
                    const RunOptions& opts) {
  RunResult r;
  r.engine = Engine::EventDriven;
  r.alpha = config.cost.alpha;
  r.ell = init.ell;
  r.initial_max_density = init.max_density;

  ParticleSystem sys = make_particle_system(init, config, r.log, opts.event);
  const double cap = safety_time_cap(init.gaps(), config.velocity);
  r.min_gap = smallest_gap(sys.x);
  auto record = [&] {
    if (opts.record_samples) {
      r.samples.push_back(make_sample(sys.t, sys.x, sys.ell, sys.alpha, sys.window(),
                                      opts.record_xi_discrete));
    }
  };
  record();

  std::size_t k = 1;
  while (!sys.evacuated()) {
    double target = cap;
    if (opts.record_samples && opts.sample_dt > 0.0) {
      target = std::min(cap, static_cast<double>(k) * opts.sample_dt);
    }
    advance_event_driven(sys, target, r.log, opts.event);
    ++r.steps;
    r.min_gap = std::min(r.min_gap, smallest_gap(sys.x));
    if (sys.evacuated()) break;
    if (sys.t >= cap) {
      throw TimeoutError(fmt::format("no evacuation before the safety cap t = {}", cap));
    }
    record();
    ++k;
  }
  r.evacuation_time = *r.log.evacuation_time;
  if (opts.record_samples && (r.samples.empty() || r.samples.back().t != sys.t)) record();
  return r;
}

RunResult run_discrete(const ParticleInit& init, const ModelConfig& config,
                       const RunOptions& opts) {
  RunResult r;
  r.engine = Engine::FullyDiscrete;
  r.alpha = config.cost.alpha;
  r.ell = init.ell;
  r.initial_max_density = init.max_density;
  const VelocityModel& model = config.velocity;
  const double bound = cfl_bound(init.ell, model);
  r.dt = opts.dt > 0.0 ? opts.dt : bound;
  if (r.dt > bound * (1.0 + 1e-12)) {
    r.warnings.push_back(
        fmt::format("dt = {} exceeds the CFL bound {}; order preservation not guaranteed",
                    r.dt, bound));
  }

  const std::size_t count = init.positions.size();
  const double cap = safety_time_cap(init.gaps(), model);
  DiscreteState state{0, r.dt, init.positions};
  DiscreteState next;
  std::vector<double> vel;
  std::vector<std::uint8_t> dir(count), prev_dir(count);
  std::vector<std::uint8_t> out(count, 0);
  bool have_prev = false;
  bool warned_order = false;
  r.min_gap = smallest_gap(state.x);

  auto log_exits = [&] {
    for (std::size_t i = 0; i < count; ++i) {
      if (!out[i] && std::abs(state.x[i]) >= 1.0) {
        out[i] = 1;
        r.log.exits.push_back({state.t(), i, door_of(state.x[i])});
      }
    }
  };
  auto record = [&] {
    if (opts.record_samples) {
      r.samples.push_back(make_sample(state.t(), state.x, init.ell, r.alpha,
                                      corridor_window(std::span<const double>(state.x)),
                                      opts.record_xi_discrete));
    }
  };
  const std::size_t every = std::max<std::size_t>(opts.sample_every, 1);

  log_exits();
  record();
  while (!kernels::active().all_outside(state.x.data(), count, 1.0)) {
    if (state.t() > cap) {
      throw TimeoutError(fmt::format("no evacuation before the safety cap t = {}", cap));
    }
    discrete_directions(state.x, init.ell, r.alpha, dir);
    if (have_prev) {
      for (std::size_t i = 1; i + 1 < count; ++i) {
        if (dir[i] != prev_dir[i]) {
          r.log.switches.push_back({state.t(), i, dir[i] ? -1 : 1});
        }
      }
    }
    prev_dir = dir;
    have_prev = true;

    discrete_update(state, dir, init.ell, model, vel, next);
    std::swap(state, next);
    ++r.steps;
    const double g = smallest_gap(state.x);
    r.min_gap = std::min(r.min_gap, g);
    if (!(g > 0.0) && !warned_order) {
      warned_order = true;
      r.warnings.push_back(fmt::format("particle order lost at t = {}", state.t()));
    }
    log_exits();
    if (state.h % every == 0) record();
  }
  r.evacuation_time = state.t();
  r.log.evacuation_time = r.evacuation_time;
  if (opts.record_samples && (r.samples.empty() || r.samples.back().t != state.t())) record();
  return r;
}

}  // namespace

DiscreteState step_fully_discrete(const DiscreteState& state, double ell, double alpha,
                                  const VelocityModel& model) {
  std::vector<std::uint8_t> dir(state.x.size());
  discrete_directions(state.x, ell, alpha, dir);
  std::vector<double> vel;
  DiscreteState next;
  discrete_update(state, dir, ell, model, vel, next);
  return next;
}

RunResult run_to_evacuation(const ParticleInit& init, const ModelConfig& config,
                            const RunOptions& opts) {
  if (init.positions.size() < 2) throw std::invalid_argument("need at least two particles");
  return opts.engine == Engine::EventDriven ? run_event(init, config, opts)
                                            : run_discrete(init, config, opts);
}

}  // namespace hughes
