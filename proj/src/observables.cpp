#include "hughes/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace hughes {

namespace {

// Integral over an interval of width w of |d| where d is linear from d0 to d1.
double abs_linear_integral(double d0, double d1, double w) {
  if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0)) {
    return 0.5 * (std::abs(d0) + std::abs(d1)) * w;
  }
  const double s = std::abs(d0) + std::abs(d1);
  return 0.5 * w * (d0 * d0 + d1 * d1) / s;
}

}  // namespace

double DensityProfile::mass() const noexcept {
  double m = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    m += values[k] * (breakpoints[k + 1] - breakpoints[k]);
  }
  return m;
}

double DensityProfile::eval(double x) const noexcept {
  if (values.empty() || x < breakpoints.front() || x >= breakpoints.back()) return 0.0;
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

double DensityProfile::mass_between(double a, double b) const noexcept {
  double m = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double lo = std::max(a, breakpoints[k]);
    const double hi = std::min(b, breakpoints[k + 1]);
    if (hi > lo) m += values[k] * (hi - lo);
  }
  return m;
}

DensityProfile density_from_particles(std::span<const double> positions, double ell) {
  DensityProfile p;
  if (positions.size() < 2) return p;
  p.breakpoints.assign(positions.begin(), positions.end());
  p.values.resize(positions.size() - 1);
  for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
    p.values[i] = ell / (positions[i + 1] - positions[i]);
  }
  return p;
}

double total_variation(const DensityProfile& profile, std::optional<Interval> window) {
  if (profile.empty()) return 0.0;
  const auto& x = profile.breakpoints;
  const auto& v = profile.values;
  const std::size_t m = x.size();
  double tv = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (window && !(window->a < x[k] && x[k] < window->b)) continue;
    const double left = k == 0 ? 0.0 : v[k - 1];
    const double right = k + 1 == m ? 0.0 : v[k];
    tv += std::abs(right - left);
  }
  return tv;
}

PseudoInverse pseudo_inverse(const DensityProfile& profile) {
  PseudoInverse X;
  double z = 0.0;
  for (std::size_t k = 0; k < profile.values.size(); ++k) {
    const double w = profile.breakpoints[k + 1] - profile.breakpoints[k];
    const double dm = profile.values[k] * w;
    if (!(dm > 0.0)) continue;
    X.segments.push_back({z, z + dm, profile.breakpoints[k], profile.breakpoints[k + 1]});
    z += dm;
  }
  return X;
}

double PseudoInverse::eval(double z) const noexcept {
  if (segments.empty()) return 0.0;
  z = std::clamp(z, 0.0, mass());
  for (const auto& s : segments) {
    if (z <= s.z1) {
      const double w = s.z1 - s.z0;
      return s.x0 + (z - s.z0) / w * (s.x1 - s.x0);
    }
  }
  return segments.back().x1;
}

double wasserstein1(const DensityProfile& a, const DensityProfile& b) {
  const double ma = a.mass();
  const double mb = b.mass();
  if (std::abs(ma - mb) > 1e-12 * std::max(1.0, std::max(ma, mb))) {
    throw std::invalid_argument(
        fmt::format("wasserstein1 needs equal masses, got {} and {}", ma, mb));
  }
  const PseudoInverse Xa = pseudo_inverse(a);
  const PseudoInverse Xb = pseudo_inverse(b);
  if (Xa.segments.empty() || Xb.segments.empty()) return 0.0;

  // Sweep both segment lists over common z cells. The last cell of each list
  // is stretched to the larger mass to absorb rounding.
  const double total = std::max(ma, mb);
  auto value = [](const PseudoInverse::Segment& s, double z) {
    const double w = s.z1 - s.z0;
    return s.x0 + (z - s.z0) / w * (s.x1 - s.x0);
  };
  double dist = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  double z = 0.0;
  while (i < Xa.segments.size() && j < Xb.segments.size()) {
    const auto& sa = Xa.segments[i];
    const auto& sb = Xb.segments[j];
    const bool last_a = i + 1 == Xa.segments.size();
    const bool last_b = j + 1 == Xb.segments.size();
    const double end_a = last_a ? total : sa.z1;
    const double end_b = last_b ? total : sb.z1;
    const double z1 = std::min(end_a, end_b);
    if (z1 > z) {
      const double d0 = value(sa, z) - value(sb, z);
      const double d1 = value(sa, z1) - value(sb, z1);
      dist += abs_linear_integral(d0, d1, z1 - z);
    }
    z = z1;
    if (end_a <= z1 && !last_a) ++i;
    if (end_b <= z1 && !last_b) ++j;
    if (z1 >= total) break;
  }
  return dist;
}

MassDrift windowed_mass_drift(const DensityProfile& at_s, const DensityProfile& at_t, double a,
                              double b, double s, double t, double v_max, double r_max) {
  MassDrift d;
  d.drift = std::abs(at_t.mass_between(a, b) - at_s.mass_between(a, b));
  d.bound = 6.0 * v_max * r_max * std::abs(t - s);
  return d;
}

double AffineProfile::eval(double x) const noexcept {
  for (const auto& p : pieces) {
    if (p.a <= x && x < p.b) return p.c0 + p.c1 * x;
  }
  return 0.0;
}

double AffineProfile::mass() const noexcept {
  double m = 0.0;
  for (const auto& p : pieces) {
    m += p.c0 * (p.b - p.a) + 0.5 * p.c1 * (p.b * p.b - p.a * p.a);
  }
  return m;
}

namespace {

void require_affine(const VelocityModel& model) {
  if (!model.is_affine()) {
    throw std::domain_error("the LWR reference supports the affine velocity law only");
  }
}

void push_constant(AffineProfile& prof, double a, double b, double rho) {
  if (b > a) prof.pieces.push_back({a, b, rho, 0.0});
}

// rho_max / 2 (1 - (x - origin) / (v_max t)) on [a, b).
void push_fan(AffineProfile& prof, const VelocityModel& model, double origin, double t,
              double a, double b) {
  if (!(b > a)) return;
  const double half = 0.5 * model.rho_max();
  const double slope = -half / (model.v_max() * t);
  prof.pieces.push_back({a, b, half - slope * origin, slope});
}

}  // namespace

AffineProfile lwr_riemann(const VelocityModel& model, double rho_l, double rho_r, double t,
                          double lo, double hi) {
  require_affine(model);
  if (!(t >= 0.0)) throw std::invalid_argument("lwr_riemann needs t >= 0");
  AffineProfile prof;
  auto fprime = [&](double rho) { return model.v_max() * (1.0 - 2.0 * rho / model.rho_max()); };

  if (rho_l == rho_r || t == 0.0) {
    push_constant(prof, lo, std::clamp(0.0, lo, hi), rho_l);
    push_constant(prof, std::clamp(0.0, lo, hi), hi, rho_r);
  } else if (rho_l < rho_r) {
    const double speed = (model.flux(rho_r) - model.flux(rho_l)) / (rho_r - rho_l);
    const double xs = std::clamp(speed * t, lo, hi);
    push_constant(prof, lo, xs, rho_l);
    push_constant(prof, xs, hi, rho_r);
  } else {
    const double head = std::clamp(fprime(rho_l) * t, lo, hi);
    const double tail = std::clamp(fprime(rho_r) * t, lo, hi);
    push_constant(prof, lo, head, rho_l);
    push_fan(prof, model, 0.0, t, head, tail);
    push_constant(prof, tail, hi, rho_r);
  }
  std::erase_if(prof.pieces, [](const AffinePiece& p) { return p.c0 == 0.0 && p.c1 == 0.0; });
  return prof;
}

AffineProfile lwr_block_reference(const VelocityModel& model, double rho0, double a,
                                  double t) {
  require_affine(model);
  if (!(rho0 > 0.0 && rho0 <= model.rho_max()) || !(a > 0.0) || !(t >= 0.0)) {
    throw std::invalid_argument("lwr_block_reference: bad arguments");
  }
  const double v_max = model.v_max();
  const double t_meet = a * model.rho_max() / (v_max * rho0);
  if (t > t_meet) {
    throw std::domain_error(
        fmt::format("t = {} is past the shock/fan interaction time {}", t, t_meet));
  }
  AffineProfile prof;
  if (t == 0.0) {
    push_constant(prof, 0.0, a, rho0);
    return prof;
  }
  const double shock = model.eval_v(rho0) * t;
  const double fan_tail = a + v_max * (1.0 - 2.0 * rho0 / model.rho_max()) * t;
  const double front = a + v_max * t;
  push_constant(prof, shock, fan_tail, rho0);
  push_fan(prof, model, a, t, fan_tail, front);
  return prof;
}

namespace {

// Both profiles evaluated on the merged breakpoint grid; on each cell the
// difference is affine.
template <class Q>
double merged_l1(const DensityProfile& p, const std::vector<double>& q_breaks, Q&& q_eval,
                 double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> grid{lo, hi};
  for (double x : p.breakpoints) {
    if (lo < x && x < hi) grid.push_back(x);
  }
  for (double x : q_breaks) {
    if (lo < x && x < hi) grid.push_back(x);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double a = grid[k];
    const double b = grid[k + 1];
    const double mid = 0.5 * (a + b);
    // p is constant on the cell; q is affine, read its one-sided limits
    // from the cell midpoint piece.
    const double pv = p.eval(mid);
    const auto [q0, q1] = q_eval(mid, a, b);
    total += abs_linear_integral(pv - q0, pv - q1, b - a);
  }
  return total;
}

}  // namespace

double l1_distance(const DensityProfile& p, const AffineProfile& q, double lo, double hi) {
  std::vector<double> breaks;
  for (const auto& piece : q.pieces) {
    breaks.push_back(piece.a);
    breaks.push_back(piece.b);
  }
  auto q_eval = [&](double mid, double a, double b) -> std::pair<double, double> {
    for (const auto& piece : q.pieces) {
      if (piece.a <= mid && mid < piece.b) {
        return {piece.c0 + piece.c1 * a, piece.c0 + piece.c1 * b};
      }
    }
    return {0.0, 0.0};
  };
  return merged_l1(p, breaks, q_eval, lo, hi);
}

double l1_distance(const DensityProfile& p, const DensityProfile& q, double lo, double hi) {
  auto q_eval = [&](double mid, double, double) -> std::pair<double, double> {
    const double v = q.eval(mid);
    return {v, v};
  };
  return merged_l1(p, q.breakpoints, q_eval, lo, hi);
}

}  // namespace hughes
