#pragma once

// Slow, independent reference implementations used only by the tests. None of
// them call into the library's solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

// rho^n integrated over [a, b] by summing gap overlaps.
inline double particle_mass(const std::vector<double>& x, double ell, double a, double b) {
  if (b <= a) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double lo = std::max(a, x[i]);
    const double hi = std::min(b, x[i + 1]);
    if (hi > lo) m += ell / (x[i + 1] - x[i]) * (hi - lo);
  }
  return m;
}

struct Window {
  bool empty = true;
  std::size_t first = 0, last = 0;
};

// I_- : x_{I-1} <= -1 < x_I ; I_+ : x_I < 1 <= x_{I+1}, restricted to the
// particles flagged inside when flags are given.
inline Window window_of(const std::vector<double>& x, const std::vector<int>* inside = nullptr) {
  Window w;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool in = inside ? (*inside)[i] != 0 : (-1.0 < x[i] && x[i] < 1.0);
    if (!in) continue;
    if (w.empty) w.first = i;
    w.empty = false;
    w.last = i;
  }
  return w;
}

inline double z_minus(const std::vector<double>& x, double ell, double alpha, const Window& w,
                      double at) {
  if (!w.empty && x[w.first] < at) return at + 1.0 + alpha * particle_mass(x, ell, x[w.first], at);
  return at + 1.0;
}

inline double z_plus(const std::vector<double>& x, double ell, double alpha, const Window& w,
                     double at) {
  if (!w.empty && at < x[w.last]) return 1.0 - at + alpha * particle_mass(x, ell, at, x[w.last]);
  return 1.0 - at;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-14) {
  double flo = f(lo);
  for (int it = 0; it < 300 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double zeta(const std::vector<double>& x, double ell, double alpha,
                   const std::vector<int>* inside = nullptr) {
  const Window w = window_of(x, inside);
  return bisect([&](double s) { return z_minus(x, ell, alpha, w, s) - z_plus(x, ell, alpha, w, s); },
                -1.0, 1.0);
}

// Classical xi: whole-corridor integrals of rho^n.
inline double xi(const std::vector<double>& x, double ell, double alpha) {
  return bisect(
      [&](double s) {
        const double left = s + 1.0 + alpha * particle_mass(x, ell, -1.0, s);
        const double right = 1.0 - s + alpha * particle_mass(x, ell, s, 1.0);
        return left - right;
      },
      -1.0, 1.0);
}

// Direction counts of the explicit scheme by brute force.
inline bool discrete_moves_left(const std::vector<double>& x, std::size_t i, double ell,
                                double alpha) {
  if (i == 0) return true;
  if (i + 1 == x.size()) return false;
  long right = 0, left = 0;
  for (double xj : x) {
    if (x[i] < xj && xj < 1.0) ++right;
    if (-1.0 < xj && xj < x[i]) ++left;
  }
  if (alpha == 0.0) return x[i] < 0.0;
  return 2.0 / (alpha * ell) * x[i] < static_cast<double>(right - left);
}

inline double v_affine(double rho, double v_max, double rho_max) {
  return std::max(0.0, v_max * (1.0 - rho / rho_max));
}

// Explicit Euler with a tiny step on the follow-the-leader system, directions
// from the bisection zeta; exited particles drop out of the cost.
struct FineRun {
  std::vector<double> exit_time;
  double evacuation = 0.0;
};

inline FineRun fine_step(std::vector<double> x, double ell, double alpha, double v_max,
                         double rho_max, double dt, double t_max) {
  const std::size_t m = x.size();
  FineRun r;
  r.exit_time.assign(m, -1.0);
  std::vector<int> inside(m, 1);
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(x[i]) >= 1.0) {
      inside[i] = 0;
      r.exit_time[i] = 0.0;
    }
  }
  std::vector<double> v(m);
  double z = zeta(x, ell, alpha, &inside);
  double t = 0.0;
  while (t < t_max) {
    if (std::none_of(inside.begin(), inside.end(), [](int f) { return f != 0; })) break;
    for (std::size_t i = 0; i < m; ++i) {
      if (x[i] < z) {
        v[i] = i == 0 ? -v_max : -v_affine(ell / (x[i] - x[i - 1]), v_max, rho_max);
      } else {
        v[i] = i + 1 == m ? v_max : v_affine(ell / (x[i + 1] - x[i]), v_max, rho_max);
      }
    }
    for (std::size_t i = 0; i < m; ++i) x[i] += v[i] * dt;
    t += dt;
    bool changed = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (inside[i] && std::abs(x[i]) >= 1.0) {
        inside[i] = 0;
        // Linear interpolation inside the last step.
        const double over = (std::abs(x[i]) - 1.0) / std::abs(v[i]);
        r.exit_time[i] = t - over;
        r.evacuation = std::max(r.evacuation, r.exit_time[i]);
        changed = true;
      }
    }
    if (changed) z = zeta(x, ell, alpha, &inside);
  }
  return r;
}

// Quantile function of a piecewise-constant profile by bisection on its CDF.
inline double quantile(const std::vector<double>& bp, const std::vector<double>& val, double z) {
  auto cdf = [&](double s) {
    double m = 0.0;
    for (std::size_t k = 0; k < val.size(); ++k) {
      const double hi = std::min(s, bp[k + 1]);
      if (hi > bp[k]) m += val[k] * (hi - bp[k]);
    }
    return m;
  };
  double lo = bp.front(), hi = bp.back();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < z) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// W1 as the L1 distance of quantile functions, midpoint rule.
inline double wasserstein1(const std::vector<double>& bp_a, const std::vector<double>& val_a,
                           const std::vector<double>& bp_b, const std::vector<double>& val_b,
                           double mass, std::size_t samples) {
  double acc = 0.0;
  const double dz = mass / static_cast<double>(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double z = (static_cast<double>(k) + 0.5) * dz;
    acc += std::abs(quantile(bp_a, val_a, z) - quantile(bp_b, val_b, z));
  }
  return acc * dz;
}

// Godunov finite volumes for rho_t + f(rho)_x = 0 with the affine flux.
inline std::vector<double> godunov(std::vector<double> rho, double dx, double t_end, double v_max,
                                   double rho_max) {
  auto f = [&](double r) { return r * v_max * (1.0 - r / rho_max); };
  const double rc = 0.5 * rho_max;
  auto flux = [&](double l, double r) {
    // Demand/supply form of the Godunov flux for concave f.
    const double demand = l < rc ? f(l) : f(rc);
    const double supply = r > rc ? f(r) : f(rc);
    return std::min(demand, supply);
  };
  const double dt = 0.45 * dx / v_max;
  const std::size_t m = rho.size();
  std::vector<double> next(m), fl(m + 1);
  double t = 0.0;
  while (t < t_end) {
    const double h = std::min(dt, t_end - t);
    fl[0] = flux(0.0, rho[0]);
    fl[m] = flux(rho[m - 1], 0.0);
    for (std::size_t i = 1; i < m; ++i) fl[i] = flux(rho[i - 1], rho[i]);
    for (std::size_t i = 0; i < m; ++i) next[i] = rho[i] - h / dx * (fl[i + 1] - fl[i]);
    rho.swap(next);
    t += h;
  }
  return rho;
}

// Random strictly increasing positions in [lo, hi] with gaps of at least min_gap.
inline std::vector<double> random_positions(std::mt19937_64& rng, std::size_t count, double lo,
                                            double hi, double min_gap) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(count + 1);
  double sum = 0.0;
  for (auto& v : w) {
    v = u(rng) + 0.05;
    sum += v;
  }
  const double span = (hi - lo) - min_gap * static_cast<double>(count - 1);
  std::vector<double> x(count);
  double pos = lo + span * w[0] / sum;
  for (std::size_t i = 0; i < count; ++i) {
    x[i] = pos;
    pos += min_gap + span * w[i + 1] / sum;
  }
  return x;
}

}  // namespace oracle
