#include "hughes/turning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hughes/model.hpp"

namespace hughes {

namespace {

// Mass of the particle density to the left of x: k ell + partial gap.
double cumulative_mass(std::span<const double> x, double ell, double at) {
  if (x.empty() || at <= x.front()) return 0.0;
  const std::size_t n = x.size() - 1;
  if (at >= x.back()) return ell * static_cast<double>(n);
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const auto k = static_cast<std::size_t>(it - x.begin()) - 1;
  return ell * static_cast<double>(k) + ell * (at - x[k]) / (x[k + 1] - x[k]);
}

double interpolate(std::span<const double> nodes, std::span<const double> values,
                   double x) {
  x = std::clamp(x, nodes.front(), nodes.back());
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  if (it == nodes.end()) return values.back();
  const auto k = static_cast<std::size_t>(it - nodes.begin());
  if (k == 0) return values.front();
  const double w = (x - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
  return values[k - 1] + w * (values[k] - values[k - 1]);
}

}  // namespace

CorridorWindow corridor_window(std::span<const double> positions) {
  CorridorWindow w;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (kCorridorLeft < positions[i] && positions[i] < kCorridorRight) {
      if (!w.first) w.first = i;
      w.last = i;
    }
  }
  return w;
}

CorridorWindow corridor_window(std::span<const std::uint8_t> inside) {
  CorridorWindow w;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    if (inside[i] != 0) {
      if (w.first && *w.last + 1 != i) {
        throw std::logic_error("in-corridor particles are not contiguous");
      }
      if (!w.first) w.first = i;
      w.last = i;
    }
  }
  return w;
}

double CostProfile::eval_to_left(double x) const noexcept {
  return interpolate(nodes, to_left, x);
}

double CostProfile::eval_to_right(double x) const noexcept {
  return interpolate(nodes, to_right, x);
}

CostProfile build_cost_profile(std::span<const double> positions, double ell,
                               double alpha, std::optional<CorridorWindow> window) {
  CostProfile p;
  p.window = window ? *window : corridor_window(positions);
  const auto& w = p.window;

  if (w.empty() || alpha == 0.0) {
    // Both maps are the affine "otherwise" branches: x + 1 and 1 - x.
    p.nodes = {kCorridorLeft, kCorridorRight};
    p.to_left = {0.0, 2.0};
    p.to_right = {2.0, 0.0};
    p.balance = {-2.0, 2.0};
    return p;
  }

  const std::size_t first = *w.first;
  const std::size_t last = *w.last;
  const double inside_mass = ell * static_cast<double>(last - first);
  // Mass between the doors and the outermost in-corridor particles.
  const double left_rim = cumulative_mass(positions, ell, positions[first]) -
                          cumulative_mass(positions, ell, kCorridorLeft);
  const double right_rim = cumulative_mass(positions, ell, kCorridorRight) -
                           cumulative_mass(positions, ell, positions[last]);

  const std::size_t count = last - first + 3;
  p.nodes.reserve(count);
  p.to_left.reserve(count);
  p.to_right.reserve(count);
  p.balance.reserve(count);

  p.nodes.push_back(kCorridorLeft);
  p.to_left.push_back(0.0);
  p.to_right.push_back(2.0 + alpha * (inside_mass + left_rim));
  p.balance.push_back(-p.to_right.back());
  for (std::size_t i = first; i <= last; ++i) {
    const double x = positions[i];
    p.nodes.push_back(x);
    p.to_left.push_back(x + 1.0 + alpha * ell * static_cast<double>(i - first));
    p.to_right.push_back(1.0 - x + alpha * ell * static_cast<double>(last - i));
    // Gap counts on either side differ by an integer; keeping it exact makes
    // mirror-symmetric configurations balance at exactly 0.
    const auto skew = static_cast<double>(2 * static_cast<std::ptrdiff_t>(i) -
                                          static_cast<std::ptrdiff_t>(first) -
                                          static_cast<std::ptrdiff_t>(last));
    p.balance.push_back(2.0 * x + alpha * ell * skew);
  }
  p.nodes.push_back(kCorridorRight);
  p.to_left.push_back(2.0 + alpha * (inside_mass + right_rim));
  p.to_right.push_back(0.0);
  p.balance.push_back(p.to_left.back());
  return p;
}

double piecewise_linear_root(std::span<const double> nodes, std::span<const double> diff) {
  if (nodes.size() != diff.size() || nodes.size() < 2) {
    throw std::invalid_argument("piecewise_linear_root: malformed input");
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (diff[k] == 0.0) return nodes[k];
    if (diff[k] > 0.0) {
      if (k == 0) break;
      const double d0 = diff[k - 1];
      const double d1 = diff[k];
      const double t = -d0 / (d1 - d0);
      return nodes[k - 1] + t * (nodes[k] - nodes[k - 1]);
    }
  }
  throw std::domain_error("piecewise_linear_root: no sign change");
}

double solve_zeta(const CostProfile& profile) {
  return piecewise_linear_root(profile.nodes, profile.balance);
}

std::size_t split_count(std::span<const double> positions, double zeta) {
  std::size_t count = 0;
  for (double x : positions) {
    if (x < zeta) ++count;
  }
  return count;
}

double solve_xi(std::span<const double> positions, double ell, double alpha) {
  std::vector<double> nodes{kCorridorLeft};
  for (double x : positions) {
    if (kCorridorLeft < x && x < kCorridorRight) nodes.push_back(x);
  }
  nodes.push_back(kCorridorRight);

  const double at_left_door = cumulative_mass(positions, ell, kCorridorLeft);
  const double at_right_door = cumulative_mass(positions, ell, kCorridorRight);
  std::vector<double> diff(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double x = nodes[k];
    const double left_mass = cumulative_mass(positions, ell, x) - at_left_door;
    const double right_mass = at_right_door - cumulative_mass(positions, ell, x);
    diff[k] = (x + 1.0 + alpha * left_mass) - (1.0 - x + alpha * right_mass);
  }
  return piecewise_linear_root(nodes, diff);
}

namespace {

// ∫_{-1}^{upto} rho / ell in the counting form: particles in [-1, upto) minus
// one, plus the fractions of the gap holding `upto` and of the gap straddling
// the left door.
double counted_gaps(std::span<const double> x, double upto) {
  const std::size_t n = x.size() - 1;
  std::size_t in_range = 0;  // #{ -1 <= x_i < upto }
  std::size_t below = 0;     // #{ x_i < upto }
  std::size_t beyond = 0;    // #{ x_i < -1 }
  for (double xi : x) {
    if (kCorridorLeft <= xi && xi < upto) ++in_range;
    if (xi < upto) ++below;
    if (xi < kCorridorLeft) ++beyond;
  }
  if (in_range == 0 && (beyond == 0 || beyond == n + 1)) return 0.0;

  double total = static_cast<double>(in_range) - 1.0;
  if (below >= 1 && below <= n) {
    const double lo = x[below - 1];
    const double hi = x[below];
    total += (upto - lo) / (hi - lo);
  }
  if (beyond >= 1 && beyond <= n) {
    const double lo = x[beyond - 1];
    const double hi = x[beyond];
    total += (hi + 1.0) / (hi - lo);
  }
  return total;
}

}  // namespace

double solve_xi_discrete(std::span<const double> positions, double ell, double alpha) {
  if (positions.size() < 2) throw std::invalid_argument("need at least two particles");
  const double rhs = 0.5 * alpha * counted_gaps(positions, kCorridorRight);
  auto residual = [&](double xi) {
    return xi / ell + alpha * counted_gaps(positions, xi) - rhs;
  };
  double lo = kCorridorLeft;
  double hi = kCorridorRight;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TurningState turning_state(std::span<const double> positions, double ell, double alpha,
                           std::optional<CorridorWindow> window) {
  TurningState s;
  const auto profile = build_cost_profile(positions, ell, alpha, window);
  s.window = profile.window;
  s.zeta = solve_zeta(profile);
  s.xi = solve_xi(positions, ell, alpha);
  s.left_count = split_count(positions, s.zeta);
  return s;
}

}  // namespace hughes
