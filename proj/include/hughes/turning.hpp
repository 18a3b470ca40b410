#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hughes {

/// Contiguous index range [first, last] of particles strictly inside (-1, 1).
/// Empty when no particle is inside.
struct CorridorWindow {
  std::optional<std::size_t> first;  // I_-
  std::optional<std::size_t> last;   // I_+

  bool empty() const noexcept { return !first.has_value(); }
  std::size_t count() const noexcept { return empty() ? 0 : *last - *first + 1; }
};

/// Window from open comparisons -1 < x_i < 1 on ordered positions.
CorridorWindow corridor_window(std::span<const double> positions);

/// Window from explicit inside flags (event engine bookkeeping).
/// The flagged particles must be contiguous.
CorridorWindow corridor_window(std::span<const std::uint8_t> inside);

/// The piecewise-linear cost-to-exit maps on [-1, 1]. Nodes are -1, the
/// in-corridor particles, and 1; both maps are linear between nodes.
struct CostProfile {
  std::vector<double> nodes;
  std::vector<double> to_left;   // Z_- at nodes
  std::vector<double> to_right;  // Z_+ at nodes
  std::vector<double> balance;   // Z_- - Z_+ at nodes
  CorridorWindow window;

  /// Linear interpolation; x is clamped to [-1, 1].
  double eval_to_left(double x) const noexcept;
  double eval_to_right(double x) const noexcept;
};

/// Z_-(x) = x + 1 + alpha * mass(x_{I_-}, x) for x > x_{I_-}, x + 1 otherwise;
/// Z_+ symmetric. Only particles in `window` enter the cost; exited particles
/// are invisible. `window` defaults to corridor_window(positions).
CostProfile build_cost_profile(std::span<const double> positions, double ell,
                               double alpha,
                               std::optional<CorridorWindow> window = std::nullopt);

/// Turning point and the induced left/right split.
struct TurningState {
  double zeta = 0.0;
  double xi = 0.0;
  CorridorWindow window;
  /// Number of particles with x_i < zeta; they move left, the rest move right.
  /// The split index I_0 of x_{I_0} < zeta <= x_{I_0 + 1} is left_count - 1.
  std::size_t left_count = 0;
};

/// Exact root of Z_- - Z_+ by node scan and one linear solve.
double solve_zeta(const CostProfile& profile);

/// Number of particles strictly left of `zeta`.
std::size_t split_count(std::span<const double> positions, double zeta);

/// Root of Xi_- = Xi_+, where the cost integrals run over the whole corridor
/// including mass of gaps straddling the doors. Exact like solve_zeta.
double solve_xi(std::span<const double> positions, double ell, double alpha);

/// The counting-form equation for xi used for plotting: cardinalities of
/// particles left of xi plus fractional corrections for the gaps containing
/// xi and the left door, solved by bisection to 1e-14.
double solve_xi_discrete(std::span<const double> positions, double ell, double alpha);

/// zeta, xi and the split for one snapshot.
TurningState turning_state(std::span<const double> positions, double ell, double alpha,
                           std::optional<CorridorWindow> window = std::nullopt);

/// Root of the strictly increasing piecewise-linear function with values
/// `diff` at strictly increasing `nodes`; requires diff.front() < 0 < diff.back()
/// (or an exact zero at a node).
double piecewise_linear_root(std::span<const double> nodes, std::span<const double> diff);

}  // namespace hughes
