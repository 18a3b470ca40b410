#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hughes/model.hpp"

namespace hughes {

/// Piecewise-constant density: values[k] on [breakpoints[k], breakpoints[k+1]),
/// zero outside [breakpoints.front(), breakpoints.back()).
struct DensityProfile {
  std::vector<double> breakpoints;
  std::vector<double> values;

  bool empty() const noexcept { return values.empty(); }
  double mass() const noexcept;
  double eval(double x) const noexcept;
  /// Exact integral over [a, b].
  double mass_between(double a, double b) const noexcept;
};

/// R_{i+1/2} = ell / (x_{i+1} - x_i) on [x_i, x_{i+1}).
DensityProfile density_from_particles(std::span<const double> positions, double ell);

struct Interval {
  double a = 0.0;
  double b = 0.0;
};

/// Sum of |jumps|. Without a window the jumps to and from zero at the support
/// edges count. With a window only discontinuities strictly inside (a, b)
/// count, so a window cutting through the support adds nothing at its edges.
double total_variation(const DensityProfile& profile,
                       std::optional<Interval> window = std::nullopt);

/// Pseudo-inverse X(z) of the cumulative mass, piecewise linear on [0, mass].
/// Vacuum between pieces shows up as a jump of X at the same z.
struct PseudoInverse {
  struct Segment {
    double z0, z1;  // mass range
    double x0, x1;  // X(z0+), X(z1-)
  };
  std::vector<Segment> segments;

  double mass() const noexcept { return segments.empty() ? 0.0 : segments.back().z1; }
  double eval(double z) const noexcept;
};

PseudoInverse pseudo_inverse(const DensityProfile& profile);

/// ||X_a - X_b||_{L1(0, L)}, exact. Throws std::invalid_argument when the
/// masses differ by more than 1e-12 max(1, L).
double wasserstein1(const DensityProfile& a, const DensityProfile& b);

struct MassDrift {
  double drift = 0.0;  // |mass_t(a, b) - mass_s(a, b)|
  double bound = 0.0;  // 6 v_max R_max |t - s|
};

MassDrift windowed_mass_drift(const DensityProfile& at_s, const DensityProfile& at_t, double a,
                              double b, double s, double t, double v_max, double r_max);

/// rho(x) = c0 + c1 x on [a, b); zero outside all pieces.
struct AffinePiece {
  double a = 0.0;
  double b = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
};

struct AffineProfile {
  std::vector<AffinePiece> pieces;

  double eval(double x) const noexcept;
  double mass() const noexcept;
};

/// Entropy solution of rho_t + f(rho)_x = 0 with rho(0, x) = rho_l for x < 0
/// and rho_r for x > 0, sampled on [lo, hi] at time t. Affine law only.
AffineProfile lwr_riemann(const VelocityModel& model, double rho_l, double rho_r, double t,
                          double lo, double hi);

/// Right half (x >= 0) of the LWR solution started from the symmetric block
/// rho0 on [-a, a] when the crowd splits at 0: vacuum, a tail shock at
/// v(rho0) t, the plateau, and the evacuation fan ending at a + v_max t.
/// Valid until the shock meets the fan at a rho_max / (v_max rho0); throws
/// std::domain_error beyond that or for non-affine laws.
AffineProfile lwr_block_reference(const VelocityModel& model, double rho0, double a,
                                  double t);

/// Exact L1 distance on [lo, hi] between a piecewise-constant and a piecewise
/// affine profile.
double l1_distance(const DensityProfile& p, const AffineProfile& q, double lo, double hi);

/// Exact L1 distance on [lo, hi] between two piecewise-constant profiles.
double l1_distance(const DensityProfile& p, const DensityProfile& q, double lo, double hi);

}  // namespace hughes
