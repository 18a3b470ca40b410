#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hughes {

/// Constant density `value` on [a, b).
struct DatumPiece {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
};

/// Piecewise-constant initial density supported in [-1, 1].
///
/// Pieces are stored in canonical form: sorted, disjoint, zero-density pieces
/// dropped, adjacent pieces kept separate even when their values agree.
class InitialDatum {
 public:
  /// Throws std::invalid_argument when the pieces overlap, leave [-1, 1],
  /// are empty/reversed, carry negative or non-finite density, or when the
  /// total mass is zero.
  explicit InitialDatum(std::vector<DatumPiece> pieces);

  const std::vector<DatumPiece>& pieces() const noexcept { return pieces_; }

  /// Total mass L.
  double mass() const noexcept { return mass_; }
  /// Essential supremum R_max.
  double max_density() const noexcept { return max_density_; }
  /// Convex hull of the support.
  double support_min() const noexcept { return pieces_.front().a; }
  double support_max() const noexcept { return pieces_.back().b; }

  /// Throws std::invalid_argument when R_max exceeds rho_max.
  void check_bounded_by(double rho_max) const;

  /// Exact integral of the datum over [a, b]; 0 when a >= b.
  double mass_between(double a, double b) const noexcept;

  /// Leftmost x with cumulative mass (from -inf) equal to `m`, m in [0, L].
  double inverse_cumulative(double m) const;

 private:
  std::vector<DatumPiece> pieces_;
  std::vector<double> cumulative_;  // mass to the left of each piece
  double mass_ = 0.0;
  double max_density_ = 0.0;
};

/// Exact integral of the datum over [a, b].
double datum_mass(const InitialDatum& datum, double a, double b);

/// Equal-mass particle positions x̄_0 < ... < x̄_n with ell = L / n.
struct ParticleInit {
  std::vector<double> positions;
  double ell = 0.0;
  double max_density = 0.0;  // R_max of the datum

  std::size_t gaps() const noexcept { return positions.empty() ? 0 : positions.size() - 1; }
  double mass() const noexcept { return ell * static_cast<double>(gaps()); }
};

/// Splits the support hull into n sub-intervals of equal mass by exact
/// inverse-CDF arithmetic on the piece breakpoints.
///
/// Throws std::invalid_argument for n == 0 or when ell / R_max < 1e-14.
ParticleInit atomize(const InitialDatum& datum, std::size_t n);

/// Builds a ParticleInit from explicit positions; ell given by the caller and
/// R_max recomputed as max ell / gap. Positions must be strictly increasing.
ParticleInit particles_from_positions(std::vector<double> positions, double ell);

}  // namespace hughes
