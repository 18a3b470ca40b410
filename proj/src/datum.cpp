#include "hughes/datum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "hughes/model.hpp"

namespace hughes {

InitialDatum::InitialDatum(std::vector<DatumPiece> pieces) {
  for (const auto& p : pieces) {
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.value)) {
      throw std::invalid_argument("datum piece has a non-finite field");
    }
    if (!(p.a < p.b)) {
      throw std::invalid_argument(fmt::format("datum piece [{}, {}) is empty", p.a, p.b));
    }
    if (p.a < kCorridorLeft || p.b > kCorridorRight) {
      throw std::invalid_argument(
          fmt::format("datum piece [{}, {}) leaves the corridor [-1, 1]", p.a, p.b));
    }
    if (p.value < 0.0) {
      throw std::invalid_argument(fmt::format("negative density {}", p.value));
    }
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const DatumPiece& l, const DatumPiece& r) { return l.a < r.a; });
  for (std::size_t k = 1; k < pieces.size(); ++k) {
    if (pieces[k].a < pieces[k - 1].b) {
      throw std::invalid_argument(fmt::format("datum pieces [{}, {}) and [{}, {}) overlap",
                                              pieces[k - 1].a, pieces[k - 1].b,
                                              pieces[k].a, pieces[k].b));
    }
  }
  std::erase_if(pieces, [](const DatumPiece& p) { return p.value == 0.0; });
  if (pieces.empty()) throw std::invalid_argument("datum has zero mass");

  pieces_ = std::move(pieces);
  cumulative_.reserve(pieces_.size());
  for (const auto& p : pieces_) {
    cumulative_.push_back(mass_);
    mass_ += p.value * (p.b - p.a);
    max_density_ = std::max(max_density_, p.value);
  }
}

void InitialDatum::check_bounded_by(double rho_max) const {
  if (max_density_ > rho_max) {
    throw std::invalid_argument(
        fmt::format("datum density {} exceeds rho_max {}", max_density_, rho_max));
  }
}

double InitialDatum::mass_between(double a, double b) const noexcept {
  double m = 0.0;
  for (const auto& p : pieces_) {
    const double lo = std::max(a, p.a);
    const double hi = std::min(b, p.b);
    if (hi > lo) m += p.value * (hi - lo);
  }
  return m;
}

double InitialDatum::inverse_cumulative(double m) const {
  if (m < 0.0 || m > mass_) {
    throw std::out_of_range(fmt::format("mass {} outside [0, {}]", m, mass_));
  }
  if (m == 0.0) return support_min();
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& p = pieces_[k];
    const double end = cumulative_[k] + p.value * (p.b - p.a);
    if (m <= end) {
      // Reaching the target exactly at the right edge stays at the edge, so a
      // following vacuum gap is never skipped.
      if (m == end) return p.b;
      return std::min(p.a + (m - cumulative_[k]) / p.value, p.b);
    }
  }
  return support_max();
}

double datum_mass(const InitialDatum& datum, double a, double b) {
  return datum.mass_between(a, b);
}

ParticleInit atomize(const InitialDatum& datum, std::size_t n) {
  if (n == 0) throw std::invalid_argument("atomize needs n >= 1");
  const double L = datum.mass();
  const double ell = L / static_cast<double>(n);
  if (ell / datum.max_density() < 1e-14) {
    throw std::invalid_argument(
        fmt::format("n = {} resolves gaps below 1e-14 (ell / R_max = {})", n,
                    ell / datum.max_density()));
  }

  ParticleInit init;
  init.ell = ell;
  init.max_density = datum.max_density();
  init.positions.resize(n + 1);
  init.positions.front() = datum.support_min();
  init.positions.back() = datum.support_max();
  // Targets i * ell computed directly, not by accumulating ell.
  for (std::size_t i = 1; i < n; ++i) {
    init.positions[i] = datum.inverse_cumulative(ell * static_cast<double>(i));
  }
  for (std::size_t i = 1; i <= n; ++i) {
    if (!(init.positions[i] > init.positions[i - 1])) {
      throw std::runtime_error(fmt::format(
          "atomization produced non-increasing positions at i = {}", i));
    }
  }
  return init;
}

ParticleInit particles_from_positions(std::vector<double> positions, double ell) {
  if (positions.size() < 2) {
    throw std::invalid_argument("need at least two particles");
  }
  if (!(ell > 0.0)) throw std::invalid_argument("ell must be positive");
  ParticleInit init;
  init.ell = ell;
  for (std::size_t i = 1; i < positions.size(); ++i) {
    const double gap = positions[i] - positions[i - 1];
    if (!(gap > 0.0)) {
      throw std::invalid_argument("particle positions must be strictly increasing");
    }
    init.max_density = std::max(init.max_density, ell / gap);
  }
  init.positions = std::move(positions);
  return init;
}

}  // namespace hughes
