#include <cmath>
#include <limits>

#include "hughes/kernels.hpp"

namespace hughes::kernels {

namespace {

inline double speed(double gap, double ell, double v_max, double rho_max) {
  const double rho = ell / gap;
  const double s = rho / rho_max;
  const double w = 1.0 - s;
  const double v = v_max * w;
  return v > 0.0 ? v : 0.0;
}

void ftl_velocities_scalar(const double* x, const std::uint8_t* moves_left,
                           std::size_t count, double ell, double v_max, double rho_max,
                           double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    if (moves_left[i]) {
      out[i] = i == 0 ? -v_max : -speed(x[i] - x[i - 1], ell, v_max, rho_max);
    } else {
      out[i] = i + 1 == count ? v_max : speed(x[i + 1] - x[i], ell, v_max, rho_max);
    }
  }
}

void axpy_scalar(const double* x, const double* v, std::size_t count, double dt,
                 double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    const double d = v[i] * dt;
    out[i] = x[i] + d;
  }
}

double min_gap_scalar(const double* x, std::size_t count) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < count; ++i) {
    const double g = x[i] - x[i - 1];
    m = g < m ? g : m;
  }
  return m;
}

bool all_outside_scalar(const double* x, std::size_t count, double bound) {
  for (std::size_t i = 0; i < count; ++i) {
    if (std::abs(x[i]) < bound) return false;
  }
  return true;
}

}  // namespace

const Table& scalar() {
  static const Table table{ftl_velocities_scalar, axpy_scalar, min_gap_scalar,
                           all_outside_scalar, "scalar"};
  return table;
}

}  // namespace hughes::kernels
