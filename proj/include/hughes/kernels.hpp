#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace hughes::kernels {

// Follow-the-leader velocities for the affine law. Particle i uses the gap to
// x[i-1] when moves_left[i] != 0 and to x[i+1] otherwise; missing neighbours
// (the two ends) give v_max. Result is signed: negative for left movers.
// Speeds are v_max * max(1 - (ell / gap) / rho_max, 0).
using FtlVelocityFn = void (*)(const double* x, const std::uint8_t* moves_left,
                               std::size_t count, double ell, double v_max,
                               double rho_max, double* out);
// out[i] = x[i] + v[i] * dt, no fused multiply-add.
using AxpyFn = void (*)(const double* x, const double* v, std::size_t count, double dt,
                        double* out);
// Smallest x[i+1] - x[i]; +inf for fewer than two entries.
using MinGapFn = double (*)(const double* x, std::size_t count);
// True when every |x[i]| >= bound.
using AllOutsideFn = bool (*)(const double* x, std::size_t count, double bound);

struct Table {
  FtlVelocityFn ftl_velocities;
  AxpyFn axpy;
  MinGapFn min_gap;
  AllOutsideFn all_outside;
  std::string_view name;
};

const Table& scalar();
// nullptr when the build or the CPU lacks AVX2.
const Table* avx2();
// AVX2 when available, scalar otherwise; HUGHES_KERNELS=scalar forces scalar.
const Table& active();

inline void ftl_velocities(std::span<const double> x, std::span<const std::uint8_t> moves_left,
                           double ell, double v_max, double rho_max, std::span<double> out) {
  active().ftl_velocities(x.data(), moves_left.data(), x.size(), ell, v_max, rho_max,
                          out.data());
}

inline void axpy(std::span<const double> x, std::span<const double> v, double dt,
                 std::span<double> out) {
  active().axpy(x.data(), v.data(), x.size(), dt, out.data());
}

inline double min_gap(std::span<const double> x) {
  return active().min_gap(x.data(), x.size());
}

inline bool all_outside(std::span<const double> x, double bound) {
  return active().all_outside(x.data(), x.size(), bound);
}

}  // namespace hughes::kernels
