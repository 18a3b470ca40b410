#include <immintrin.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "hughes/kernels.hpp"

// Built with -mavx2 only. Every lane does the same sequence of IEEE
// operations as the scalar path, so results are bit-identical.

namespace hughes::kernels {

namespace {

inline double speed(double gap, double ell, double v_max, double rho_max) {
  const double rho = ell / gap;
  const double s = rho / rho_max;
  const double w = 1.0 - s;
  const double v = v_max * w;
  return v > 0.0 ? v : 0.0;
}

void ftl_velocities_avx2(const double* x, const std::uint8_t* moves_left, std::size_t count,
                         double ell, double v_max, double rho_max, double* out) {
  if (count < 3) {
    scalar().ftl_velocities(x, moves_left, count, ell, v_max, rho_max, out);
    return;
  }
  const __m256d vell = _mm256_set1_pd(ell);
  const __m256d vrho = _mm256_set1_pd(rho_max);
  const __m256d vmax = _mm256_set1_pd(v_max);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sign = _mm256_set1_pd(-0.0);

  // Particle 0 and count-1 may lack a neighbour; handle them in scalar.
  auto edge = [&](std::size_t i) {
    if (moves_left[i]) {
      out[i] = i == 0 ? -v_max : -speed(x[i] - x[i - 1], ell, v_max, rho_max);
    } else {
      out[i] = i + 1 == count ? v_max : speed(x[i + 1] - x[i], ell, v_max, rho_max);
    }
  };
  edge(0);

  std::size_t i = 1;
  for (; i + 4 < count; i += 4) {
    const __m256d xc = _mm256_loadu_pd(x + i);
    const __m256d xl = _mm256_loadu_pd(x + i - 1);
    const __m256d xr = _mm256_loadu_pd(x + i + 1);
    int packed = 0;
    std::memcpy(&packed, moves_left + i, 4);
    const __m128i m8 = _mm_cvtsi32_si128(packed);
    const __m256i m64 = _mm256_cvtepu8_epi64(m8);
    const __m256d left = _mm256_castsi256_pd(
        _mm256_cmpgt_epi64(m64, _mm256_setzero_si256()));

    const __m256d gap_left = _mm256_sub_pd(xc, xl);
    const __m256d gap_right = _mm256_sub_pd(xr, xc);
    const __m256d gap = _mm256_blendv_pd(gap_right, gap_left, left);
    const __m256d rho = _mm256_div_pd(vell, gap);
    const __m256d s = _mm256_div_pd(rho, vrho);
    const __m256d w = _mm256_sub_pd(one, s);
    __m256d v = _mm256_mul_pd(vmax, w);
    v = _mm256_max_pd(v, zero);
    v = _mm256_xor_pd(v, _mm256_and_pd(left, sign));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < count; ++i) edge(i);
}

void axpy_avx2(const double* x, const double* v, std::size_t count, double dt, double* out) {
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d d = _mm256_mul_pd(_mm256_loadu_pd(v + i), vdt);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(x + i), d));
  }
  for (; i < count; ++i) {
    const double d = v[i] * dt;
    out[i] = x[i] + d;
  }
}

double min_gap_avx2(const double* x, std::size_t count) {
  double m = std::numeric_limits<double>::infinity();
  if (count < 2) return m;
  std::size_t i = 1;
  if (count >= 5) {
    __m256d acc = _mm256_set1_pd(m);
    for (; i + 4 <= count; i += 4) {
      const __m256d g = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(x + i - 1));
      acc = _mm256_min_pd(g, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    for (double l : lanes) m = l < m ? l : m;
  }
  for (; i < count; ++i) {
    const double g = x[i] - x[i - 1];
    m = g < m ? g : m;
  }
  return m;
}

bool all_outside_avx2(const double* x, std::size_t count, double bound) {
  const __m256d vb = _mm256_set1_pd(bound);
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d a = _mm256_and_pd(_mm256_loadu_pd(x + i), absmask);
    if (_mm256_movemask_pd(_mm256_cmp_pd(a, vb, _CMP_LT_OQ)) != 0) return false;
  }
  for (; i < count; ++i) {
    if (std::abs(x[i]) < bound) return false;
  }
  return true;
}

}  // namespace

const Table* avx2_table() {
  static const Table table{ftl_velocities_avx2, axpy_avx2, min_gap_avx2, all_outside_avx2,
                           "avx2"};
  return &table;
}

}  // namespace hughes::kernels
