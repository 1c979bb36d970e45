#include "nsaudit/simd.hpp"

#include <algorithm>
#include <cmath>

#if defined(__x86_64__) || defined(_M_X64)
#define NSAUDIT_X86 1
#include <immintrin.h>
#else
#define NSAUDIT_X86 0
#endif

namespace nsaudit::simd {

#if NSAUDIT_X86
namespace {

#define NSAUDIT_AVX2 __attribute__((target("avx2")))

// [f0, f1] -> [f0, f0, f1, f1]
NSAUDIT_AVX2 inline __m256d duplicate_pairs(const double* f) {
  const __m128d lo = _mm_loadu_pd(f);
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(lo), 0x50);
}

NSAUDIT_AVX2 double fold(__m256d acc) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

NSAUDIT_AVX2 void scale_by_real(cplx* x, const double* f, std::size_t n) {
  auto* d = reinterpret_cast<double*>(x);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(d + 2 * i);
    _mm256_storeu_pd(d + 2 * i, _mm256_mul_pd(v, duplicate_pairs(f + i)));
  }
  for (; i < n; ++i) {
    d[2 * i] = d[2 * i] * f[i];
    d[2 * i + 1] = d[2 * i + 1] * f[i];
  }
}

NSAUDIT_AVX2 void combine(cplx* out, const double* a, const cplx* x,
                          const double* b, const cplx* y, std::size_t n) {
  auto* o = reinterpret_cast<double*>(out);
  const auto* xd = reinterpret_cast<const double*>(x);
  const auto* yd = reinterpret_cast<const double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d ax = _mm256_mul_pd(duplicate_pairs(a + i), _mm256_loadu_pd(xd + 2 * i));
    const __m256d by = _mm256_mul_pd(duplicate_pairs(b + i), _mm256_loadu_pd(yd + 2 * i));
    _mm256_storeu_pd(o + 2 * i, _mm256_add_pd(ax, by));
  }
  for (; i < n; ++i) {
    const double re = a[i] * xd[2 * i] + b[i] * yd[2 * i];
    const double im = a[i] * xd[2 * i + 1] + b[i] * yd[2 * i + 1];
    o[2 * i] = re;
    o[2 * i + 1] = im;
  }
}

NSAUDIT_AVX2 void accumulate_product(double* out, const double* a,
                                     const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), p));
  }
  for (; i < n; ++i) out[i] = out[i] + a[i] * b[i];
}

NSAUDIT_AVX2 double sum_abs2(const cplx* x, std::size_t n) {
  const auto* d = reinterpret_cast<const double*>(x);
  const std::size_t m = 2 * n;
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    const __m256d v = _mm256_loadu_pd(d + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double s = fold(acc);
  for (; i < m; ++i) s += d[i] * d[i];
  return s;
}

NSAUDIT_AVX2 double max_abs2(const cplx* x, std::size_t n) {
  const auto* d = reinterpret_cast<const double*>(x);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v0 = _mm256_loadu_pd(d + 2 * i);
    const __m256d v1 = _mm256_loadu_pd(d + 2 * i + 4);
    // hadd gives [r0²+i0², r2²+i2², r1²+i1², r3²+i3²]
    const __m256d m = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
    best = _mm256_max_pd(best, m);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i)
    r = std::max(r, d[2 * i] * d[2 * i] + d[2 * i + 1] * d[2 * i + 1]);
  return r;
}

NSAUDIT_AVX2 double sum_squares(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(a + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double s = fold(acc);
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

NSAUDIT_AVX2 double inverse_square_sum(const double* x, const double* y, const double* z,
                                       const double* w, std::size_t n, double px, double py,
                                       double pz) {
  const __m256d vx = _mm256_set1_pd(px), vy = _mm256_set1_pd(py), vz = _mm256_set1_pd(pz);
  const __m256d cut = _mm256_set1_pd(0.5);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), vx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), vy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(z + i), vz);
    const __m256d r2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                     _mm256_mul_pd(dz, dz));
    const __m256d mask = _mm256_cmp_pd(r2, cut, _CMP_GT_OQ);
    const __m256d term = _mm256_div_pd(_mm256_loadu_pd(w + i), r2);
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, term));
  }
  double s = fold(acc);
  for (; i < n; ++i) {
    const double dx = x[i] - px, dy = y[i] - py, dz = z[i] - pz;
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 > 0.5) s += w[i] / r2;
  }
  return s;
}

}  // namespace

bool cpu_has_avx2() { return __builtin_cpu_supports("avx2"); }

const KernelTable& avx2_kernels() {
  static const KernelTable table{scale_by_real, combine,     accumulate_product,
                                 sum_abs2,      max_abs2,    sum_squares,
                                 inverse_square_sum};
  return table;
}

#else

bool cpu_has_avx2() { return false; }
const KernelTable& avx2_kernels() { return scalar_kernels(); }

#endif

}  // namespace nsaudit::simd
