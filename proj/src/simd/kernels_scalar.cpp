#include "nsaudit/simd.hpp"

#include <algorithm>
#include <cmath>

namespace nsaudit::simd {
namespace {

void scale_by_real(cplx* x, const double* f, std::size_t n) {
  auto* d = reinterpret_cast<double*>(x);
  for (std::size_t i = 0; i < n; ++i) {
    d[2 * i] = d[2 * i] * f[i];
    d[2 * i + 1] = d[2 * i + 1] * f[i];
  }
}

void combine(cplx* out, const double* a, const cplx* x, const double* b,
             const cplx* y, std::size_t n) {
  auto* o = reinterpret_cast<double*>(out);
  const auto* xd = reinterpret_cast<const double*>(x);
  const auto* yd = reinterpret_cast<const double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double re = a[i] * xd[2 * i] + b[i] * yd[2 * i];
    const double im = a[i] * xd[2 * i + 1] + b[i] * yd[2 * i + 1];
    o[2 * i] = re;
    o[2 * i + 1] = im;
  }
}

void accumulate_product(double* out, const double* a, const double* b,
                        std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = out[i] + a[i] * b[i];
}

double sum_abs2(const cplx* x, std::size_t n) {
  const auto* d = reinterpret_cast<const double*>(x);
  double s = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) s += d[i] * d[i];
  return s;
}

double max_abs2(const cplx* x, std::size_t n) {
  const auto* d = reinterpret_cast<const double*>(x);
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    m = std::max(m, d[2 * i] * d[2 * i] + d[2 * i + 1] * d[2 * i + 1]);
  return m;
}

double sum_squares(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

double inverse_square_sum(const double* x, const double* y, const double* z, const double* w,
                          std::size_t n, double px, double py, double pz) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - px, dy = y[i] - py, dz = z[i] - pz;
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 > 0.5) s += w[i] / r2;
  }
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{scale_by_real, combine,     accumulate_product,
                                 sum_abs2,      max_abs2,    sum_squares,
                                 inverse_square_sum};
  return table;
}

}  // namespace nsaudit::simd
