#pragma once
// Data-parallel inner loops shared by the spectral, flow and audit code.
//
// Every kernel has a portable scalar reference in kernels_scalar.cpp and an
// AVX2 variant in kernels_avx2.cpp. The variant is picked once per process
// from CPUID; setting NS_SIMD=scalar forces the reference path.
//
// Element-wise kernels are bitwise identical across variants (no FMA
// contraction in either). Reductions are not: the AVX2 variants keep four
// lane-wise partial sums which are folded as ((l0 + l1) + (l2 + l3)) + tail,
// the scalar variant sums left to right. Results are deterministic for a
// fixed variant.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace nsaudit::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  // x[i] *= f[i]
  void (*scale_by_real)(cplx* x, const double* f, std::size_t n);
  // out[i] = a[i] * x[i] + b[i] * y[i]
  void (*combine)(cplx* out, const double* a, const cplx* x, const double* b,
                  const cplx* y, std::size_t n);
  // out[i] += a[i] * b[i]
  void (*accumulate_product)(double* out, const double* a, const double* b,
                             std::size_t n);
  // sum |x[i]|^2
  double (*sum_abs2)(const cplx* x, std::size_t n);
  // max |x[i]|^2
  double (*max_abs2)(const cplx* x, std::size_t n);
  // sum a[i]^2
  double (*sum_squares)(const double* a, std::size_t n);
  // sum w[i] / |r_i - p|² over points with |r_i - p|² > 1/2 (on integer
  // coordinates: every point except p itself).
  double (*inverse_square_sum)(const double* x, const double* y, const double* z,
                               const double* w, std::size_t n, double px, double py, double pz);
};

const KernelTable& scalar_kernels();
// Only valid when the CPU supports AVX2.
const KernelTable& avx2_kernels();
bool cpu_has_avx2();

// Table selected for this process.
const KernelTable& kernels();
Isa active_isa();
std::string_view isa_name(Isa isa);

inline void scale_by_real(std::span<cplx> x, std::span<const double> f) {
  kernels().scale_by_real(x.data(), f.data(), x.size());
}
inline void combine(std::span<cplx> out, std::span<const double> a,
                    std::span<const cplx> x, std::span<const double> b,
                    std::span<const cplx> y) {
  kernels().combine(out.data(), a.data(), x.data(), b.data(), y.data(),
                    out.size());
}
inline void accumulate_product(std::span<double> out, std::span<const double> a,
                               std::span<const double> b) {
  kernels().accumulate_product(out.data(), a.data(), b.data(), out.size());
}
inline double sum_abs2(std::span<const cplx> x) {
  return kernels().sum_abs2(x.data(), x.size());
}
inline double max_abs2(std::span<const cplx> x) {
  return kernels().max_abs2(x.data(), x.size());
}
inline double sum_squares(std::span<const double> a) {
  return kernels().sum_squares(a.data(), a.size());
}
inline double inverse_square_sum(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> z, std::span<const double> w, double px,
                                 double py, double pz) {
  return kernels().inverse_square_sum(x.data(), y.data(), z.data(), w.data(), w.size(), px, py, pz);
}

}  // namespace nsaudit::simd
