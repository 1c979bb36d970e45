#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "nsaudit/simd.hpp"

using nsaudit::simd::cplx;
namespace simd = nsaudit::simd;

namespace {

struct Data {
  std::vector<cplx> x, y;
  std::vector<double> a, b;
};

Data make_inputs(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Data out;
  for (std::size_t i = 0; i < n; ++i) {
    out.x.emplace_back(d(rng), d(rng));
    out.y.emplace_back(d(rng), d(rng));
    out.a.push_back(d(rng));
    out.b.push_back(d(rng));
  }
  return out;
}

bool bitwise_equal(const void* p, const void* q, std::size_t bytes) {
  return std::memcmp(p, q, bytes) == 0;
}

}  // namespace

TEST_CASE("AVX2 kernels reproduce the scalar reference") {
  if (!simd::cpu_has_avx2()) {
    MESSAGE("AVX2 unavailable; equivalence test skipped");
    return;
  }
  const auto& ref = simd::scalar_kernels();
  const auto& vec = simd::avx2_kernels();
  // Odd lengths exercise the scalar tails.
  for (std::size_t n : {0u, 1u, 3u, 7u, 64u, 1001u}) {
    CAPTURE(n);
    const Data d = make_inputs(n, 17 + n);

    auto x1 = d.x, x2 = d.x;
    ref.scale_by_real(x1.data(), d.a.data(), n);
    vec.scale_by_real(x2.data(), d.a.data(), n);
    CHECK(bitwise_equal(x1.data(), x2.data(), n * sizeof(cplx)));

    std::vector<cplx> o1(n), o2(n);
    ref.combine(o1.data(), d.a.data(), d.x.data(), d.b.data(), d.y.data(), n);
    vec.combine(o2.data(), d.a.data(), d.x.data(), d.b.data(), d.y.data(), n);
    CHECK(bitwise_equal(o1.data(), o2.data(), n * sizeof(cplx)));

    auto p1 = d.a, p2 = d.a;
    ref.accumulate_product(p1.data(), d.b.data(), d.a.data(), n);
    vec.accumulate_product(p2.data(), d.b.data(), d.a.data(), n);
    CHECK(bitwise_equal(p1.data(), p2.data(), n * sizeof(double)));

    CHECK(ref.max_abs2(d.x.data(), n) == vec.max_abs2(d.x.data(), n));

    const double s1 = ref.sum_abs2(d.x.data(), n), s2 = vec.sum_abs2(d.x.data(), n);
    CHECK(s2 == doctest::Approx(s1).epsilon(1e-13));
    const double q1 = ref.sum_squares(d.a.data(), n), q2 = vec.sum_squares(d.a.data(), n);
    CHECK(q2 == doctest::Approx(q1).epsilon(1e-13));
  }
}

TEST_CASE("inverse-square pair sums agree across variants") {
  if (!simd::cpu_has_avx2()) return;
  const auto& ref = simd::scalar_kernels();
  const auto& vec = simd::avx2_kernels();
  std::vector<double> x, y, z, w;
  for (int k = 0; k < 7; ++k)
    for (int j = 0; j < 7; ++j)
      for (int i = 0; i < 7; ++i) {
        x.push_back(i);
        y.push_back(j);
        z.push_back(k);
        w.push_back(1.0 + 0.01 * (i + 2 * j + 3 * k));
      }
  for (std::size_t n : {std::size_t{0}, std::size_t{3}, x.size()}) {
    const double a = ref.inverse_square_sum(x.data(), y.data(), z.data(), w.data(), n, 3, 3, 3);
    const double b = vec.inverse_square_sum(x.data(), y.data(), z.data(), w.data(), n, 3, 3, 3);
    CHECK(b == doctest::Approx(a).epsilon(1e-13));
  }
  // only the point itself is skipped
  std::vector<double> one(x.size(), 1.0);
  double expect = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - 3, dy = y[i] - 3, dz = z[i] - 3;
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 > 0) expect += 1 / r2;
  }
  CHECK(ref.inverse_square_sum(x.data(), y.data(), z.data(), one.data(), x.size(), 3, 3, 3) ==
        doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("dispatched kernels agree with the scalar reference on simple inputs") {
  std::vector<cplx> x{{3, 4}, {1, 0}, {0, -2}};
  CHECK(simd::sum_abs2(x) == 30.0);
  CHECK(simd::max_abs2(x) == 25.0);
  std::vector<double> f{2, 3, 0.5};
  simd::scale_by_real(x, f);
  CHECK(x[0] == cplx(6, 8));
  CHECK(x[2] == cplx(0, -1));
  MESSAGE("active kernel set: " << simd::isa_name(simd::active_isa()));
}
