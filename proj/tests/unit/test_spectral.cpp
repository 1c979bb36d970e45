#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nsaudit/errors.hpp"
#include "nsaudit/spectral.hpp"

using namespace nsaudit;
using namespace nsaudit::spectral;
using std::numbers::pi;

namespace {

ScalarField random_field(const Grid3& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  ScalarField f(g);
  for (auto& v : f.values) v = d(rng);
  return f;
}

// exp(-|x - c|² / (2σ²)) sampled on the grid.
ScalarField gaussian(const Grid3& g, double sigma) {
  ScalarField f(g);
  const auto xc = g.centered_coordinates();
  const int n = g.n();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double r2 = xc[i] * xc[i] + xc[j] * xc[j] + xc[k] * xc[k];
        f.values[g.index(i, j, k)] = std::exp(-r2 / (2 * sigma * sigma));
      }
  return f;
}

// Continuum transform of the centred Gaussian: (2πσ²)^{3/2} e^{ik·c} e^{-σ²|k|²/2}.
cplx gaussian_transform(const Grid3& g, double sigma, const Vec3& k) {
  const double amp = std::pow(2 * pi * sigma * sigma, 1.5) *
                     std::exp(-sigma * sigma * dot(k, k) / 2);
  return amp * std::polar(1.0, dot(k, g.center()));
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const std::vector<double>& a) {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(Grid3(33, 1.0), InvalidInput);
  CHECK_THROWS_AS(Grid3(6, 1.0), InvalidInput);
  CHECK_THROWS_AS(Grid3(16, 0.0), InvalidInput);
  const Grid3 g(16, 2.0);
  int zero_modes = 0;
  for (int i = 0; i < 16; ++i) zero_modes += g.mode(i) == 0;
  CHECK(zero_modes == 1);
  CHECK(g.mode(8) == -8);
  CHECK(g.slot(-3) == 13);
}

TEST_CASE("to_spectral of a constant lands on k = 0 only") {
  const Grid3 g(16, 3.0);
  ScalarField f(g);
  for (auto& v : f.values) v = 2.5;
  const auto s = to_spectral(f);
  CHECK(std::abs(s.coeffs[0] - cplx(2.5 * 27.0)) < 1e-12 * 67.5);
  double rest = 0;
  for (std::size_t i = 1; i < s.coeffs.size(); ++i) rest = std::max(rest, std::abs(s.coeffs[i]));
  CHECK(rest < 1e-12 * 67.5);
}

TEST_CASE("to_spectral of a single cosine mode") {
  const Grid3 g(16, 2.0);
  ScalarField f(g);
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i)
        f.values[g.index(i, j, k)] = std::cos(2 * pi * i * g.dx() / g.length());
  const auto s = to_spectral(f);
  const double l3 = 8.0;
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i) {
        const bool hit = j == 0 && k == 0 && (i == 1 || i == 15);
        const cplx expect = hit ? cplx(l3 / 2) : cplx{};
        CHECK(std::abs(s.coeffs[g.index(i, j, k)] - expect) < 1e-12 * l3);
      }
}

TEST_CASE("to_spectral matches the closed-form Gaussian transform") {
  const Grid3 g(32, 8.0);
  const double sigma = g.length() / 16;
  const auto s = to_spectral(gaussian(g, sigma));
  int checked = 0;
  for (int k = 0; k < 32; ++k)
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i) {
        const Vec3 kv = g.wavevector(i, j, k);
        if (norm(kv) * sigma > 2.0) continue;
        const cplx expect = gaussian_transform(g, sigma, kv);
        CHECK(std::abs(s.coeffs[g.index(i, j, k)] - expect) <= 1e-6 * std::abs(expect));
        ++checked;
      }
  CHECK(checked > 100);
}

TEST_CASE("to_physical inverts to_spectral") {
  const Grid3 g(32, 5.0);
  const auto f = random_field(g, 3);
  const auto back = to_physical(to_spectral(f));
  CHECK(max_abs_diff(back.values, f.values) <= 1e-12 * max_abs(f.values));

  SpectralScalar unit(g);
  unit.coeffs[0] = std::pow(g.length(), 3);
  const auto one = to_physical(unit);
  CHECK(max_abs_diff(one.values, std::vector<double>(g.size(), 1.0)) < 1e-13);
}

TEST_CASE("to_physical recovers a Gaussian from closed-form spectral data") {
  const Grid3 g(32, 8.0);
  const double sigma = g.length() / 16;
  SpectralScalar s(g);
  for (int k = 0; k < 32; ++k)
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i)
        s.coeffs[g.index(i, j, k)] = gaussian_transform(g, sigma, g.wavevector(i, j, k));
  // The Nyquist planes carry e^{ik·c} = ±1 phases that are real, so the data stay Hermitian.
  const auto f = to_physical(s);
  CHECK(max_abs_diff(f.values, gaussian(g, sigma).values) < 1e-6);
}

TEST_CASE("to_physical rejects non-Hermitian data when a real field is requested") {
  const Grid3 g(8, 1.0);
  SpectralScalar s(g);
  s.coeffs[g.index(1, 0, 0)] = 1.0;  // no conjugate partner at -k
  CHECK_THROWS_AS(to_physical(s), InvalidInput);
}

TEST_CASE("spectral_gradient") {
  const Grid3 g(16, 2.0);
  ScalarField c(g);
  for (auto& v : c.values) v = 4.0;
  for (int a = 0; a < 3; ++a) {
    const auto d = to_physical(spectral_gradient(to_spectral(c), a));
    CHECK(max_abs(d.values) < 1e-12);
  }

  ScalarField s(g);
  ScalarField expect(g);
  const double k0 = 2 * pi / g.length();
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i) {
        s.values[g.index(i, j, k)] = std::sin(k0 * i * g.dx());
        expect.values[g.index(i, j, k)] = k0 * std::cos(k0 * i * g.dx());
      }
  const auto ds = to_physical(spectral_gradient(to_spectral(s), 0));
  CHECK(max_abs_diff(ds.values, expect.values) < 1e-12);
}

TEST_CASE("spectral_gradient of a Gaussian matches the analytic derivative") {
  const Grid3 g(32, 8.0);
  const double sigma = g.length() / 16;
  const auto f = gaussian(g, sigma);
  const auto xc = g.centered_coordinates();
  for (int a = 0; a < 3; ++a) {
    const auto d = to_physical(spectral_gradient(to_spectral(f), a));
    double err = 0;
    for (int k = 0; k < 32; ++k)
      for (int j = 0; j < 32; ++j)
        for (int i = 0; i < 32; ++i) {
          const std::size_t idx = g.index(i, j, k);
          const double x = a == 0 ? xc[i] : a == 1 ? xc[j] : xc[k];
          err = std::max(err, std::abs(d.values[idx] + x / (sigma * sigma) * f.values[idx]));
        }
    CHECK(err < 1e-6);
  }
}

TEST_CASE("gradient and linear combinations preserve Hermitian symmetry") {
  const Grid3 g(16, 3.0);
  const auto a = to_spectral(random_field(g, 11));
  const auto b = to_spectral(random_field(g, 12));
  for (int ax = 0; ax < 3; ++ax) CHECK(hermitian_defect(spectral_gradient(a, ax)) < 1e-12);
  SpectralScalar mix(g);
  for (std::size_t i = 0; i < g.size(); ++i) mix.coeffs[i] = 0.3 * a.coeffs[i] - 2.0 * b.coeffs[i];
  CHECK(hermitian_defect(mix) < 1e-12);
}

TEST_CASE("to_spectral is linear") {
  const Grid3 g(16, 3.0);
  const auto f = random_field(g, 5), h = random_field(g, 6);
  ScalarField mix(g);
  for (std::size_t i = 0; i < g.size(); ++i) mix.values[i] = 1.5 * f.values[i] - 0.25 * h.values[i];
  const auto sf = to_spectral(f), sh = to_spectral(h), sm = to_spectral(mix);
  double err = 0, scale = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    err = std::max(err, std::abs(sm.coeffs[i] - (1.5 * sf.coeffs[i] - 0.25 * sh.coeffs[i])));
    scale = std::max(scale, std::abs(sm.coeffs[i]));
  }
  CHECK(err <= 1e-12 * scale);
}

TEST_CASE("norm_l2 on both sides of the transform") {
  const Grid3 g(32, 2.0);
  CHECK(norm_l2(ScalarField(g)) == 0.0);
  CHECK(norm_l2(SpectralScalar(g)) == 0.0);

  ScalarField c(g);
  for (auto& v : c.values) v = -3.0;
  CHECK(norm_l2(c) == doctest::Approx(3.0 * std::pow(2.0, 1.5)).epsilon(1e-14));

  const auto f = random_field(g, 21);
  const double phys = norm_l2(f), spec = norm_l2(to_spectral(f));
  CHECK(std::abs(phys - spec) <= 1e-12 * phys);
}

TEST_CASE("spectral_sup of zero and of a centred Gaussian") {
  const Grid3 g(32, 8.0);
  for (int m = 0; m <= 2; ++m) CHECK(spectral_sup(SpectralScalar(g), m) == 0.0);

  const double sigma = g.length() / 16;
  const auto f = gaussian(g, sigma);
  const double a = std::pow(2 * pi * sigma * sigma, 1.5);
  CHECK(spectral_sup(to_spectral(f), 0) == doctest::Approx(a).epsilon(1e-10));

  // |∇_k| and Frobenius |∇²_k| of a e^{-σ²k²/2}, maximised over the same lattice.
  double oracle1 = 0, oracle2 = 0, arg1 = 0;
  for (int k = 0; k < 32; ++k)
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i) {
        const double kk = dot(g.wavevector(i, j, k), g.wavevector(i, j, k));
        const double e = a * std::exp(-sigma * sigma * kk / 2);
        const double d1 = e * sigma * sigma * std::sqrt(kk);
        const double s2 = sigma * sigma;
        const double d2 = e * std::sqrt(s2 * s2 * s2 * s2 * kk * kk - 2 * s2 * s2 * s2 * kk + 3 * s2 * s2);
        if (d1 > oracle1) {
          oracle1 = d1;
          arg1 = kk;
        }
        oracle2 = std::max(oracle2, d2);
      }
  CHECK(arg1 > 0.0);  // the maximum sits off k = 0
  CHECK(spectral_sup(to_spectral(f), 1) == doctest::Approx(oracle1).epsilon(1e-5));
  CHECK(spectral_sup(to_spectral(f), 2) == doctest::Approx(oracle2).epsilon(1e-5));
}

TEST_CASE("weighted_norm moments of a centred Gaussian") {
  const Grid3 g(32, 8.0);
  const double sigma = g.length() / 16;
  const auto f = gaussian(g, sigma);
  const auto m1 = weighted_norm(f, 1);
  const auto m2 = weighted_norm(f, 2);
  // ∫|y|² e^{-|y|²/σ²} dy and ∫|y|⁴ e^{-|y|²/σ²} dy.
  const double e1 = 1.5 * std::pow(pi, 1.5) * std::pow(sigma, 5);
  const double e2 = 3.75 * std::pow(pi, 1.5) * std::pow(sigma, 7);
  CHECK(m1.value == doctest::Approx(e1).epsilon(1e-10));
  CHECK(m2.value == doctest::Approx(e2).epsilon(1e-10));
  CHECK_FALSE(m1.decay_warning);
  CHECK(weighted_norm(ScalarField(g), 1).value == 0.0);

  // Shifting the packet off centre increases the m = 1 moment.
  ScalarField shifted(g);
  for (int k = 0; k < 32; ++k)
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i)
        shifted.values[g.index((i + 3) % 32, j, k)] = f.values[g.index(i, j, k)];
  CHECK(weighted_norm(shifted, 1).value > m1.value);

  ScalarField flat(g);
  for (auto& v : flat.values) v = 1.0;
  CHECK(weighted_norm(flat, 1).decay_warning);
}

TEST_CASE("moment transform and weighted norm agree through Parseval") {
  const Grid3 g(32, 8.0);
  const auto f = gaussian(g, g.length() / 12);
  const auto parts = moment_transforms(f, 1);
  double sum = 0;
  for (const auto& p : parts) sum += norm_l2(p) * norm_l2(p);
  CHECK(sum == doctest::Approx(weighted_norm(f, 1).value).epsilon(1e-6));
}

TEST_CASE("transform_at agrees with the FFT on lattice wavevectors") {
  const Grid3 g(16, 4.0);
  const auto f = random_field(g, 8);
  const auto s = to_spectral(f);
  for (auto [i, j, k] : {std::array{1, 0, 0}, std::array{3, 15, 2}, std::array{8, 8, 8}}) {
    const cplx direct = transform_at(f, g.wavevector(i, j, k));
    CHECK(std::abs(direct - s.coeffs[g.index(i, j, k)]) < 1e-10);
  }
}

TEST_CASE("shell_average of a constant is 2π") {
  const Grid3 g(16, 2 * pi);
  SpectralScalar one(g);
  for (auto& c : one.coeffs) c = 1.0;
  const auto rule = lebedev(26);
  // Only interior reads: k - l stays within the lattice for |k| <= n/4.
  for (Vec3 k : {Vec3{1, 0, 0}, Vec3{1.5, -2.0, 0.5}, Vec3{0, 0, 3.2}})
    CHECK(std::abs(shell_average(one, k, rule) - cplx(2 * pi)) < 1e-12);
  CHECK_THROWS_AS(shell_average(one, Vec3{0, 0, 0}, rule), InvalidInput);
  CHECK_THROWS_AS(shell_average(one, Vec3{40, 0, 0}, rule), InvalidInput);
}

TEST_CASE("shell_average of linear data keeps only the value at k") {
  const Grid3 g(16, 2 * pi);
  const cplx a(0.7, -0.2);
  const Vec3 b{0.3, -1.1, 0.25};
  SpectralScalar s(g);
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i) s.coeffs[g.index(i, j, k)] = a + dot(b, g.wavevector(i, j, k));
  const auto rule = lebedev(26);
  for (Vec3 k : {Vec3{1.2, 0.3, -0.4}, Vec3{-2, 1, 1}}) {
    const cplx expect = 2 * pi * (a + dot(b, k));
    CHECK(std::abs(shell_average(s, k, rule) - expect) < 1e-11);
  }
}

TEST_CASE("shell_average of a radial profile matches dense sphere sampling") {
  auto radial = [](const Vec3& p) { return cplx(std::exp(-dot(p, p) / 4.0)); };
  const auto rule = lebedev(26);
  const auto dense = fibonacci_sphere(400000);
  const Vec3 k{0.6, -0.5, 0.62};
  const cplx lq = shell_average(radial, k, rule);
  const cplx ref = shell_average(radial, k, dense);
  CHECK(std::abs(lq - ref) <= 1e-4 * std::abs(ref));

  // A rotated wavevector of the same length gives the same value.
  const Vec3 rotated{norm(k), 0, 0};
  CHECK(std::abs(shell_average(radial, rotated, rule) - lq) <= 1e-4 * std::abs(lq));
}

TEST_CASE("Lebedev rules integrate low-degree harmonics exactly") {
  for (int pts : {6, 14, 26, 50}) {
    const auto r = lebedev(pts);
    double w = 0, z = 0, z2 = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      w += r.weights[i];
      z += r.weights[i] * r.nodes[i][2];
      z2 += r.weights[i] * r.nodes[i][2] * r.nodes[i][2];
      CHECK(std::abs(norm(r.nodes[i]) - 1.0) < 1e-14);
    }
    CHECK(std::abs(w - 4 * pi) < 1e-12);
    CHECK(std::abs(z) < 1e-14);
    CHECK(std::abs(z2 - 4 * pi / 3) < 1e-12);
  }
  CHECK_THROWS_AS(lebedev(7), InvalidInput);
}
