#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nsaudit/errors.hpp"
#include "nsaudit/scattering.hpp"

using namespace nsaudit;
using namespace nsaudit::scatter;
using std::numbers::pi;

namespace {

constexpr cplx I{0.0, 1.0};

std::size_t antipode(const SphereRule& s, std::size_t j) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (norm(s.nodes[i] + s.nodes[j]) < 1e-12) return i;
  FAIL("sphere rule is not inversion symmetric");
  return 0;
}

AmplitudeTable constant_table(int nk, double kmax, int points, cplx v) {
  AmplitudeTable A(k_grid(nk, kmax), sphere_grid(points), 1, "const");
  std::fill(A.values.begin(), A.values.end(), v);
  return A;
}

}  // namespace

TEST_CASE("Born amplitude of a Gaussian matches its closed-form transform") {
  const Grid3 g(32, 12.0);
  const double amp = -0.7;
  const Vec3 c{5.9, 6.2, 6.0};
  const auto q = gaussian_potential(g, amp, 1.0, c);
  const auto s = sphere_grid(14);
  for (double k : {0.4, 1.3, 2.5})
    for (std::size_t o = 0; o < s.size(); o += 3)
      for (std::size_t i = 0; i < s.size(); i += 4) {
        const Vec3 p = k * (s.nodes[i] - s.nodes[o]);
        const cplx ref = -amp * std::pow(pi, 1.5) * std::exp(-dot(p, p) / 4) *
                         std::polar(1.0, dot(p, c)) / (4 * pi);
        CHECK(std::abs(born_amplitude(q, k, s.nodes[o], s.nodes[i]) - ref) < 1e-6);
      }
  // forward direction, and linearity in q
  const cplx fwd = born_amplitude(q, 1.0, s.nodes[0], s.nodes[0]);
  CHECK(std::abs(fwd + amp * std::pow(pi, 1.5) / (4 * pi)) < 1e-6);
  const auto q2 = gaussian_potential(g, 2 * amp, 1.0, c);
  CHECK(std::abs(born_amplitude(q2, 1.0, s.nodes[1], s.nodes[2]) -
                 2.0 * born_amplitude(q, 1.0, s.nodes[1], s.nodes[2])) < 1e-13);
  CHECK_THROWS_AS(born_amplitude(q, 100.0, s.nodes[0], s.nodes[1]), InvalidInput);
}

TEST_CASE("first-order table equals the Born amplitude and is Hermitian") {
  const Grid3 g(16, 10.0);
  const auto q = gaussian_potential(g, -0.5);
  const auto s = sphere_grid(6);
  const auto A = born_series_amplitude(q, k_grid(4, 1.5), s, 1);
  for (std::size_t ik = 0; ik < A.nk(); ++ik)
    for (std::size_t o = 0; o < s.size(); ++o)
      for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(A.at(ik, o, i) == born_amplitude(q, A.k[ik], s.nodes[o], s.nodes[i]));
        CHECK(std::abs(A.at(ik, o, i) - std::conj(A.at(ik, i, o))) < 1e-14);
      }
}

TEST_CASE("second-order table is reciprocal") {
  // A(θ′, θ) = A(-θ, -θ′) for the symmetric discrete Green's function.
  const Grid3 g(16, 10.0);
  const auto q = gaussian_potential(g, -0.5);
  const auto s = sphere_grid(14);
  const auto A = born_series_amplitude(q, k_grid(3, 1.5), s, 2);
  double worst = 0.0, scale = 0.0;
  for (std::size_t ik = 0; ik < A.nk(); ++ik)
    for (std::size_t o = 0; o < s.size(); ++o)
      for (std::size_t i = 0; i < s.size(); ++i) {
        worst = std::max(worst, std::abs(A.at(ik, o, i) - A.at(ik, antipode(s, i), antipode(s, o))));
        scale = std::max(scale, std::abs(A.at(ik, o, i)));
      }
  CHECK(worst < 1e-12 * scale);
}

TEST_CASE("optical theorem residual scales with the coupling") {
  // Born-1: Im A(θ, θ) = 0, so the residual is the flux, exactly ∝ ε².
  // Born-2 satisfies the identity to second order, leaving O(ε³).
  const Grid3 g(16, 10.0);
  const auto s = sphere_grid(50);
  const auto kg = k_grid(3, 0.6);
  double r1[2], r2[2];
  for (int h = 0; h < 2; ++h) {
    const auto q = gaussian_potential(g, -0.2 / (1 << h));
    r1[h] = optical_residual(born_series_amplitude(q, kg, s, 1));
    r2[h] = optical_residual(born_series_amplitude(q, kg, s, 2));
  }
  MESSAGE("born-1 ratio " << r1[0] / r1[1] << ", born-2 ratio " << r2[0] / r2[1]);
  CHECK(r1[0] / r1[1] == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(r2[0] / r2[1] > 7.0);
  CHECK(r2[0] / r2[1] < 9.0);
}

TEST_CASE("operator N on simple tables") {
  const auto A = constant_table(4, 2.0, 26, cplx(1.0));
  CHECK(std::abs(op_N(A, A.k[2], 5) - 4 * pi) < 1e-12);
  AmplitudeTable B(k_grid(4, 2.0), sphere_grid(6), 1, "dipole");
  for (std::size_t ik = 0; ik < B.nk(); ++ik)
    for (std::size_t o = 0; o < B.ns(); ++o)
      for (std::size_t i = 0; i < B.ns(); ++i) B.at(ik, o, i) = B.sphere.nodes[o][2];
  CHECK(std::abs(op_N(B, B.k[0], 0)) < 1e-14);
  CHECK_THROWS_AS(op_N(B, 0.123, 0), InvalidInput);
}

TEST_CASE("operator D on simple tables") {
  const auto Z = constant_table(4, 2.0, 6, cplx{});
  const KSphereField one(Z.nk() * Z.ns(), cplx(1.0));
  for (const auto& v : op_D(Z, one)) CHECK(v == cplx{});
  const auto A = constant_table(4, 2.0, 6, cplx(1.0));
  const auto d = op_D(A, one, d_raw);
  for (std::size_t ik = 0; ik < A.nk(); ++ik)
    CHECK(std::abs(d[ik * A.ns() + 3] - 4 * pi * A.k[ik]) < 1e-12);
  CHECK(op_D_norm(A, d_jump) == doctest::Approx(2.0 * A.k.back()).epsilon(1e-12));
  // demodulation cancels for a constant f and table at x = 0
  const auto d0 = op_D(A, one, d_raw, Vec3{0, 0, 0});
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(d0[i] - d[i]) < 1e-12);
}

TEST_CASE("TA norm is zero on zero and homogeneous") {
  CHECK(ta_norm(constant_table(8, 2.0, 6, cplx{})) == 0.0);
  const Grid3 g(16, 10.0);
  const auto A = born_series_amplitude(gaussian_potential(g, -0.3), k_grid(8, 2.0), sphere_grid(6), 1);
  auto B = A;
  for (auto& v : B.values) v *= 2.0;
  const double t = ta_norm(A);
  CHECK(t > 0.0);
  CHECK(t < 1.0);
  CHECK(ta_norm(B) == doctest::Approx(2.0 * t).epsilon(1e-12));
}

TEST_CASE("Neumann solver: trivial, dense oracle and divergence") {
  const auto Z = constant_table(8, 2.0, 6, cplx{});
  KSphereField rhs(Z.nk() * Z.ns());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = cplx(std::sin(0.3 * i), std::cos(0.7 * i));
  const auto r0 = neumann_solve(Z, rhs);
  CHECK(r0.converged);
  CHECK(r0.iterations == 1);
  CHECK(r0.g == rhs);

  const Grid3 g(16, 10.0);
  const auto A = born_series_amplitude(gaussian_potential(g, -0.5), k_grid(16, 2.0), sphere_grid(6), 1);
  NeumannOptions o;
  o.tol = 1e-14;
  o.x = Vec3{4.0, 5.5, 5.0};
  rhs.resize(A.nk() * A.ns());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = cplx(std::sin(0.3 * i), std::cos(0.7 * i));
  const auto it = neumann_solve(A, rhs, o);
  const auto dense = neumann_solve_dense(A, rhs, o);
  REQUIRE(it.converged);
  double err = 0.0;
  for (std::size_t i = 0; i < rhs.size(); ++i) err = std::max(err, std::abs(it.g[i] - dense[i]));
  MESSAGE("iterations " << it.iterations << ", gap to dense " << err);
  CHECK(err < 1e-8);

  auto big = A;
  for (auto& v : big.values) v *= 1e4;
  CHECK_THROWS_AS(neumann_solve(big, rhs), NotContractive);
}

TEST_CASE("without scattering the wavefunction is the plane wave") {
  const auto Z = constant_table(8, 2.0, 14, cplx{});
  const Vec3 x{0.3, -1.2, 2.0};
  const auto psi = wavefunction_minus(Z, no_bound_states(), x, 1.0, {});
  const double k = Z.k[Z.nearest_k(1.0)];
  for (std::size_t j = 0; j < psi.size(); ++j)
    CHECK(std::abs(psi[j] - std::polar(1.0, k * dot(Z.sphere.nodes[j], x))) < 1e-15);
}

TEST_CASE("reconstruction of a zero table is zero") {
  const auto Z = constant_table(16, 4.0, 6, cplx{});
  TargetGrid t;
  t.n = 3;
  const auto rec = reconstruct_potential(Z, no_bound_states(), t, {0.5, 1.0, 2.0});
  REQUIRE(rec.primary.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK_FALSE(rec.flagged[i]);
    CHECK(std::abs(rec.primary[i]) < 1e-3);
    CHECK(rec.literal[i] == 0.0);
  }
  CHECK_THROWS_AS(reconstruct_potential(Z, no_bound_states(), t, {1.0, 2.0}), InvalidInput);
}

TEST_CASE("Rollnik norm: Gaussian closed form, scaling and method agreement") {
  // ∬ e^{-|x|²} e^{-|y|²} / |x - y|² = π³
  const Grid3 g(32, 12.0);
  const auto q = gaussian_potential(g, 1.0);
  const auto r = rollnik_norm(q);
  MESSAGE("direct " << r.direct << " spectral " << r.spectral << " exact " << pi * pi * pi);
  CHECK(std::abs(r.direct / (pi * pi * pi) - 1.0) < 0.01);
  CHECK(std::abs(r.spectral / (pi * pi * pi) - 1.0) < 0.01);
  CHECK(r.gap() < 0.01);
  CHECK(birman_schwinger_bound(q) == doctest::Approx(r.direct / (16 * pi * pi)));

  const Grid3 c(16, 12.0);
  const auto a = rollnik_norm(gaussian_potential(c, 1.0));
  const auto b = rollnik_norm(gaussian_potential(c, -3.0));
  CHECK(b.direct == doctest::Approx(9.0 * a.direct).epsilon(1e-12));
  CHECK(b.spectral == doctest::Approx(9.0 * a.spectral).epsilon(1e-12));
  CHECK_THROWS_AS(rollnik_norm(q, RollnikMethod::direct, {3, 2}), InvalidInput);
}

TEST_CASE("bound states: free case, solver agreement and counting bound") {
  const Grid3 g(12, 8.0);
  CHECK(bound_states(PotentialSample(ScalarField(g), "zero")).count() == 0);

  const auto well = gaussian_potential(g, -20.0);
  const auto d = bound_states(well, 64, EigenMethod::dense);
  const auto l = bound_states(well, 64, EigenMethod::lanczos);
  REQUIRE(d.count() > 0);
  REQUIRE(l.count() == d.count());
  for (std::size_t i = 0; i < d.count(); ++i) CHECK(std::abs(d.E[i] - l.E[i]) < 1e-6);
  double nrm = 0.0;
  for (double v : d.psi[0]) nrm += v * v * g.cell_volume();
  CHECK(nrm == doctest::Approx(1.0).epsilon(1e-12));

  for (double depth : {1.0, 10.0, 50.0}) {
    const auto q = gaussian_potential(g, -depth);
    const auto n = bound_states(q).count();
    MESSAGE("depth " << depth << ": " << n << " states, bound " << birman_schwinger_bound(q));
    CHECK(static_cast<double>(n) <= birman_schwinger_bound(q));
  }
}

TEST_CASE("Blaschke factor") {
  BoundStateSet s{Grid3(8, 1.0), {1.0}, {}};
  CHECK(std::abs(blaschke(s, 1.0) - I) < 1e-15);
  s.E = {0.3, 1.7, 2.2};
  const auto f = blaschke_of(s);
  for (double k : {0.1, 1.0, 7.5}) {
    CHECK(std::abs(std::abs(f(k)) - 1.0) < 1e-14);
    CHECK(std::abs(f(k) - blaschke(s, k)) < 1e-15);
  }
  CHECK(no_bound_states()(3.0) == cplx(1.0));
}
