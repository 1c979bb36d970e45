#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nsaudit/errors.hpp"
#include "nsaudit/line.hpp"

using namespace nsaudit;
using namespace nsaudit::line;
using std::numbers::pi;

namespace {

constexpr cplx I{0.0, 1.0};

// Dawson's integral F(x) = ∫₀ˣ exp(t² - x²) dt by composite Simpson.
double dawson(double x) {
  const int n = 4000;
  const double h = x / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::exp(-(x - t) * (x + t));
  }
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("Plemelj battery passes every identity") {
  const auto rep = plemelj_selftest(default_battery());
  MESSAGE(rep.summary());
  CHECK(rep.ok());
  CHECK(rep.checks.size() == 17);
}

TEST_CASE("T+ of the Lorentzian matches the residue closed form") {
  // (1/2πi)∫ ds / ((1 + s²)(s - z)) for Im z > 0 closes to -1/(2i(z + i)).
  const double S = 4096;
  const auto f = LineFunction::sample(S, 65536, [](double s) { return cplx(1.0 / (1.0 + s * s)); });
  const auto tp = cauchy_project(f, Side::plus);
  double err = 0.0;
  for (int j = 0; j < f.m(); ++j) {
    const double x = f.node(j);
    if (std::abs(x) <= S / 2) err = std::max(err, std::abs(tp.value(j) + 1.0 / (2.0 * I * (x + I))));
  }
  CHECK(err <= 1e-8);
}

TEST_CASE("T of a Gaussian matches the Dawson-function oracle") {
  // H e^{-s²} = (2/√π) F(x), so T e^{-s²} = (i/√π) F(x).
  const double S = 4096;
  const auto f = LineFunction::sample(S, 65536, [](double s) { return cplx(std::exp(-s * s)); });
  const auto t = cauchy_project(f, Side::principal);
  double err = 0.0;
  for (int j = 0; j < f.m(); ++j) {
    const double x = f.node(j);
    if (std::abs(x) > 12.0) continue;
    err = std::max(err, std::abs(t.value(j) - I * dawson(x) / std::sqrt(pi)));
  }
  CHECK(err <= 1e-8);
}

TEST_CASE("zero function and preconditions") {
  const auto z = LineFunction::sample(16, 64, [](double) { return cplx{}; });
  const auto rep = plemelj_selftest({{"zero", z}});
  for (const auto& c : rep.checks)
    if (c.function == "zero") CHECK(c.error == 0.0);
  CHECK_THROWS_AS(LineFunction::sample(16, 64, [](double) { return cplx(1.0); }), InvalidInput);
  const auto flat = LineFunction::sample(16, 64, [](double) { return cplx(1.0); }, false);
  CHECK_THROWS_AS(cauchy_project(flat, Side::plus), InvalidInput);
  CHECK_THROWS_AS(LineFunction(1.0, std::vector<cplx>(96)), InvalidInput);
}

TEST_CASE("jump of the half-plane projections is the identity") {
  const auto f = LineFunction::sample(64, 1024, [](double s) { return std::exp(-s * s / 4) * (1.0 + I * s); });
  const auto d = cauchy_project(f, Side::plus) - cauchy_project(f, Side::minus);
  CHECK((d - f).with_decay(true).sup(64) <= 1e-10);
}
