#include <cmath>

#include "doctest.h"
#include "nsaudit/quadrature.hpp"

using namespace nsaudit;

TEST_CASE("Gauss-Legendre is exact to degree 2n - 1 on [0, 1]") {
  for (int n : {1, 4, 12}) {
    const auto r = quad::gauss_legendre(n);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], 2 * n - 1);
    CHECK(s == doctest::Approx(1.0 / (2 * n)).epsilon(1e-14));
  }
}

TEST_CASE("cube mean of 1/r and its scaling") {
  // scipy tplquad reference
  const double unit = 2.380077363979553;
  CHECK(std::abs(quad::cube_mean_helmholtz(0.0, 1.0).real() - unit) < 1e-10);
  CHECK(std::abs(quad::cube_mean_helmholtz(0.0, 0.25).real() - unit / 0.25) < 1e-9);
  CHECK(quad::cube_mean_helmholtz(0.0, 1.0).imag() == 0.0);
}

TEST_CASE("imaginary part of the Helmholtz cube mean follows the sin series") {
  // sin(kr)/r = k - k³r²/6 + ..., and the cube mean of r² is a²/4.
  const double k = 0.3, a = 1.0;
  const double series = k - k * k * k * a * a / 24.0;
  CHECK(std::abs(quad::cube_mean_helmholtz(k, a).imag() - series) < 1e-5);
}
