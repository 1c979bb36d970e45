#include "nsaudit/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "nsaudit/errors.hpp"

namespace nsaudit::quad {

Rule1 gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("gauss_legendre needs n >= 1");
  Rule1 r{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // map [-1, 1] to [0, 1]
    r.x[i] = 0.5 * (1.0 - x);
    r.w[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

cplx corner_singular_integral(const std::function<cplx(const Vec3&)>& F, int order) {
  const Rule1 g = gauss_legendre(order);
  cplx total{};
  for (int axis = 0; axis < 3; ++axis)
    for (int i = 0; i < order; ++i)
      for (int j = 0; j < order; ++j) {
        cplx row{};
        for (int l = 0; l < order; ++l) {
          const double s = g.x[l];
          Vec3 v{};
          v[axis] = s;
          v[(axis + 1) % 3] = s * g.x[i];
          v[(axis + 2) % 3] = s * g.x[j];
          row += g.w[l] * s * s * F(v);
        }
        total += g.w[i] * g.w[j] * row;
      }
  return total;
}

cplx cube_mean_helmholtz(double k, double a) {
  if (!(a > 0.0)) throw InvalidInput("cube side must be positive");
  const double h = 0.5 * a;
  return corner_singular_integral([&](const Vec3& v) {
    const double r = h * norm(v);
    return std::polar(1.0, k * r) / r;
  });
}

}  // namespace nsaudit::quad
