#pragma once
// Small fixed quadratures used by the scattering kernels.

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "nsaudit/grid.hpp"

namespace nsaudit::quad {

// Gauss-Legendre nodes and weights on [0, 1].
struct Rule1 {
  std::vector<double> x, w;
};
Rule1 gauss_legendre(int n);

// ∫_{[0,1]³} F(v) dv for F singular only at v = 0 (like |v|^{-2} or
// milder). Splits the cube into the three pyramids v = s(1, a, b) and
// permutations, whose s² Jacobian cancels the singularity.
cplx corner_singular_integral(const std::function<cplx(const Vec3&)>& F, int order = 24);

// Mean of e^{ik r}/r over a cube of side a centred at r = 0.
cplx cube_mean_helmholtz(double k, double a);

}  // namespace nsaudit::quad
