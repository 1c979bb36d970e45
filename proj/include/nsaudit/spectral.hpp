#pragma once
// Periodic-box Fourier machinery.
//
// Forward convention: q̃(k) = ∫ q(x) e^{i k·x} dx, discretised as
// dx³ Σ_x q(x) e^{i k·x}. Inverse: q(x) = (2π)⁻³ ∫ q̃(k) e^{-i k·x} dk,
// i.e. L⁻³ Σ_k q̃(k) e^{-i k·x}. Consequently ∂_j q ↔ -i k_j q̃.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "nsaudit/grid.hpp"
#include "nsaudit/sphere.hpp"

namespace nsaudit::spectral {

struct ScalarField {
  Grid3 grid;
  std::vector<double> values;

  explicit ScalarField(const Grid3& g) : grid(g), values(g.size(), 0.0) {}
  ScalarField(const Grid3& g, std::vector<double> v);
};

struct SpectralScalar {
  Grid3 grid;
  std::vector<cplx> coeffs;

  explicit SpectralScalar(const Grid3& g) : grid(g), coeffs(g.size(), cplx{}) {}
  SpectralScalar(const Grid3& g, std::vector<cplx> c);
};

struct VectorField {
  Grid3 grid;
  std::array<std::vector<double>, 3> comp;

  explicit VectorField(const Grid3& g);
  ScalarField component(int i) const { return ScalarField(grid, comp[i]); }
};

struct SpectralVector {
  Grid3 grid;
  std::array<std::vector<cplx>, 3> comp;

  explicit SpectralVector(const Grid3& g);
  SpectralScalar component(int i) const { return SpectralScalar(grid, comp[i]); }
};

// Raw unnormalised 3D DFTs on a grid-sized buffer, in place.
// sign = +1 computes Σ f e^{+2πi m·j/n}, sign = -1 the conjugate kernel.
void fft_inplace(const Grid3& g, std::span<cplx> data, int sign);
// One-dimensional counterpart on a buffer of any length.
void fft1_inplace(std::span<cplx> data, int sign);

SpectralScalar to_spectral(const ScalarField& f);
SpectralScalar to_spectral_complex(const Grid3& g, std::span<const cplx> values);
SpectralVector to_spectral(const VectorField& f);

// Real-valued inverse. Throws InvalidInput if the result has an imaginary
// part above tol relative to its max magnitude (Hermitian symmetry broken).
ScalarField to_physical(const SpectralScalar& s, double tol = 1e-10);
VectorField to_physical(const SpectralVector& s, double tol = 1e-10);
std::vector<cplx> to_physical_complex(const SpectralScalar& s);

// Max over k of |c(k) - conj(c(-k))| relative to max |c|.
double hermitian_defect(const SpectralScalar& s);

// Multiplies by -i k_axis (axis in 0..2). The Nyquist slot of that axis is
// zeroed so real fields stay real.
SpectralScalar spectral_gradient(const SpectralScalar& s, int axis);

double norm_l2(const ScalarField& f);
double norm_l2(const SpectralScalar& s);
double norm_l2(const SpectralVector& s);

// Magnitude of the m-th k-derivative of q̃ (m = 0, 1, 2), maximised over K.
// Derivatives are moment-weighted transforms of (i x̃)^m q with x̃ = x - c.
double spectral_sup(const SpectralScalar& s, int m);
double spectral_sup(const SpectralVector& s, int m);
double spectral_sup_physical(const ScalarField& f, int m);
double spectral_sup_physical(const VectorField& f, int m);

// |∇_k^m q̃(k)|² summed over components at every lattice k (off-diagonal
// second derivatives count twice).
std::vector<double> derivative_abs2(const VectorField& f, int m);

// Moment-weighted transforms: for m = 1 the three transforms of i x̃_j q;
// for m = 2 the six of -x̃_a x̃_b q in order (00, 11, 22, 01, 02, 12).
std::vector<SpectralScalar> moment_transforms(const ScalarField& f, int m);

struct WeightedNorm {
  double value;
  bool decay_warning;  // boundary-shell L2 mass >= 1% of total
};
// ∫ |x - c|^{2m} |f|² dx by midpoint quadrature, m in {1, 2}.
WeightedNorm weighted_norm(const ScalarField& f, int m);
WeightedNorm weighted_norm(const VectorField& f, int m);
// Fraction of the L2 mass in the outer 1/16 of the box on each side.
double boundary_mass_fraction(const ScalarField& f);

// q̃ at an arbitrary wavevector by direct summation, dx³ Σ f e^{i p·x}.
cplx transform_at(const ScalarField& f, const Vec3& p);

// Trilinear interpolation of the coefficients at an off-lattice wavevector.
// Points outside the resolved lattice read as zero.
cplx interpolate(const SpectralScalar& s, const Vec3& k);

// ∫ q̃(k - l) δ(|k|² - |l|²) dl / |k| = ½ ∮_{|u|=1} q̃(k - |k| u) dΩ(u).
// Throws InvalidInput for |k| = 0 or |k| beyond the Nyquist wavenumber.
cplx shell_average(const SpectralScalar& s, const Vec3& k, const SphereRule& rule);
cplx shell_average(const std::function<cplx(const Vec3&)>& qt, const Vec3& k,
                   const SphereRule& rule);

}  // namespace nsaudit::spectral
