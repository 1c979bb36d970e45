#pragma once
// Direct and inverse scattering for -Δ + q on a sampled potential.
//
// Conventions. The potential lives on a periodic Grid3 whose points are
// x = (i, j, l)·dx measured from the box corner; it is treated as zero
// outside the box. q̃(p) = ∫ q e^{i p·x} dx. The amplitude is
// A(k, θ′, θ) = -(1/4π) ∫ q Ψ₊(k, θ, x) e^{-i k θ′·x} dx with θ the incident
// and θ′ the outgoing direction.
//
// k-grids are cell-centred, k_j = (j + 1/2) k_max / n_k, so the conjugate
// reflection A(-k) = conj A(k) extends them to a uniform grid on the line
// without a k = 0 node.
//
// Operator D acts on functions f(k, θ) on (k-grid × sphere):
//   (D f)(k, θ) = c · k Σ_j w_j A(k, θ_j, θ) f(k, θ_j).
// c = 1 gives the raw operator; c = i/2π is the constant for which
// Ψ₊ - Ψ₋ = D Ψ₋ holds with Ψ₋(k, θ) = Ψ₊(-k, -θ).

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nsaudit/spectral.hpp"
#include "nsaudit/sphere.hpp"

namespace nsaudit::scatter {

using spectral::ScalarField;

inline constexpr cplx d_raw{1.0, 0.0};
inline const cplx d_jump{0.0, 0.5 / std::numbers::pi};

// Sphere quadrature: Lebedev for 6, 14, 26, 50 nodes. Checks the weight
// sum and node norms.
SphereRule sphere_grid(int points);

struct PotentialSample {
  ScalarField q;
  std::string id;
  double support_radius = 0.0;  // radius about the box centre holding 99.99% of ∫|q|
  bool decay_warning = false;   // boundary-shell L2 mass >= 1%
  mutable std::optional<double> rollnik_direct, rollnik_spectral;

  PotentialSample(ScalarField field, std::string name);
};

// amplitude·exp(-|x - c|²/width²), c the box centre unless given.
PotentialSample gaussian_potential(const Grid3& g, double amplitude, double width = 1.0,
                                   std::optional<Vec3> centre = std::nullopt);

struct AmplitudeTable {
  std::vector<double> k;
  SphereRule sphere;
  int born_order = 1;
  std::string potential_id;
  // A[k, θ′, θ] at ((ik · ns) + out) · ns + in
  std::vector<cplx> values;
  std::vector<std::string> warnings;

  AmplitudeTable() = default;
  AmplitudeTable(std::vector<double> kgrid, SphereRule s, int order, std::string id);

  std::size_t nk() const { return k.size(); }
  std::size_t ns() const { return sphere.size(); }
  double kmax() const;
  cplx& at(std::size_t ik, std::size_t out, std::size_t in) {
    return values[(ik * ns() + out) * ns() + in];
  }
  cplx at(std::size_t ik, std::size_t out, std::size_t in) const {
    return values[(ik * ns() + out) * ns() + in];
  }
  // Index of k on the grid; throws InvalidInput when off-grid.
  std::size_t k_index(double kv) const;
  // Index of the grid point nearest to kv.
  std::size_t nearest_k(double kv) const;
};

std::vector<double> k_grid(int nk, double kmax);

// Largest k the potential grid resolves: k·L/2π < n/3.
double resolvable_k(const Grid3& g);

// -(1/4π) q̃(k(θ - θ′)). Throws InvalidInput when k is not resolvable.
cplx born_amplitude(const PotentialSample& q, double k, const Vec3& theta_out,
                    const Vec3& theta_in);

struct BornOptions {
  // record a warning when Rollnik/(4π)² >= 1
  bool warn_rollnik = true;
};

// Born series of order M: Ψ₁ = φ₀, Ψ_{m+1} = φ₀ + G₀⁺[q Ψ_m] with
// G₀⁺(r) = -e^{ikr}/(4πr), amplitude from Ψ_M. G₀⁺ is applied as a
// convolution on the doubled grid, the singular cell taking the kernel's
// cell mean. M = 1 is born_amplitude at every entry. Throws NotContractive
// when the increment grows twice in a row.
AmplitudeTable born_series_amplitude(const PotentialSample& q, const std::vector<double>& kgrid,
                                     const SphereRule& sphere, int M, BornOptions opts = {});

// NA(k, θ) = Σ_j w_j A(k, θ_j, θ); k must be on the grid.
cplx op_N(const AmplitudeTable& A, double k, std::size_t theta);

// Values on (k-grid × sphere), index ik · ns + j.
using KSphereField = std::vector<cplx>;

// D f with constant c. With x given, the demodulated form
// c · k Σ_j w_j A(k, θ_j, θ) e^{ik(θ_j - θ)·x} f(k, θ_j) is applied.
KSphereField op_D(const AmplitudeTable& A, const KSphereField& f, cplx c = d_jump,
                  const std::optional<Vec3>& x = std::nullopt);
// Induced sup-norm of D: max_{k,θ} |c| k Σ_j w_j |A(k, θ_j, θ)|.
double op_D_norm(const AmplitudeTable& A, cplx c = d_jump);

// T±, T in the k variable for each sphere node. Negative k is filled by
// conjugate reflection, a cos² taper over the top quarter of (0, k_max]
// gives decay, and the line is zero-padded to at least 4·n_k points.
enum class KSide { plus, minus, principal };
KSphereField cauchy_in_k(const AmplitudeTable& A, const KSphereField& f, KSide side);

// sup over (k, θ′, θ) and the extended line of |T a| + |a|, a the
// extended, tapered k-line of A(·, θ′, θ).
double ta_norm(const AmplitudeTable& A);

struct NeumannOptions {
  double tol = 1e-12;
  int n_max = 500;
  cplx c = d_jump;
  std::optional<Vec3> x;  // demodulated D at this point
};

struct NeumannResult {
  KSphereField g;
  int iterations = 0;
  double increment = 0.0;
  bool converged = false;
};

// Solves (I - T₋D) g = rhs by g ← rhs + T₋ D g. Throws NotContractive when
// n_max is reached with growing increments or the iterate overflows.
NeumannResult neumann_solve(const AmplitudeTable& A, const KSphereField& rhs,
                            const NeumannOptions& opts = {});

// The same system by dense LU of the real 2N × 2N matrix of g ↦ T₋ D g
// (the map is only real-linear because of the conjugate reflection).
KSphereField neumann_solve_dense(const AmplitudeTable& A, const KSphereField& rhs,
                                 const NeumannOptions& opts = {});

// Δ(k) = Π_j (k + iE_j)/(k - iE_j).
using Blaschke = std::function<cplx(double)>;
Blaschke no_bound_states();

// μ₋(k, θ; x) = (I - T₋ D_x)⁻¹ T₋ D_x 1, the demodulated Ψ₋ e^{-ikθ·x} - 1.
NeumannResult mu_minus(const AmplitudeTable& A, const Vec3& x, const NeumannOptions& opts = {});

// Ψ₋(k, θ_j, x) = e^{ikθ_j·x} (1 + μ₋/Δ(k)) at the grid k nearest √z, one
// value per sphere node.
std::vector<cplx> wavefunction_minus(const AmplitudeTable& A, const Blaschke& delta, const Vec3& x,
                                     double z, const NeumannOptions& opts = {});

struct TargetGrid {
  Vec3 origin{};
  double spacing = 0.5;
  int n = 9;
  Vec3 point(int i, int j, int l) const {
    return {origin[0] + i * spacing, origin[1] + j * spacing, origin[2] + l * spacing};
  }
  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
};

struct Reconstruction {
  TargetGrid targets;
  std::vector<double> z;          // energies actually used, k_grid² nearest the request
  std::vector<double> primary;    // Richardson limit of (Δ_h Ψ₋ + zΨ₋)/Ψ₋, sphere-averaged
  std::vector<double> literal;    // Richardson limit of the N-averaged ratio
  std::vector<std::vector<double>> primary_by_z;
  std::vector<bool> flagged;      // |Ψ₋| < 1e-6 somewhere in the stencil
  int max_iterations = 0;
};

// Needs at least three energies. Δ_h is the 7-point Laplacian on the
// target spacing; Ψ₋ is solved on the targets plus a one-point halo.
Reconstruction reconstruct_potential(const AmplitudeTable& A, const Blaschke& delta,
                                     const TargetGrid& targets, const std::vector<double>& z,
                                     const NeumannOptions& opts = {});

enum class RollnikMethod { direct, spectral, both };

struct RollnikValue {
  double direct = 0.0;
  double spectral = 0.0;
  double gap() const;  // |direct - spectral| / max
};

struct RollnikOptions {
  int stride = 1;  // direct: subsampling factor of the pair grid
  int pad = 2;     // spectral: zero-padding factor of the transform grid
};

// ∬ |q(x)||q(y)| / |x - y|² dx dy. Direct: punctured pair sum over grid
// points with the lattice-zeta correction for the singular diagonal.
// Spectral: (2π)⁻³ ∫ |FT|q||² w(k) dk with w = 2π²/|k| (the transform of
// 1/|x|²), the k = 0 cell using the cell mean of w. Unrequested methods
// are returned as 0.
RollnikValue rollnik_norm(const PotentialSample& q, RollnikMethod method = RollnikMethod::both,
                          RollnikOptions opts = {});

// rollnik_norm(direct) / (4π)².
double birman_schwinger_bound(const PotentialSample& q, RollnikOptions opts = {});

struct BoundStateSet {
  Grid3 grid;
  std::vector<double> E;                 // E_j > 0, eigenvalue -E_j², ascending eigenvalue
  std::vector<std::vector<double>> psi;  // Σ ψ² dx³ = 1
  std::size_t count() const { return E.size(); }
};

enum class EigenMethod { automatic, dense, lanczos };

// H = -Δ_h + q with the 7-point Laplacian and zero Dirichlet data outside
// the box. Dense LAPACK solve, or Lanczos with full reorthogonalisation and
// deflated restarts (automatic: dense for n <= 16).
BoundStateSet bound_states(const PotentialSample& q, int n_eig_max = 64,
                           EigenMethod method = EigenMethod::automatic);

cplx blaschke(const BoundStateSet& states, double k);
Blaschke blaschke_of(const BoundStateSet& states);

// sup_{k,θ} |Im A(k, θ, θ) - (k/4π) Σ_j w_j |A(k, θ_j, θ)|²|.
double optical_residual(const AmplitudeTable& A);

}  // namespace nsaudit::scatter
