#pragma once
// Incompressible Navier-Stokes on the periodic box, advanced in Fourier
// space with an exponential (Duhamel) integrator:
//
//   ∂_t û = -ν|k|² û + Ñ(û, t),   Ñ = P(-FT[(u·∇)u] + f̂),
//
// where P is the Leray projector. Pressure is diagnostic only.

#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "nsaudit/spectral.hpp"

namespace nsaudit::flow {

using spectral::ScalarField;
using spectral::SpectralScalar;
using spectral::SpectralVector;
using spectral::VectorField;

struct FlowState {
  double t = 0.0;
  SpectralVector u;

  const Grid3& grid() const { return u.grid; }
};

struct FluidParams {
  double nu = 0.0;
  double dt = 0.0;
  double t_end = 0.0;
  bool dealias = true;

  // Throws InvalidInput unless nu > 0, dt > 0 and dt <= t_end.
  void validate() const;
};

// Forcing f(x, t) = scale * base(x, t / time_scale).
//   none
//   analytic: "taylor-green" (steady TG pattern), "kolmogorov"
//             (sin(k0 x₂) e₁), "gradient" (∇cos(k0 x₁), removed by P)
//   snapshots: piecewise-linear in time between frames, held at the ends
struct ForcingSpec {
  enum class Kind { none, analytic, snapshots };
  Kind kind = Kind::none;
  std::string name;
  double amplitude = 0.0;
  std::vector<double> times;
  std::vector<VectorField> frames;
  double scale = 1.0;
  double time_scale = 1.0;

  static ForcingSpec none() { return {}; }
  static ForcingSpec analytic(std::string name, double amplitude);
  static ForcingSpec snapshots(std::vector<double> times, std::vector<VectorField> frames);

  bool is_zero() const { return kind == Kind::none || scale == 0.0; }
};

// Raw (unprojected) forcing transform at time t.
SpectralVector forcing_at(const ForcingSpec& f, const Grid3& g, double t);

struct InitOptions {
  std::string name;  // taylor-green | random-solenoidal | from-snapshot
  double amplitude = 1.0;
  unsigned long long seed = 0;
  double spectrum_slope = 2.0;
  std::optional<VectorField> snapshot;
};

// Taylor-Green: amplitude·(sin k₀x cos k₀y cos k₀z, -cos k₀x sin k₀y cos k₀z, 0),
// k₀ = 2π/L. Random-solenoidal: Hermitian Gaussian modes with amplitude
// |k|^{-slope}, dealiased, projected and scaled to rms velocity = amplitude.
FlowState init_flow(const Grid3& g, const InitOptions& opts);

// (δ_ij - k_i k_j / |k|²) v̂_j for k ≠ 0; zero at k = 0.
SpectralVector leray_project(const SpectralVector& v);

// 1 on retained modes, 0 where any |m_i| > n/3.
std::vector<double> dealias_mask(const Grid3& g);

// FT[(u·∇)u] computed pseudo-spectrally from the three velocity and nine
// gradient components. With dealias the 2/3 mask is applied before the
// products and to the result.
SpectralVector nonlinear_term(const FlowState& s, bool dealias = true);

// FT[u_a u_b] for (00, 11, 22, 01, 02, 12), dealiased as above.
std::vector<SpectralScalar> velocity_products(const FlowState& s, bool dealias = true);

// p̃ = -k_a k_b FT[u_a u_b] / |k|² + i k·f̂ / |k|², zero at k = 0. This is the
// sign that makes the divergence of the momentum equation vanish under the
// ∂_j ↔ -i k_j convention.
SpectralScalar pressure_from_velocity(const FlowState& s, const SpectralVector& forcing,
                                      bool dealias = true);

// Ñ = P(-nonlinear_term + f̂): the integrand of the Duhamel formula.
SpectralVector duhamel_integrand(const FlowState& s, const SpectralVector& forcing,
                                 bool dealias = true);

// max_k |k·R| / max_k (|k·N̂| + |k·f̂|) for the momentum residual
// R = ∂_t û + ν|k|²û + N̂ - i k p̃ - f̂, with ∂_t û taken from the solver.
double momentum_residual_divergence(const FlowState& s, const SpectralVector& forcing,
                                    double nu, bool dealias = true);

// ‖u‖²_{L2}.
double energy(const FlowState& s);
// ‖∇u‖²_{L2}.
double gradient_energy(const FlowState& s);
// ∫ f·u dx.
double forcing_power(const FlowState& s, const SpectralVector& forcing);
// max_k |k·û| / max_k |û|.
double divergence_residual(const SpectralVector& u);

// φ₁(z) = (e^z - 1)/z and φ₂(z) = (e^z - 1 - z)/z², Taylor series for |z| < 1e-4.
double phi1(double z);
double phi2(double z);

// Second-order exponential Runge-Kutta (ETD2RK) stepper with cached
// propagator tables for a fixed grid and step size:
//
//   a       = e^{Lh} û + h φ₁(Lh) Ñ(û, t)
//   û(t+h)  = a + h φ₂(Lh) [Ñ(a, t+h) - Ñ(û, t)],   L = -ν|k|².
class Integrator {
 public:
  Integrator(const Grid3& g, const FluidParams& params);

  // Throws NumericalBlowup if any coefficient becomes non-finite.
  FlowState step(const FlowState& s, const ForcingSpec& forcing) const;

  const FluidParams& params() const { return params_; }

 private:
  Grid3 grid_;
  FluidParams params_;
  std::vector<double> propagator_, phi1_dt_, phi2_dt_, ones_;
};

FlowState step(const FlowState& s, const FluidParams& params, const ForcingSpec& forcing);

// Runs from s to params.t_end (the last step is shortened if needed) and
// calls observe(state) on the initial state and after every step.
template <class Observer>
FlowState evolve(FlowState s, const FluidParams& params, const ForcingSpec& forcing,
                 Observer&& observe);

// t' = A t, û' = û / A, ν' = ν / A, f' = f / A² (dt and t_end scale like t).
std::tuple<FlowState, FluidParams, ForcingSpec> rescale(const FlowState& s,
                                                        const FluidParams& params,
                                                        const ForcingSpec& forcing, double A);

// ---------------------------------------------------------------------------

template <class Observer>
FlowState evolve(FlowState s, const FluidParams& params, const ForcingSpec& forcing,
                 Observer&& observe) {
  params.validate();
  const Integrator full(s.grid(), params);
  observe(static_cast<const FlowState&>(s));
  const double t0 = s.t;
  const long steps = std::lround(std::ceil((params.t_end - t0) / params.dt - 1e-9));
  for (long i = 0; i < steps; ++i) {
    const double remaining = params.t_end - s.t;
    if (remaining < params.dt * (1 - 1e-9)) {
      FluidParams last = params;
      last.dt = remaining;
      s = Integrator(s.grid(), last).step(s, forcing);
    } else {
      s = full.step(s, forcing);
    }
    // Times are t0 + i·dt exactly rather than accumulated.
    s.t = i + 1 == steps ? params.t_end : t0 + (i + 1) * params.dt;
    observe(static_cast<const FlowState&>(s));
  }
  return s;
}

}  // namespace nsaudit::flow
