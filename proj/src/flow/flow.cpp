#include "nsaudit/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nsaudit/errors.hpp"
#include "nsaudit/simd.hpp"

namespace nsaudit::flow {

using std::numbers::pi;

namespace {

std::vector<double> real_part(const Grid3& g, const std::vector<cplx>& coeffs) {
  const auto buf = spectral::to_physical_complex(SpectralScalar(g, coeffs));
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  return out;
}

std::vector<cplx> forward(const Grid3& g, const std::vector<double>& values) {
  return spectral::to_spectral(ScalarField(g, values)).coeffs;
}

// Calls fn(idx, k) for every lattice point.
template <class Fn>
void for_each_mode(const Grid3& g, Fn&& fn) {
  const int n = g.n();
  const auto kw = g.wavenumbers();
  for (int c = 0; c < n; ++c)
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) fn(g.index(a, b, c), Vec3{kw[a], kw[b], kw[c]});
}

std::vector<cplx> masked(const std::vector<cplx>& c, const std::vector<double>& mask) {
  std::vector<cplx> out = c;
  simd::scale_by_real(out, mask);
  return out;
}

// Physical velocity components, dealiased if a mask is given.
std::array<std::vector<double>, 3> physical_velocity(const FlowState& s,
                                                     const std::vector<double>* mask) {
  std::array<std::vector<double>, 3> u;
  for (int i = 0; i < 3; ++i)
    u[i] = real_part(s.grid(), mask ? masked(s.u.comp[i], *mask) : s.u.comp[i]);
  return u;
}

VectorField analytic_forcing(const std::string& name, const Grid3& g, double amplitude) {
  VectorField f(g);
  const int n = g.n();
  const double k0 = 2 * pi / g.length();
  for (int c = 0; c < n; ++c)
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) {
        const Vec3 x = g.point(a, b, c);
        const std::size_t idx = g.index(a, b, c);
        if (name == "taylor-green") {
          f.comp[0][idx] = amplitude * std::sin(k0 * x[0]) * std::cos(k0 * x[1]) * std::cos(k0 * x[2]);
          f.comp[1][idx] = -amplitude * std::cos(k0 * x[0]) * std::sin(k0 * x[1]) * std::cos(k0 * x[2]);
        } else if (name == "kolmogorov") {
          f.comp[0][idx] = amplitude * std::sin(k0 * x[1]);
        } else if (name == "gradient") {
          f.comp[0][idx] = -amplitude * k0 * std::sin(k0 * x[0]);
        }
      }
  return f;
}

}  // namespace

void FluidParams::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidInput("viscosity must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time step must be positive");
  if (!(dt <= t_end * (1 + 1e-12))) throw InvalidInput("time step exceeds t_end");
}

ForcingSpec ForcingSpec::analytic(std::string name, double amplitude) {
  if (name != "taylor-green" && name != "kolmogorov" && name != "gradient")
    throw InvalidInput("unknown analytic forcing '" + name + "'");
  ForcingSpec f;
  f.kind = Kind::analytic;
  f.name = std::move(name);
  f.amplitude = amplitude;
  return f;
}

ForcingSpec ForcingSpec::snapshots(std::vector<double> times, std::vector<VectorField> frames) {
  if (times.empty() || times.size() != frames.size())
    throw InvalidInput("forcing snapshot sequence needs one time per frame");
  if (!std::is_sorted(times.begin(), times.end()))
    throw InvalidInput("forcing snapshot times must be increasing");
  ForcingSpec f;
  f.kind = Kind::snapshots;
  f.times = std::move(times);
  f.frames = std::move(frames);
  return f;
}

SpectralVector forcing_at(const ForcingSpec& f, const Grid3& g, double t) {
  if (f.is_zero()) return SpectralVector(g);
  VectorField field(g);
  if (f.kind == ForcingSpec::Kind::analytic) {
    field = analytic_forcing(f.name, g, f.amplitude);
  } else {
    const double tau = t / f.time_scale;
    for (const auto& fr : f.frames)
      if (!(fr.grid == g)) throw InvalidInput("forcing snapshot grid does not match");
    std::size_t hi = std::upper_bound(f.times.begin(), f.times.end(), tau) - f.times.begin();
    if (hi == 0) {
      field = f.frames.front();
    } else if (hi == f.times.size()) {
      field = f.frames.back();
    } else {
      const double w = (tau - f.times[hi - 1]) / (f.times[hi] - f.times[hi - 1]);
      for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < g.size(); ++i)
          field.comp[c][i] = (1 - w) * f.frames[hi - 1].comp[c][i] + w * f.frames[hi].comp[c][i];
    }
  }
  for (auto& c : field.comp)
    for (double& v : c) v *= f.scale;
  return spectral::to_spectral(field);
}

std::vector<double> dealias_mask(const Grid3& g) {
  std::vector<double> mask(g.size());
  const int n = g.n();
  auto keep = [n, &g](int i) { return 3 * std::abs(g.mode(i)) <= n; };
  for (int c = 0; c < n; ++c)
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a)
        mask[g.index(a, b, c)] = keep(a) && keep(b) && keep(c) ? 1.0 : 0.0;
  return mask;
}

SpectralVector leray_project(const SpectralVector& v) {
  SpectralVector out(v.grid);
  for_each_mode(v.grid, [&](std::size_t idx, const Vec3& k) {
    const double kk = dot(k, k);
    if (kk == 0.0) return;
    const cplx kv = k[0] * v.comp[0][idx] + k[1] * v.comp[1][idx] + k[2] * v.comp[2][idx];
    for (int i = 0; i < 3; ++i) out.comp[i][idx] = v.comp[i][idx] - k[i] * kv / kk;
  });
  return out;
}

SpectralVector nonlinear_term(const FlowState& s, bool dealias) {
  const Grid3& g = s.grid();
  const auto mask = dealias ? dealias_mask(g) : std::vector<double>(g.size(), 1.0);
  const auto u = physical_velocity(s, &mask);
  SpectralVector out(g);
  for (int i = 0; i < 3; ++i) {
    const SpectralScalar ui(g, masked(s.u.comp[i], mask));
    std::vector<double> acc(g.size(), 0.0);
    for (int j = 0; j < 3; ++j) {
      const auto dj = real_part(g, spectral::spectral_gradient(ui, j).coeffs);
      simd::accumulate_product(acc, u[j], dj);
    }
    out.comp[i] = forward(g, acc);
    simd::scale_by_real(out.comp[i], mask);
  }
  return out;
}

std::vector<SpectralScalar> velocity_products(const FlowState& s, bool dealias) {
  const Grid3& g = s.grid();
  const auto mask = dealias ? dealias_mask(g) : std::vector<double>(g.size(), 1.0);
  const auto u = physical_velocity(s, &mask);
  constexpr int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  std::vector<SpectralScalar> out;
  for (const auto& p : pairs) {
    std::vector<double> prod(g.size(), 0.0);
    simd::accumulate_product(prod, u[p[0]], u[p[1]]);
    auto c = forward(g, prod);
    simd::scale_by_real(c, mask);
    out.emplace_back(g, std::move(c));
  }
  return out;
}

SpectralScalar pressure_from_velocity(const FlowState& s, const SpectralVector& forcing,
                                      bool dealias) {
  const Grid3& g = s.grid();
  const auto t = velocity_products(s, dealias);
  SpectralScalar p(g);
  for_each_mode(g, [&](std::size_t idx, const Vec3& k) {
    const double kk = dot(k, k);
    if (kk == 0.0) return;
    const cplx contraction = k[0] * k[0] * t[0].coeffs[idx] + k[1] * k[1] * t[1].coeffs[idx] +
                             k[2] * k[2] * t[2].coeffs[idx] +
                             2.0 * (k[0] * k[1] * t[3].coeffs[idx] + k[0] * k[2] * t[4].coeffs[idx] +
                                    k[1] * k[2] * t[5].coeffs[idx]);
    const cplx kf = k[0] * forcing.comp[0][idx] + k[1] * forcing.comp[1][idx] +
                    k[2] * forcing.comp[2][idx];
    p.coeffs[idx] = (-contraction + cplx(0, 1) * kf) / kk;
  });
  return p;
}

SpectralVector duhamel_integrand(const FlowState& s, const SpectralVector& forcing,
                                 bool dealias) {
  const Grid3& g = s.grid();
  SpectralVector rhs = nonlinear_term(s, dealias);
  for (int i = 0; i < 3; ++i)
    for (std::size_t idx = 0; idx < g.size(); ++idx)
      rhs.comp[i][idx] = forcing.comp[i][idx] - rhs.comp[i][idx];
  SpectralVector out = leray_project(rhs);
  if (dealias) {
    const auto mask = dealias_mask(g);
    for (auto& c : out.comp) simd::scale_by_real(c, mask);
  }
  return out;
}

double momentum_residual_divergence(const FlowState& s, const SpectralVector& forcing,
                                    double nu, bool dealias) {
  const Grid3& g = s.grid();
  const auto n_hat = nonlinear_term(s, dealias);
  const auto p_hat = pressure_from_velocity(s, forcing, dealias);
  const auto integrand = duhamel_integrand(s, forcing, dealias);
  double max_res = 0.0, scale = 0.0;
  for_each_mode(g, [&](std::size_t idx, const Vec3& k) {
    const double kk = dot(k, k);
    cplx k_res{}, k_n{}, k_f{};
    for (int i = 0; i < 3; ++i) {
      const cplx dudt = -nu * kk * s.u.comp[i][idx] + integrand.comp[i][idx];
      const cplx r = dudt + nu * kk * s.u.comp[i][idx] + n_hat.comp[i][idx] -
                     cplx(0, k[i]) * p_hat.coeffs[idx] - forcing.comp[i][idx];
      k_res += k[i] * r;
      k_n += k[i] * n_hat.comp[i][idx];
      k_f += k[i] * forcing.comp[i][idx];
    }
    max_res = std::max(max_res, std::abs(k_res));
    scale = std::max(scale, std::abs(k_n) + std::abs(k_f));
  });
  return scale > 0.0 ? max_res / scale : max_res;
}

double energy(const FlowState& s) { return std::pow(spectral::norm_l2(s.u), 2); }

double gradient_energy(const FlowState& s) {
  const Grid3& g = s.grid();
  double sum = 0.0;
  for_each_mode(g, [&](std::size_t idx, const Vec3& k) {
    const double kk = dot(k, k);
    for (int i = 0; i < 3; ++i) sum += kk * std::norm(s.u.comp[i][idx]);
  });
  return sum / std::pow(g.length(), 3);
}

double forcing_power(const FlowState& s, const SpectralVector& forcing) {
  double sum = 0.0;
  for (int i = 0; i < 3; ++i)
    for (std::size_t idx = 0; idx < s.grid().size(); ++idx)
      sum += (std::conj(forcing.comp[i][idx]) * s.u.comp[i][idx]).real();
  return sum / std::pow(s.grid().length(), 3);
}

double divergence_residual(const SpectralVector& u) {
  double max_div = 0.0, max_u = 0.0;
  for_each_mode(u.grid, [&](std::size_t idx, const Vec3& k) {
    const cplx d = k[0] * u.comp[0][idx] + k[1] * u.comp[1][idx] + k[2] * u.comp[2][idx];
    max_div = std::max(max_div, std::abs(d));
    for (int i = 0; i < 3; ++i) max_u = std::max(max_u, std::abs(u.comp[i][idx]));
  });
  return max_u > 0.0 ? max_div / max_u : 0.0;
}

double phi1(double z) {
  if (std::abs(z) < 1e-4) return 1 + z / 2 + z * z / 6 + z * z * z / 24;
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < 1e-4) return 0.5 + z / 6 + z * z / 24 + z * z * z / 120;
  return (std::expm1(z) - z) / (z * z);
}

FlowState init_flow(const Grid3& g, const InitOptions& opts) {
  FlowState s{0.0, SpectralVector(g)};
  if (opts.name == "taylor-green") {
    s.u = leray_project(spectral::to_spectral(analytic_forcing("taylor-green", g, opts.amplitude)));
  } else if (opts.name == "random-solenoidal") {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    SpectralVector raw(g);
    for (auto& c : raw.comp)
      for (auto& v : c) v = cplx(normal(rng), normal(rng));
    const int n = g.n();
    const auto mask = dealias_mask(g);
    SpectralVector sym(g);
    for (int c = 0; c < n; ++c)
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          const std::size_t idx = g.index(a, b, c);
          const std::size_t mirror = g.index((n - a) % n, (n - b) % n, (n - c) % n);
          const double kn = norm(g.wavevector(a, b, c));
          const double amp = kn > 0.0 ? std::pow(kn, -opts.spectrum_slope) * mask[idx] : 0.0;
          for (int i = 0; i < 3; ++i)
            sym.comp[i][idx] = amp * 0.5 * (raw.comp[i][idx] + std::conj(raw.comp[i][mirror]));
        }
    s.u = leray_project(sym);
    const double rms = std::sqrt(energy(s) / std::pow(g.length(), 3));
    if (rms > 0.0)
      for (auto& c : s.u.comp)
        for (auto& v : c) v *= opts.amplitude / rms;
  } else if (opts.name == "from-snapshot") {
    if (!opts.snapshot) throw InvalidInput("from-snapshot initial condition needs a snapshot");
    if (!(opts.snapshot->grid == g)) throw InvalidInput("snapshot grid does not match run grid");
    s.u = leray_project(spectral::to_spectral(*opts.snapshot));
  } else {
    throw InvalidInput("unknown initial condition '" + opts.name + "'");
  }
  return s;
}

Integrator::Integrator(const Grid3& g, const FluidParams& params)
    : grid_(g), params_(params) {
  if (!(params.nu > 0.0)) throw InvalidInput("viscosity must be positive");
  if (!(params.dt > 0.0)) throw InvalidInput("time step must be positive");
  propagator_.resize(g.size());
  phi1_dt_.resize(g.size());
  phi2_dt_.resize(g.size());
  ones_.assign(g.size(), 1.0);
  const double h = params.dt;
  for_each_mode(g, [&](std::size_t idx, const Vec3& k) {
    const double z = -params.nu * dot(k, k) * h;
    propagator_[idx] = std::exp(z);
    phi1_dt_[idx] = h * phi1(z);
    phi2_dt_[idx] = h * phi2(z);
  });
}

FlowState Integrator::step(const FlowState& s, const ForcingSpec& forcing) const {
  const double h = params_.dt;
  const auto f0 = forcing_at(forcing, grid_, s.t);
  const auto n0 = duhamel_integrand(s, f0, params_.dealias);

  FlowState a{s.t + h, SpectralVector(grid_)};
  for (int i = 0; i < 3; ++i)
    simd::combine(a.u.comp[i], propagator_, s.u.comp[i], phi1_dt_, n0.comp[i]);

  const auto f1 = forcing.kind == ForcingSpec::Kind::snapshots ? forcing_at(forcing, grid_, s.t + h) : f0;
  const auto n1 = duhamel_integrand(a, f1, params_.dealias);

  FlowState out{s.t + h, SpectralVector(grid_)};
  std::vector<cplx> diff(grid_.size());
  for (int i = 0; i < 3; ++i) {
    for (std::size_t idx = 0; idx < diff.size(); ++idx) diff[idx] = n1.comp[i][idx] - n0.comp[i][idx];
    simd::combine(out.u.comp[i], ones_, a.u.comp[i], phi2_dt_, diff);
  }
  for (const auto& c : out.u.comp)
    for (const auto& v : c)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalBlowup(out.t);
  return out;
}

FlowState step(const FlowState& s, const FluidParams& params, const ForcingSpec& forcing) {
  return Integrator(s.grid(), params).step(s, forcing);
}

std::tuple<FlowState, FluidParams, ForcingSpec> rescale(const FlowState& s,
                                                        const FluidParams& params,
                                                        const ForcingSpec& forcing, double A) {
  if (!(A > 0.0) || !std::isfinite(A)) throw InvalidInput("rescale factor must be positive");
  FlowState scaled{A * s.t, s.u};
  for (auto& c : scaled.u.comp)
    for (auto& v : c) v /= A;
  FluidParams p = params;
  p.nu /= A;
  p.dt *= A;
  p.t_end *= A;
  ForcingSpec f = forcing;
  f.scale /= A * A;
  f.time_scale *= A;
  return {std::move(scaled), p, std::move(f)};
}

}  // namespace nsaudit::flow
