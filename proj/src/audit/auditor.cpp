#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsaudit/audit.hpp"
#include "nsaudit/errors.hpp"
#include "nsaudit/simd.hpp"

namespace nsaudit::audit {

using spectral::SpectralScalar;
using spectral::VectorField;

namespace {

double trapezoid(double h, double a, double b) { return 0.5 * h * (a + b); }

double max_vector_abs(const SpectralVector& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.grid.size(); ++i)
    m = std::max(m, std::norm(v.comp[0][i]) + std::norm(v.comp[1][i]) + std::norm(v.comp[2][i]));
  return std::sqrt(m);
}

// Σ_k weight(k)·acc(k)·dk³ over the lattice.
template <class Weight>
double k_integral(const Grid3& g, const std::vector<double>& acc, Weight weight) {
  const int n = g.n();
  const auto kw = g.wavenumbers();
  double sum = 0.0;
  for (int c = 0; c < n; ++c)
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a)
        sum += weight(Vec3{kw[a], kw[b], kw[c]}) * acc[g.index(a, b, c)];
  return sum * std::pow(g.dk(), 3);
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// Velocity gradient ∂_j q as a vector field, for j = 0..2.
std::array<VectorField, 3> velocity_gradient(const SpectralVector& u) {
  std::array<VectorField, 3> out{VectorField(u.grid), VectorField(u.grid), VectorField(u.grid)};
  for (int j = 0; j < 3; ++j) {
    SpectralVector d(u.grid);
    for (int i = 0; i < 3; ++i) d.comp[i] = spectral::spectral_gradient(u.component(i), j).coeffs;
    out[j] = spectral::to_physical(d);
  }
  return out;
}

double vector_interp_abs(const std::array<SpectralScalar, 3>& comps, const Vec3& k) {
  double s = 0.0;
  for (const auto& c : comps) s += std::norm(spectral::interpolate(c, k));
  return std::sqrt(s);
}

std::array<SpectralScalar, 3> components(const SpectralVector& v) {
  return {v.component(0), v.component(1), v.component(2)};
}

}  // namespace

std::vector<PairSpec> default_pairs(const Grid3& g) {
  const auto dirs = fibonacci_sphere(8).nodes;
  const double band = g.dk() * (g.n() / 3);
  std::vector<PairSpec> out;
  for (int i = 0; i < 8; ++i) {
    const Vec3 ek = dirs[i], el = dirs[(i + 3) % 8];
    const double sep = norm(ek - el);
    if (sep < 0.1) continue;
    for (int j = 1; j <= 4; ++j) out.push_back({0.95 * band * j / (4.0 * sep), ek, el});
  }
  return out;
}

struct Auditor::Replay {
  // e^{-ν|k|² j h} for j = 1, 2, 3.
  std::array<std::vector<double>, 3> decay;
  // Duhamel integrands of the last four samples, newest last.
  std::vector<SpectralVector> samples;
  // Replayed integral at the two most recent even sample indices.
  SpectralVector r_even, r_even_prev;
  long index = -1;

  explicit Replay(const Grid3& g) : r_even(g), r_even_prev(g) {}
};

Auditor::Auditor(const Grid3& g, const FluidParams& params, ForcingSpec forcing, AuditOptions opts)
    : grid_(g), params_(params), forcing_(std::move(forcing)), opts_(std::move(opts)), q0_(g) {
  if (!(params_.nu > 0.0)) throw InvalidInput("auditor needs ν > 0");
  if (opts_.pairs.empty()) opts_.pairs = default_pairs(g);
  for (const auto& p : opts_.pairs) {
    if (norm(p.e_k - p.e_l) < 1e-12)
      throw InvalidInput("difference-bound pair has coincident unit vectors");
    if (!(p.k > 0.0)) throw InvalidInput("difference-bound pair needs |k| > 0");
  }
  replay_ = std::make_shared<Replay>(g);
}

void Auditor::observe(const FlowState& s) {
  if (!(s.grid() == grid_)) throw InvalidInput("audited state grid does not match");
  const bool first = records_.empty();
  double h = 0.0;
  if (!first) {
    h = s.t - prev_t_;
    if (!(h > 0.0)) throw InvalidInput("audited states must advance in time");
    if (h_ == 0.0) {
      h_ = h;
      const int n = grid_.n();
      const auto kw = grid_.wavenumbers();
      for (int j = 0; j < 3; ++j) replay_->decay[j].resize(grid_.size());
      for (int c = 0; c < n; ++c)
        for (int b = 0; b < n; ++b)
          for (int a = 0; a < n; ++a) {
            const double kk = kw[a] * kw[a] + kw[b] * kw[b] + kw[c] * kw[c];
            for (int j = 0; j < 3; ++j)
              replay_->decay[j][grid_.index(a, b, c)] = std::exp(-params_.nu * kk * (j + 1) * h_);
          }
    } else if (std::abs(h - h_) > 1e-9 * h_) {
      throw InvalidInput("Duhamel replay needs a uniform output cadence");
    }
  }

  AuditRecord rec;
  rec.t = s.t;
  const auto fhat = flow::forcing_at(forcing_, grid_, s.t);
  const auto q = spectral::to_physical(s.u);

  // Energy.
  rec.energy = flow::energy(s);
  const double g = flow::gradient_energy(s);
  const double work = flow::forcing_power(s, fhat);
  if (first) {
    q0_ = s.u;
    e0_ = rec.energy;
    // ‖f‖_{L2(Q_T)} by trapezoid on the solver's step grid.
    if (!forcing_.is_zero()) {
      const long steps = std::max(1L, std::lround(std::ceil((params_.t_end - s.t) / params_.dt - 1e-9)));
      const double dt = (params_.t_end - s.t) / steps;
      double acc = 0.0;
      for (long i = 0; i <= steps; ++i) {
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        acc += w * std::pow(spectral::norm_l2(flow::forcing_at(forcing_, grid_, s.t + i * dt)), 2);
      }
      forcing_norm_qt_ = std::sqrt(acc * dt);
    }
  } else {
    rec.dissipation = records_.back().dissipation + trapezoid(h, prev_g_, g);
    work_ += trapezoid(h, prev_work_, work);
  }
  sup_energy_ = std::max(sup_energy_, rec.energy);
  rec.balance_residual = rec.energy + 2 * params_.nu * rec.dissipation - e0_ - 2 * work_;
  rec.margins.push_back({ids::energy_inequality, sup_energy_ + rec.dissipation,
                         e0_ + forcing_norm_qt_});
  rec.margins.push_back({ids::energy_balance, std::abs(rec.balance_residual),
                         opts_.balance_tol * e0_});

  // Pressure.
  const auto pa = audit_pressure(s, fhat, params_.dealias);
  rec.pressure_norm = pa.norm;
  rec.margins.push_back(pa.l2);
  rec.margins.push_back(pa.gradient);

  // Physical and spectral moments.
  const auto wm1 = spectral::weighted_norm(q, 1), wm2 = spectral::weighted_norm(q, 2);
  rec.mom2 = wm1.value;
  rec.mom4 = wm2.value;
  rec.decay_warning = wm1.decay_warning;
  std::array<double, 2> wgrad{};
  for (const auto& dq : velocity_gradient(s.u)) {
    wgrad[0] += spectral::weighted_norm(dq, 1).value;
    wgrad[1] += spectral::weighted_norm(dq, 2).value;
  }
  const auto d1 = spectral::derivative_abs2(q, 1), d2 = spectral::derivative_abs2(q, 2);
  rec.kgrad1 = std::sqrt(k_integral(grid_, d1, [](const Vec3&) { return 1.0; }));
  rec.kgrad2 = std::sqrt(k_integral(grid_, d2, [](const Vec3&) { return 1.0; }));
  const std::array<double, 2> kdiss = {
      k_integral(grid_, d1, [](const Vec3& k) { return dot(k, k); }),
      k_integral(grid_, d2, [](const Vec3& k) { return dot(k, k); })};
  rec.sup = {max_vector_abs(s.u), std::sqrt(max_of(d1)), std::sqrt(max_of(d2))};
  if (!first)
    for (int m = 0; m < 2; ++m) {
      wgrad_int_[m] += trapezoid(h, prev_wgrad_[m], wgrad[m]);
      kdiss_int_[m] += trapezoid(h, prev_kdiss_[m], kdiss[m]);
    }
  if (first) {
    sup0_ = rec.sup;
    const auto f = spectral::to_physical(fhat);
    auto kscale = [&](int m) {
      return std::sqrt(k_integral(grid_, spectral::derivative_abs2(f, m), [](const Vec3&) { return 1.0; }));
    };
    moment_scale_ = {rec.mom2 + spectral::weighted_norm(f, 1).value,
                     rec.mom4 + spectral::weighted_norm(f, 2).value, rec.kgrad1 + kscale(1),
                     rec.kgrad2 + kscale(2)};
  }
  const double mf = opts_.moment_factor;
  rec.margins.push_back({ids::moment_x2, rec.mom2 + wgrad_int_[0], mf * moment_scale_[0]});
  rec.margins.push_back({ids::moment_x4, rec.mom4 + wgrad_int_[1], mf * moment_scale_[1]});
  rec.margins.push_back({ids::moment_k1, rec.kgrad1 + kdiss_int_[0], mf * moment_scale_[2]});
  rec.margins.push_back({ids::moment_k2, rec.kgrad2 + kdiss_int_[1], mf * moment_scale_[3]});

  sup_kgrad1_ = std::max(sup_kgrad1_, rec.kgrad1);
  sup_kgrad2_ = std::max(sup_kgrad2_, rec.kgrad2);
  const double half_T = 0.5 * params_.t_end;
  rec.margins.push_back({ids::sup_k0, rec.sup[0], sup0_[0] + half_T * (sup_energy_ + rec.dissipation)});
  rec.margins.push_back({ids::sup_k1, rec.sup[1], sup0_[1] + half_T * (sup_kgrad1_ + kdiss_int_[0])});
  rec.margins.push_back({ids::sup_k2, rec.sup[2], sup0_[2] + half_T * (sup_kgrad2_ + kdiss_int_[1])});

  // Running C constants of the Duhamel integrand.
  const auto integrand = flow::duhamel_integrand(s, fhat, params_.dealias);
  const auto integrand_phys = spectral::to_physical(integrand);
  const std::array<double, 3> c = {std::pow(max_vector_abs(integrand), 2),
                                   max_of(spectral::derivative_abs2(integrand_phys, 1)),
                                   max_of(spectral::derivative_abs2(integrand_phys, 2))};
  if (!first) {
    const auto& last = records_.back();
    rec.C0 = last.C0 + trapezoid(h, prev_c_[0], c[0]);
    rec.C2 = last.C2 + trapezoid(h, prev_c_[1], c[1]);
    rec.C4 = last.C4 + trapezoid(h, prev_c_[2], c[2]);
  }

  // Difference bound at the configured pairs.
  {
    const auto now = components(s.u), init = components(q0_);
    double worst_rel = std::numeric_limits<double>::infinity();
    Margin worst{ids::difference_bound, 0.0, 0.0};
    rec.pair_margin_min = std::numeric_limits<double>::infinity();
    for (const auto& p : opts_.pairs) {
      const double sep = norm(p.e_k - p.e_l);
      const Vec3 kappa = p.k * (p.e_k - p.e_l);
      const double lhs = vector_interp_abs(now, kappa);
      const double rhs = vector_interp_abs(init, kappa) +
                         std::sqrt(rec.C0 / (2 * params_.nu)) / (p.k * sep);
      rec.pair_margins.push_back(rhs - lhs);
      rec.pair_margin_min = std::min(rec.pair_margin_min, rhs - lhs);
      const double rel = rhs > 0.0 ? (rhs - lhs) / rhs : (lhs > 0.0 ? -1.0 : 0.0);
      if (rel < worst_rel) {
        worst_rel = rel;
        worst = {ids::difference_bound, lhs, rhs};
      }
    }
    rec.margins.push_back(worst);
  }

  // Duhamel replay.
  {
    Replay& r = *replay_;
    ++r.index;
    r.samples.push_back(integrand);
    if (r.samples.size() > 4) r.samples.erase(r.samples.begin());
    const auto& e = r.decay;
    const std::size_t size = grid_.size();
    const auto& N = r.samples;
    const std::size_t last = N.size() - 1;
    SpectralVector replayed(grid_);
    if (r.index == 0) {
      // zero integral
    } else if (r.index == 1) {
      for (int i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < size; ++k)
          replayed.comp[i][k] = e[0][k] * r.r_even.comp[i][k] +
                                0.5 * h_ * (e[0][k] * N[last - 1].comp[i][k] + N[last].comp[i][k]);
    } else if (r.index % 2 == 0) {
      for (int i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < size; ++k)
          replayed.comp[i][k] =
              e[1][k] * r.r_even.comp[i][k] +
              h_ / 3 * (e[1][k] * N[last - 2].comp[i][k] + 4 * e[0][k] * N[last - 1].comp[i][k] +
                        N[last].comp[i][k]);
    } else {
      for (int i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < size; ++k)
          replayed.comp[i][k] =
              e[2][k] * r.r_even_prev.comp[i][k] +
              3 * h_ / 8 *
                  (e[2][k] * N[last - 3].comp[i][k] + 3 * e[1][k] * N[last - 2].comp[i][k] +
                   3 * e[0][k] * N[last - 1].comp[i][k] + N[last].comp[i][k]);
    }
    if (r.index % 2 == 0) {
      r.r_even_prev = std::move(r.r_even);
      r.r_even = replayed;
    }
    // q̃₀ e^{-ν|k|² (t - t₀)} + replayed integral versus the stored state.
    const double elapsed = first ? 0.0 : s.t - records_.front().t;
    double err = 0.0;
    const int n = grid_.n();
    const auto kw = grid_.wavenumbers();
    for (int cz = 0; cz < n; ++cz)
      for (int cy = 0; cy < n; ++cy)
        for (int cx = 0; cx < n; ++cx) {
          const std::size_t k = grid_.index(cx, cy, cz);
          const double kk = kw[cx] * kw[cx] + kw[cy] * kw[cy] + kw[cz] * kw[cz];
          const double decay = std::exp(-params_.nu * kk * elapsed);
          double d = 0.0;
          for (int i = 0; i < 3; ++i)
            d += std::norm(decay * q0_.comp[i][k] + replayed.comp[i][k] - s.u.comp[i][k]);
          err = std::max(err, d);
        }
    const double scale = max_vector_abs(s.u);
    rec.duhamel_residual = scale > 0.0 ? std::sqrt(err) / scale : std::sqrt(err);
    rec.margins.push_back({ids::duhamel_replay, rec.duhamel_residual, opts_.duhamel_tol});
  }

  prev_t_ = s.t;
  prev_g_ = g;
  prev_work_ = work;
  prev_wgrad_ = wgrad;
  prev_kdiss_ = kdiss;
  prev_c_ = c;
  records_.push_back(std::move(rec));
}

AuditReport Auditor::finish() const {
  AuditReport report;
  report.records = records_;
  report.C = opts_.C;
  report.config = {{"fluid.nu", std::to_string(params_.nu)},
                   {"audit.constant_C", std::to_string(opts_.C)},
                   {"audit.pairs", std::to_string(opts_.pairs.size())}};
  const double c0 = records_.empty() ? 0.0 : records_.back().C0;
  report.constants = compute_K(params_.nu, opts_.C, c0);
  report.add({ids::contraction_constant,
              report.constants.contractive ? report.constants.K
                                           : std::numeric_limits<double>::infinity(),
              8.0 / 7.0});
  report.summarize();
  return report;
}

PressureAudit audit_pressure(const FlowState& s, const SpectralVector& forcing, bool dealias) {
  const Grid3& g = s.grid();
  PressureAudit out;
  const auto p = flow::pressure_from_velocity(s, forcing, dealias);
  out.norm = spectral::norm_l2(p);
  const double e = flow::energy(s), grad = flow::gradient_energy(s);
  out.l2 = {ids::pressure_l2, out.norm, 3 * std::pow(grad, 0.75) * std::pow(e, 0.25)};

  // FT|q|² and its k-gradient.
  const auto q = spectral::to_physical(s.u);
  ScalarField q2(g);
  for (int i = 0; i < 3; ++i) simd::accumulate_product(q2.values, q.comp[i], q.comp[i]);
  const auto q2hat = spectral::to_spectral(q2);
  std::vector<double> grad_q2(g.size(), 0.0), grad_p(g.size(), 0.0), grad_f(g.size(), 0.0);
  auto add_moments = [](const ScalarField& f, std::vector<double>& acc) {
    for (const auto& part : spectral::moment_transforms(f, 1))
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::norm(part.coeffs[i]);
  };
  add_moments(q2, grad_q2);
  add_moments(spectral::to_physical(p), grad_p);
  const auto f = spectral::to_physical(forcing);
  for (int i = 0; i < 3; ++i) add_moments(f.component(i), grad_f);

  const int n = g.n();
  const auto kw = g.wavenumbers();
  double best = std::numeric_limits<double>::infinity();
  out.gradient = {ids::pressure_gradient, 0.0, 0.0};
  for (int c = 0; c < n; ++c)
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) {
        const std::size_t i = g.index(a, b, c);
        const double kn = std::sqrt(kw[a] * kw[a] + kw[b] * kw[b] + kw[c] * kw[c]);
        if (kn == 0.0) continue;
        const double fabs = std::sqrt(std::norm(forcing.comp[0][i]) + std::norm(forcing.comp[1][i]) +
                                      std::norm(forcing.comp[2][i]));
        const double rhs = std::abs(q2hat.coeffs[i]) / kn + fabs / (kn * kn) +
                           std::sqrt(grad_f[i]) / kn + 3 * std::sqrt(grad_q2[i]);
        const double lhs = std::sqrt(grad_p[i]);
        if (rhs - lhs < best) {
          best = rhs - lhs;
          out.gradient = {ids::pressure_gradient, lhs, rhs};
        }
      }
  return out;
}

AuditReport audit_history(const std::vector<FlowState>& history, const ForcingSpec& f, double nu,
                          AuditOptions opts) {
  if (history.empty()) throw InvalidInput("audit needs a nonempty history");
  const Grid3& g = history.front().grid();
  FluidParams p;
  p.nu = nu;
  p.t_end = history.back().t;
  p.dt = history.size() > 1 ? history[1].t - history[0].t : 1.0;
  Auditor auditor(g, p, f, std::move(opts));
  for (const auto& s : history) auditor.observe(s);
  return auditor.finish();
}

EnergyAudit audit_energy(const std::vector<FlowState>& history, const ForcingSpec& f, double nu) {
  const auto report = audit_history(history, f, nu);
  EnergyAudit out;
  for (const auto& r : report.records) {
    out.margins.push_back(r.margin(ids::energy_inequality).margin());
    out.balance.push_back(r.balance_residual);
  }
  return out;
}

std::array<double, 3> compute_C(const std::vector<FlowState>& history, const ForcingSpec& f,
                                double nu) {
  const auto report = audit_history(history, f, nu);
  const auto& last = report.records.back();
  return {last.C0, last.C2, last.C4};
}

std::vector<std::vector<double>> difference_bound_audit(const std::vector<FlowState>& history,
                                                        const ForcingSpec& f, double nu,
                                                        const std::vector<PairSpec>& pairs) {
  AuditOptions opts;
  opts.pairs = pairs;
  const auto report = audit_history(history, f, nu, opts);
  std::vector<std::vector<double>> out;
  for (const auto& r : report.records) out.push_back(r.pair_margins);
  return out;
}

double duhamel_residual(const std::vector<FlowState>& history, const ForcingSpec& f, double nu) {
  if (history.size() < 3) throw InvalidInput("Duhamel replay needs at least 3 stored states");
  return audit_history(history, f, nu).records.back().duhamel_residual;
}

std::array<ScalarField, 3> scale_to_potentials(const FlowState& s, double dissipation, double A0) {
  const double denom = dissipation + A0 + 1.0;
  if (!(denom >= 1.0)) throw InvalidInput("potential scaling denominator must be >= 1");
  const auto q = spectral::to_physical(s.u);
  std::array<ScalarField, 3> out{q.component(0), q.component(1), q.component(2)};
  for (auto& c : out)
    for (double& v : c.values) v /= denom;
  return out;
}

}  // namespace nsaudit::audit
