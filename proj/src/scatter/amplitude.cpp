#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsaudit/errors.hpp"
#include "nsaudit/line.hpp"
#include "nsaudit/parallel.hpp"
#include "nsaudit/quadrature.hpp"
#include "nsaudit/scattering.hpp"

namespace nsaudit::scatter {

using std::numbers::pi;

SphereRule sphere_grid(int points) {
  SphereRule s = lebedev(points);
  double wsum = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    wsum += s.weights[j];
    if (std::abs(norm(s.nodes[j]) - 1.0) > 1e-14) throw NumericalError("sphere node off the unit sphere");
  }
  if (std::abs(wsum - 4 * pi) > 1e-12) throw NumericalError("sphere weights do not sum to 4π");
  return s;
}

PotentialSample::PotentialSample(ScalarField field, std::string name)
    : q(std::move(field)), id(std::move(name)) {
  const Grid3& g = q.grid;
  const int n = g.n();
  const Vec3 c = g.center();
  std::vector<std::pair<double, double>> radial;
  radial.reserve(g.size());
  double mass = 0.0;
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double v = q.values[g.index(i, j, l)];
        if (!std::isfinite(v)) throw InvalidInput("potential has non-finite samples");
        radial.emplace_back(norm(g.point(i, j, l) - c), std::abs(v));
        mass += std::abs(v);
      }
  std::sort(radial.begin(), radial.end());
  double acc = 0.0;
  for (const auto& [r, v] : radial) {
    acc += v;
    support_radius = r;
    if (acc >= 0.9999 * mass) break;
  }
  if (mass == 0.0) support_radius = 0.0;
  decay_warning = spectral::boundary_mass_fraction(q) >= 0.01;
}

PotentialSample gaussian_potential(const Grid3& g, double amplitude, double width,
                                   std::optional<Vec3> centre) {
  const Vec3 c = centre.value_or(g.center());
  ScalarField f(g);
  const int n = g.n();
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec3 d = g.point(i, j, l) - c;
        f.values[g.index(i, j, l)] = amplitude * std::exp(-dot(d, d) / (width * width));
      }
  return PotentialSample(std::move(f), "gaussian");
}

AmplitudeTable::AmplitudeTable(std::vector<double> kgrid, SphereRule s, int order, std::string id)
    : k(std::move(kgrid)), sphere(std::move(s)), born_order(order), potential_id(std::move(id)) {
  values.assign(k.size() * sphere.size() * sphere.size(), cplx{});
}

double AmplitudeTable::kmax() const {
  if (k.empty()) return 0.0;
  // k.back() = (n_k - 1/2) Δk
  return k.back() + 0.5 * k.back() / (k.size() - 0.5);
}

std::size_t AmplitudeTable::nearest_k(double kv) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < k.size(); ++i)
    if (std::abs(k[i] - kv) < std::abs(k[best] - kv)) best = i;
  return best;
}

std::size_t AmplitudeTable::k_index(double kv) const {
  const std::size_t i = nearest_k(kv);
  if (k.empty() || std::abs(k[i] - kv) > 1e-12 * std::max(1.0, kmax()))
    throw InvalidInput("k = " + std::to_string(kv) + " is not on the table grid");
  return i;
}

std::vector<double> k_grid(int nk, double kmax) {
  if (nk < 1 || !(kmax > 0.0)) throw InvalidInput("k grid needs n_k >= 1 and k_max > 0");
  std::vector<double> k(nk);
  for (int j = 0; j < nk; ++j) k[j] = (j + 0.5) * kmax / nk;
  return k;
}

double resolvable_k(const Grid3& g) { return g.dk() * g.n() / 3.0; }

cplx born_amplitude(const PotentialSample& q, double k, const Vec3& theta_out,
                    const Vec3& theta_in) {
  if (!(k > 0.0) || k >= resolvable_k(q.q.grid))
    throw InvalidInput("k = " + std::to_string(k) + " outside the resolvable range");
  return -spectral::transform_at(q.q, k * (theta_in - theta_out)) / (4 * pi);
}

namespace {

// FFT of the outgoing kernel times dx³ on the doubled grid.
std::vector<cplx> kernel_transform(const Grid3& g, const Grid3& pad, double k) {
  const int P = pad.n();
  const double dx = g.dx(), dv = g.cell_volume();
  std::vector<cplx> K(pad.size());
  const cplx centre = -quad::cube_mean_helmholtz(k, dx) / (4 * pi) * dv;
  for (int l = 0; l < P; ++l)
    for (int j = 0; j < P; ++j)
      for (int i = 0; i < P; ++i) {
        const double r = dx * std::sqrt(double(pad.mode(i)) * pad.mode(i) +
                                        double(pad.mode(j)) * pad.mode(j) +
                                        double(pad.mode(l)) * pad.mode(l));
        K[pad.index(i, j, l)] = r == 0.0 ? centre : -std::polar(1.0, k * r) / (4 * pi * r) * dv;
      }
  spectral::fft_inplace(pad, K, -1);
  return K;
}

}  // namespace

AmplitudeTable born_series_amplitude(const PotentialSample& q, const std::vector<double>& kgrid,
                                     const SphereRule& sphere, int M, BornOptions opts) {
  if (M < 1) throw InvalidInput("Born order must be >= 1");
  AmplitudeTable A(kgrid, sphere, M, q.id);
  const std::size_t nk = A.nk(), ns = A.ns();
  for (double kv : kgrid)
    if (!(kv > 0.0) || kv >= resolvable_k(q.q.grid))
      throw InvalidInput("table k = " + std::to_string(kv) + " outside the resolvable range");
  if (opts.warn_rollnik) {
    const double heuristic = rollnik_norm(q, RollnikMethod::spectral).spectral / (16 * pi * pi);
    if (heuristic >= 1.0)
      A.warnings.push_back("Rollnik/(4π)² = " + std::to_string(heuristic) +
                           " >= 1: the Born series may not converge");
  }

  parallel_for(nk * ns * ns, [&](std::size_t e) {
    const std::size_t in = e % ns, out = (e / ns) % ns, ik = e / (ns * ns);
    A.values[e] = born_amplitude(q, kgrid[ik], sphere.nodes[out], sphere.nodes[in]);
  });
  if (M == 1) return A;

  const Grid3& g = q.q.grid;
  const int n = g.n();
  const Grid3 pad(2 * n, 2 * g.length());
  const double dv = g.cell_volume();
  const double scale = 1.0 / static_cast<double>(pad.size());
  for (std::size_t ik = 0; ik < nk; ++ik) {
    const double kv = kgrid[ik];
    const auto K = kernel_transform(g, pad, kv);
    // plane waves e^{ikθ_j·x}
    std::vector<std::vector<cplx>> plane(ns, std::vector<cplx>(g.size()));
    parallel_for(ns, [&](std::size_t s) {
      for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i)
            plane[s][g.index(i, j, l)] = std::polar(1.0, kv * dot(sphere.nodes[s], g.point(i, j, l)));
    });
    std::vector<std::vector<cplx>> corr(ns);
    parallel_for(ns, [&](std::size_t in) {
      const std::vector<cplx>& phi = plane[in];
      std::vector<cplx> psi = phi, buf(pad.size());
      double prev_inc = 0.0;
      int growth = 0;
      for (int m = 1; m < M; ++m) {
        std::fill(buf.begin(), buf.end(), cplx{});
        for (int l = 0; l < n; ++l)
          for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
              buf[pad.index(i, j, l)] = q.q.values[g.index(i, j, l)] * psi[g.index(i, j, l)];
        spectral::fft_inplace(pad, buf, -1);
        for (std::size_t t = 0; t < buf.size(); ++t) buf[t] *= K[t];
        spectral::fft_inplace(pad, buf, +1);
        double inc = 0.0;
        for (int l = 0; l < n; ++l)
          for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
              const std::size_t a = g.index(i, j, l);
              const cplx next = phi[a] + buf[pad.index(i, j, l)] * scale;
              inc = std::max(inc, std::abs(next - psi[a]));
              psi[a] = next;
            }
        if (!std::isfinite(inc)) throw NotContractive("Born series overflowed at order " + std::to_string(m + 1));
        growth = (m > 1 && inc > prev_inc) ? growth + 1 : 0;
        if (growth >= 2)
          throw NotContractive("Born series increments grew twice in a row at order " +
                               std::to_string(m + 1));
        prev_inc = inc;
      }
      // scattered part times q, ready to contract against e^{-ikθ′·x}
      std::vector<cplx> src(g.size());
      for (std::size_t a = 0; a < g.size(); ++a) src[a] = q.q.values[a] * (psi[a] - phi[a]) * dv;
      corr[in] = std::move(src);
    });
    parallel_for(ns * ns, [&](std::size_t e) {
      const std::size_t in = e % ns, out = e / ns;
      cplx sum{};
      for (std::size_t a = 0; a < g.size(); ++a) sum += corr[in][a] * std::conj(plane[out][a]);
      A.at(ik, out, in) += -sum / (4 * pi);
    });
  }
  return A;
}

cplx op_N(const AmplitudeTable& A, double k, std::size_t theta) {
  const std::size_t ik = A.k_index(k);
  cplx s{};
  for (std::size_t j = 0; j < A.ns(); ++j) s += A.sphere.weights[j] * A.at(ik, j, theta);
  return s;
}

KSphereField op_D(const AmplitudeTable& A, const KSphereField& f, cplx c,
                  const std::optional<Vec3>& x) {
  const std::size_t nk = A.nk(), ns = A.ns();
  if (f.size() != nk * ns) throw InvalidInput("op_D: field shape does not match the table");
  KSphereField out(nk * ns);
  std::vector<cplx> ph(ns, cplx(1.0));
  for (std::size_t ik = 0; ik < nk; ++ik) {
    const double kv = A.k[ik];
    if (x)
      for (std::size_t j = 0; j < ns; ++j) ph[j] = std::polar(1.0, kv * dot(A.sphere.nodes[j], *x));
    for (std::size_t in = 0; in < ns; ++in) {
      cplx s{};
      for (std::size_t j = 0; j < ns; ++j)
        s += A.sphere.weights[j] * A.at(ik, j, in) * ph[j] * f[ik * ns + j];
      out[ik * ns + in] = c * kv * s * std::conj(ph[in]);
    }
  }
  return out;
}

double op_D_norm(const AmplitudeTable& A, cplx c) {
  double best = 0.0;
  for (std::size_t ik = 0; ik < A.nk(); ++ik)
    for (std::size_t in = 0; in < A.ns(); ++in) {
      double s = 0.0;
      for (std::size_t j = 0; j < A.ns(); ++j) s += A.sphere.weights[j] * std::abs(A.at(ik, j, in));
      best = std::max(best, std::abs(c) * A.k[ik] * s);
    }
  return best;
}

namespace {

struct KLine {
  int m = 0;
  double S = 0.0;
  std::vector<double> taper;  // per table k
};

KLine k_line(const AmplitudeTable& A) {
  KLine L;
  const std::size_t nk = A.nk();
  int m = 64;
  while (m < static_cast<int>(4 * nk)) m *= 2;
  L.m = m;
  const double dk = A.kmax() / nk;
  L.S = 0.5 * m * dk;
  L.taper.resize(nk);
  const double kmax = A.kmax(), k0 = 0.75 * kmax;
  for (std::size_t i = 0; i < nk; ++i) {
    const double kv = A.k[i];
    const double c = kv <= k0 ? 1.0 : std::cos(0.5 * pi * (kv - k0) / (kmax - k0));
    L.taper[i] = c * c;
  }
  return L;
}

line::LineFunction extend(const KLine& L, const std::vector<cplx>& positive) {
  std::vector<cplx> v(L.m, cplx{});
  const int half = L.m / 2;
  for (std::size_t i = 0; i < positive.size(); ++i) {
    const cplx a = L.taper[i] * positive[i];
    v[half + i] = a;
    v[half - 1 - i] = std::conj(a);
  }
  return line::LineFunction(L.S, std::move(v), true);
}

line::Side to_line(KSide s) {
  return s == KSide::plus ? line::Side::plus
                          : s == KSide::minus ? line::Side::minus : line::Side::principal;
}

}  // namespace

KSphereField cauchy_in_k(const AmplitudeTable& A, const KSphereField& f, KSide side) {
  const std::size_t nk = A.nk(), ns = A.ns();
  if (f.size() != nk * ns) throw InvalidInput("cauchy_in_k: field shape does not match the table");
  const KLine L = k_line(A);
  KSphereField out(nk * ns);
  std::vector<cplx> pos(nk);
  for (std::size_t j = 0; j < ns; ++j) {
    for (std::size_t ik = 0; ik < nk; ++ik) pos[ik] = f[ik * ns + j];
    const auto t = line::cauchy_project(extend(L, pos), to_line(side));
    for (std::size_t ik = 0; ik < nk; ++ik) out[ik * ns + j] = t.value(L.m / 2 + int(ik));
  }
  return out;
}

double ta_norm(const AmplitudeTable& A) {
  const std::size_t nk = A.nk(), ns = A.ns();
  const KLine L = k_line(A);
  std::vector<double> best(ns * ns, 0.0);
  parallel_for(ns * ns, [&](std::size_t e) {
    const std::size_t in = e % ns, out = e / ns;
    std::vector<cplx> pos(nk);
    for (std::size_t ik = 0; ik < nk; ++ik) pos[ik] = A.at(ik, out, in);
    const auto a = extend(L, pos);
    const auto t = line::cauchy_project(a, line::Side::principal);
    double b = 0.0;
    for (int j = 0; j < L.m; ++j) b = std::max(b, std::abs(t.value(j)) + std::abs(a.value(j)));
    best[e] = b;
  });
  return best.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
}

double optical_residual(const AmplitudeTable& A) {
  double worst = 0.0;
  for (std::size_t ik = 0; ik < A.nk(); ++ik)
    for (std::size_t in = 0; in < A.ns(); ++in) {
      double flux = 0.0;
      for (std::size_t j = 0; j < A.ns(); ++j) flux += A.sphere.weights[j] * std::norm(A.at(ik, j, in));
      worst = std::max(worst, std::abs(A.at(ik, in, in).imag() - A.k[ik] / (4 * pi) * flux));
    }
  return worst;
}

}  // namespace nsaudit::scatter
