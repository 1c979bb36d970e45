#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nsaudit/errors.hpp"
#include "nsaudit/parallel.hpp"
#include "nsaudit/scattering.hpp"

namespace nsaudit::scatter {

namespace {

KSphereField apply_TD(const AmplitudeTable& A, const KSphereField& g, const NeumannOptions& o) {
  return cauchy_in_k(A, op_D(A, g, o.c, o.x), KSide::minus);
}

double sup_diff(const KSphereField& a, const KSphereField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Polynomial through (z_i, v_i) evaluated at z = 0 (Neville).
double richardson_at_zero(const std::vector<double>& z, std::vector<double> v) {
  const std::size_t n = z.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      v[i] = (z[i + m] * v[i] - z[i] * v[i + 1]) / (z[i + m] - z[i]);
  return v[0];
}

}  // namespace

NeumannResult neumann_solve(const AmplitudeTable& A, const KSphereField& rhs,
                            const NeumannOptions& opts) {
  if (rhs.size() != A.nk() * A.ns()) throw InvalidInput("neumann_solve: rhs shape mismatch");
  NeumannResult r;
  r.g = rhs;
  std::vector<double> incs;
  for (int it = 1; it <= opts.n_max; ++it) {
    KSphereField next = apply_TD(A, r.g, opts);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += rhs[i];
    const double inc = sup_diff(next, r.g);
    r.g = std::move(next);
    r.iterations = it;
    r.increment = inc;
    if (!std::isfinite(inc))
      throw NotContractive("Neumann iteration overflowed after " + std::to_string(it) + " steps");
    incs.push_back(inc);
    if (inc < opts.tol) {
      r.converged = true;
      return r;
    }
    // clearly geometric growth: stop early
    if (incs.size() > 8 && inc > 1e8 * incs.front() && inc > incs[incs.size() - 2])
      throw NotContractive("Neumann increments grew from " + std::to_string(incs.front()) + " to " +
                           std::to_string(inc));
  }
  if (incs.size() >= 2 && incs.back() >= incs[incs.size() - 2])
    throw NotContractive("Neumann iteration hit n_max = " + std::to_string(opts.n_max) +
                         " with growing increments (last " + std::to_string(incs.back()) + ")");
  return r;
}

KSphereField neumann_solve_dense(const AmplitudeTable& A, const KSphereField& rhs,
                                 const NeumannOptions& opts) {
  const std::size_t N = A.nk() * A.ns();
  if (rhs.size() != N) throw InvalidInput("neumann_solve_dense: rhs shape mismatch");
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(2 * N, 2 * N);
  std::vector<KSphereField> cols(2 * N);
  parallel_for(2 * N, [&](std::size_t c) {
    KSphereField e(N, cplx{});
    e[c / 2] = (c % 2 == 0) ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    cols[c] = apply_TD(A, e, opts);
  });
  for (std::size_t c = 0; c < 2 * N; ++c)
    for (std::size_t i = 0; i < N; ++i) {
      M(2 * i, c) -= cols[c][i].real();
      M(2 * i + 1, c) -= cols[c][i].imag();
    }
  Eigen::VectorXd b(2 * N);
  for (std::size_t i = 0; i < N; ++i) {
    b(2 * i) = rhs[i].real();
    b(2 * i + 1) = rhs[i].imag();
  }
  const Eigen::VectorXd x = M.partialPivLu().solve(b);
  KSphereField g(N);
  for (std::size_t i = 0; i < N; ++i) g[i] = {x(2 * i), x(2 * i + 1)};
  return g;
}

Blaschke no_bound_states() {
  return [](double) { return cplx(1.0); };
}

NeumannResult mu_minus(const AmplitudeTable& A, const Vec3& x, const NeumannOptions& opts) {
  NeumannOptions o = opts;
  o.x = x;
  const KSphereField one(A.nk() * A.ns(), cplx(1.0));
  return neumann_solve(A, apply_TD(A, one, o), o);
}

std::vector<cplx> wavefunction_minus(const AmplitudeTable& A, const Blaschke& delta, const Vec3& x,
                                     double z, const NeumannOptions& opts) {
  if (!(z > 0.0)) throw InvalidInput("wavefunction_minus needs z > 0");
  const std::size_t ik = A.nearest_k(std::sqrt(z));
  const auto mu = mu_minus(A, x, opts);
  const double kv = A.k[ik];
  const cplx d = delta(kv);
  std::vector<cplx> psi(A.ns());
  for (std::size_t j = 0; j < A.ns(); ++j)
    psi[j] = std::polar(1.0, kv * dot(A.sphere.nodes[j], x)) * (1.0 + mu.g[ik * A.ns() + j] / d);
  return psi;
}

Reconstruction reconstruct_potential(const AmplitudeTable& A, const Blaschke& delta,
                                     const TargetGrid& targets, const std::vector<double>& z,
                                     const NeumannOptions& opts) {
  if (z.size() < 3) throw InvalidInput("reconstruction needs at least three energies");
  if (targets.n < 1 || !(targets.spacing > 0.0)) throw InvalidInput("bad target grid");
  const std::size_t ns = A.ns();
  Reconstruction rec;
  rec.targets = targets;
  std::vector<std::size_t> kidx;
  for (double zi : z) {
    if (!(zi > 0.0)) throw InvalidInput("energies must be positive");
    const std::size_t ik = A.nearest_k(std::sqrt(zi));
    if (std::find(kidx.begin(), kidx.end(), ik) != kidx.end())
      throw InvalidInput("two energies map to the same table k");
    kidx.push_back(ik);
    rec.z.push_back(A.k[ik] * A.k[ik]);
  }
  const std::size_t nz = z.size();

  // Ψ₋ on the targets plus a one-point halo, per (z, θ).
  const int h = targets.n + 2;
  const std::size_t nh = static_cast<std::size_t>(h) * h * h;
  auto hidx = [h](int i, int j, int l) { return (static_cast<std::size_t>(l) * h + j) * h + i; };
  auto hpoint = [&](std::size_t p) {
    const int i = int(p % h), j = int((p / h) % h), l = int(p / (std::size_t(h) * h));
    return targets.point(i - 1, j - 1, l - 1);
  };
  std::vector<cplx> psi(nh * nz * ns), mu_part(nh * nz * ns);
  std::vector<int> iters(nh);
  parallel_for(nh, [&](std::size_t p) {
    const Vec3 x = hpoint(p);
    const auto mu = mu_minus(A, x, opts);
    iters[p] = mu.iterations;
    for (std::size_t a = 0; a < nz; ++a) {
      const double kv = A.k[kidx[a]];
      const cplx d = delta(kv);
      for (std::size_t j = 0; j < ns; ++j) {
        const cplx phase = std::polar(1.0, kv * dot(A.sphere.nodes[j], x));
        const cplx m = mu.g[kidx[a] * ns + j] / d;
        psi[(p * nz + a) * ns + j] = phase * (1.0 + m);
        mu_part[(p * nz + a) * ns + j] = phase * m;
      }
    }
  });
  rec.max_iterations = *std::max_element(iters.begin(), iters.end());

  const int n = targets.n;
  const std::size_t nt = targets.size();
  const double inv_h2 = 1.0 / (targets.spacing * targets.spacing);
  rec.primary.assign(nt, 0.0);
  rec.literal.assign(nt, 0.0);
  rec.flagged.assign(nt, false);
  rec.primary_by_z.assign(nz, std::vector<double>(nt, 0.0));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t t = (static_cast<std::size_t>(l) * n + j) * n + i;
        const std::size_t c = hidx(i + 1, j + 1, l + 1);
        const std::size_t nb[6] = {hidx(i, j + 1, l + 1), hidx(i + 2, j + 1, l + 1),
                                   hidx(i + 1, j, l + 1), hidx(i + 1, j + 2, l + 1),
                                   hidx(i + 1, j + 1, l), hidx(i + 1, j + 1, l + 2)};
        std::vector<double> prim(nz), lit(nz);
        bool node = false;
        for (std::size_t a = 0; a < nz; ++a) {
          cplx ratio{}, num{}, den{};
          for (std::size_t s = 0; s < ns; ++s) {
            auto at = [&](std::size_t p) { return psi[(p * nz + a) * ns + s]; };
            const cplx centre = at(c);
            if (std::abs(centre) < 1e-6) node = true;
            cplx lap = -6.0 * centre;
            for (std::size_t b : nb) {
              if (std::abs(at(b)) < 1e-6) node = true;
              lap += at(b);
            }
            lap *= inv_h2;
            const double w = A.sphere.weights[s] / (4 * std::numbers::pi);
            ratio += w * (lap + rec.z[a] * centre) / centre;
            const cplx phase = std::polar(1.0, A.k[kidx[a]] * dot(A.sphere.nodes[s], hpoint(c)));
            num += A.sphere.weights[s] * rec.z[a] * mu_part[(c * nz + a) * ns + s];
            den += A.sphere.weights[s] * (mu_part[(c * nz + a) * ns + s] + phase);
          }
          prim[a] = ratio.real();
          lit[a] = (num / den).real();
          rec.primary_by_z[a][t] = prim[a];
        }
        rec.flagged[t] = node;
        rec.primary[t] = node ? nan : richardson_at_zero(rec.z, prim);
        rec.literal[t] = node ? nan : richardson_at_zero(rec.z, lit);
      }
  return rec;
}

}  // namespace nsaudit::scatter
