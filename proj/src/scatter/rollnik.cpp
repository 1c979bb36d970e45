#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nsaudit/errors.hpp"
#include "nsaudit/parallel.hpp"
#include "nsaudit/quadrature.hpp"
#include "nsaudit/scattering.hpp"
#include "nsaudit/simd.hpp"

namespace nsaudit::scatter {

using std::numbers::pi;

double RollnikValue::gap() const {
  const double m = std::max(std::abs(direct), std::abs(spectral));
  return m == 0.0 ? 0.0 : std::abs(direct - spectral) / m;
}

namespace {

// Epstein zeta of the unit cubic lattice at s = 2 (analytic continuation of
// Σ' |n|^{-2}), from the theta-function split.
constexpr double lattice_zeta_2 = -8.913632917585151;

// Punctured trapezoidal sum plus the local correction -Z(2)·a·|q(x)| for
// the omitted singular point; error O(a³) for smooth q.
double rollnik_direct(const ScalarField& q, int stride) {
  const Grid3& g = q.grid;
  const int n = g.n();
  if (stride < 1 || n % stride != 0) throw InvalidInput("Rollnik stride must divide the grid size");
  const int c = n / stride;
  const double a = g.dx() * stride;
  const std::size_t N = static_cast<std::size_t>(c) * c * c;
  std::vector<double> x, y, z, w;
  x.reserve(N);
  y.reserve(N);
  z.reserve(N);
  w.reserve(N);
  for (int l = 0; l < c; ++l)
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < c; ++i) {
        const double v = std::abs(q.values[g.index(i * stride, j * stride, l * stride)]);
        if (v == 0.0) continue;
        x.push_back(i);
        y.push_back(j);
        z.push_back(l);
        w.push_back(v);
      }
  std::vector<double> part(w.size(), 0.0);
  parallel_for(w.size(), [&](std::size_t p) {
    part[p] = w[p] * (simd::inverse_square_sum(x, y, z, w, x[p], y[p], z[p]) - lattice_zeta_2 * w[p]);
  });
  double total = 0.0;
  for (double v : part) total += v;
  return total * a * a * a * a;
}

double rollnik_spectral(const ScalarField& q, int pad) {
  const Grid3& g = q.grid;
  if (pad < 1) throw InvalidInput("Rollnik pad must be >= 1");
  const int n = g.n(), P = pad * n;
  const Grid3 big(P, pad * g.length());
  ScalarField f(big);
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) f.values[big.index(i, j, l)] = std::abs(q.values[g.index(i, j, l)]);
  const auto s = spectral::to_spectral(f);
  const double dk = big.dk();
  const double origin_mean = quad::cube_mean_helmholtz(0.0, 1.0).real() / dk;
  double total = 0.0;
  for (int l = 0; l < P; ++l)
    for (int j = 0; j < P; ++j)
      for (int i = 0; i < P; ++i) {
        const double kk = norm(big.wavevector(i, j, l));
        const double w = kk == 0.0 ? origin_mean : 1.0 / kk;
        total += std::norm(s.coeffs[big.index(i, j, l)]) * w;
      }
  return total * 2 * pi * pi * dk * dk * dk / (8 * pi * pi * pi);
}

}  // namespace

RollnikValue rollnik_norm(const PotentialSample& q, RollnikMethod method, RollnikOptions opts) {
  RollnikValue v;
  const bool defaults = opts.stride == 1 && opts.pad == 2;
  if (method != RollnikMethod::spectral) {
    if (defaults && q.rollnik_direct) {
      v.direct = *q.rollnik_direct;
    } else {
      v.direct = rollnik_direct(q.q, opts.stride);
      if (defaults) q.rollnik_direct = v.direct;
    }
  }
  if (method != RollnikMethod::direct) {
    if (defaults && q.rollnik_spectral) {
      v.spectral = *q.rollnik_spectral;
    } else {
      v.spectral = rollnik_spectral(q.q, opts.pad);
      if (defaults) q.rollnik_spectral = v.spectral;
    }
  }
  return v;
}

double birman_schwinger_bound(const PotentialSample& q, RollnikOptions opts) {
  return rollnik_norm(q, RollnikMethod::direct, opts).direct / (16 * pi * pi);
}

namespace {

// y = (-Δ_h + q) v with zero Dirichlet data outside the box.
void apply_h(const Grid3& g, const std::vector<double>& q, const double* v, double* y) {
  const int n = g.n();
  const double inv = 1.0 / (g.dx() * g.dx());
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t p = g.index(i, j, l);
        double s = 6.0 * v[p];
        if (i > 0) s -= v[p - 1];
        if (i < n - 1) s -= v[p + 1];
        if (j > 0) s -= v[p - n];
        if (j < n - 1) s -= v[p + n];
        if (l > 0) s -= v[p - std::size_t(n) * n];
        if (l < n - 1) s -= v[p + std::size_t(n) * n];
        y[p] = s * inv + q[p] * v[p];
      }
}

struct Eigenpairs {
  std::vector<double> lambda;
  std::vector<std::vector<double>> vec;  // Euclidean unit vectors
};

Eigenpairs dense_negative(const Grid3& g, const std::vector<double>& q, int n_eig_max) {
  const int N = static_cast<int>(g.size());
  std::vector<double> H(static_cast<std::size_t>(N) * N, 0.0), e(N, 0.0), col(N);
  for (int c = 0; c < N; ++c) {
    e[c] = 1.0;
    apply_h(g, q, e.data(), col.data());
    e[c] = 0.0;
    for (int r = 0; r < N; ++r) H[static_cast<std::size_t>(c) * N + r] = col[r];
  }
  const double qmin = *std::min_element(q.begin(), q.end());
  const double vl = std::min(qmin, 0.0) - 1.0;
  lapack_int m = 0;
  std::vector<double> w(N), Z(static_cast<std::size_t>(N) * N);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(N));
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'V', 'U', N, H.data(), N, vl, 0.0,
                                         0, 0, 0.0, &m, w.data(), Z.data(), N, isuppz.data());
  if (info != 0) throw NumericalError("dsyevr failed with info " + std::to_string(info));
  Eigenpairs out;
  for (lapack_int i = 0; i < m && static_cast<int>(out.lambda.size()) < n_eig_max; ++i) {
    if (!(w[i] < 0.0)) continue;
    out.lambda.push_back(w[i]);
    out.vec.emplace_back(Z.begin() + static_cast<std::ptrdiff_t>(i) * N,
                         Z.begin() + static_cast<std::ptrdiff_t>(i + 1) * N);
  }
  return out;
}

void orthogonalize(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) {
      double d = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) d += b[i] * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= d * b[i];
    }
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// One Lanczos run in the complement of `locked`, full reorthogonalisation.
// Returns the converged negative Ritz pairs.
Eigenpairs lanczos_run(const Grid3& g, const std::vector<double>& q,
                       const std::vector<std::vector<double>>& locked, std::mt19937_64& rng,
                       double hnorm) {
  const std::size_t N = g.size();
  const int kmax = static_cast<int>(std::min<std::size_t>(N - locked.size(), 600));
  std::normal_distribution<double> gauss;
  std::vector<double> v(N);
  for (auto& x : v) x = gauss(rng);
  orthogonalize(v, locked);
  double nv = norm2(v);
  for (auto& x : v) x /= nv;

  std::vector<std::vector<double>> V{v};
  std::vector<double> alpha, beta;
  std::vector<double> w(N);
  Eigenpairs out;
  int prev_neg = -1;
  const double tol = 1e-10 * hnorm;
  for (int it = 0; it < kmax; ++it) {
    apply_h(g, q, V.back().data(), w.data());
    double a = 0.0;
    for (std::size_t i = 0; i < N; ++i) a += w[i] * V.back()[i];
    alpha.push_back(a);
    orthogonalize(w, locked);
    orthogonalize(w, V);
    const double b = norm2(w);

    const int k = static_cast<int>(alpha.size());
    const bool last = b < tol || k == kmax;
    if (k % 10 != 0 && !last) {
      beta.push_back(b);
      for (auto& x : w) x /= b;
      V.push_back(w);
      continue;
    }
    Eigen::VectorXd d(k), e(std::max(k - 1, 1));
    for (int i = 0; i < k; ++i) d(i) = alpha[i];
    for (int i = 0; i + 1 < k; ++i) e(i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e.head(std::max(k - 1, 0)), Eigen::ComputeEigenvectors);
    int neg = 0;
    bool all_conv = true;
    for (int i = 0; i < k; ++i) {
      if (!(es.eigenvalues()(i) < 0.0)) break;
      ++neg;
      if (std::abs(b * es.eigenvectors()(k - 1, i)) > tol) all_conv = false;
    }
    // the lowest non-negative Ritz value must have settled too, or a weakly
    // bound level can still be on its way down
    if (neg < k && std::abs(b * es.eigenvectors()(k - 1, neg)) > 100 * tol) all_conv = false;
    if (last || (all_conv && neg == prev_neg && k >= 30)) {
      for (int i = 0; i < neg; ++i) {
        if (std::abs(b * es.eigenvectors()(k - 1, i)) > tol) continue;
        std::vector<double> y(N, 0.0);
        for (int r = 0; r < k; ++r) {
          const double c = es.eigenvectors()(r, i);
          for (std::size_t p = 0; p < N; ++p) y[p] += c * V[r][p];
        }
        const double ny = norm2(y);
        for (auto& x : y) x /= ny;
        out.lambda.push_back(es.eigenvalues()(i));
        out.vec.push_back(std::move(y));
      }
      return out;
    }
    prev_neg = neg;
    beta.push_back(b);
    for (auto& x : w) x /= b;
    V.push_back(w);
  }
  return out;
}

Eigenpairs lanczos_negative(const Grid3& g, const std::vector<double>& q, int n_eig_max) {
  const double qmax = std::max(std::abs(*std::min_element(q.begin(), q.end())),
                               std::abs(*std::max_element(q.begin(), q.end())));
  const double hnorm = 12.0 / (g.dx() * g.dx()) + qmax;
  std::mt19937_64 rng(20240611);
  Eigenpairs all;
  for (int restart = 0; restart < 4 * n_eig_max + 4; ++restart) {
    if (static_cast<int>(all.lambda.size()) >= n_eig_max) break;
    const auto found = lanczos_run(g, q, all.vec, rng, hnorm);
    if (found.lambda.empty()) return all;
    for (std::size_t i = 0; i < found.lambda.size(); ++i) {
      auto y = found.vec[i];
      orthogonalize(y, all.vec);
      const double ny = norm2(y);
      if (ny < 0.5) continue;
      for (auto& x : y) x /= ny;
      all.lambda.push_back(found.lambda[i]);
      all.vec.push_back(std::move(y));
    }
  }
  if (static_cast<int>(all.lambda.size()) < n_eig_max)
    throw NumericalError("Lanczos restarts did not exhaust the negative spectrum");
  return all;
}

}  // namespace

BoundStateSet bound_states(const PotentialSample& q, int n_eig_max, EigenMethod method) {
  if (n_eig_max < 1) throw InvalidInput("n_eig_max must be >= 1");
  const Grid3& g = q.q.grid;
  if (method == EigenMethod::automatic)
    method = g.n() <= 16 ? EigenMethod::dense : EigenMethod::lanczos;
  Eigenpairs ep = method == EigenMethod::dense ? dense_negative(g, q.q.values, n_eig_max)
                                               : lanczos_negative(g, q.q.values, n_eig_max);
  std::vector<std::size_t> order(ep.lambda.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ep.lambda[a] < ep.lambda[b]; });
  if (order.size() > static_cast<std::size_t>(n_eig_max)) order.resize(n_eig_max);
  BoundStateSet out{g, {}, {}};
  const double scale = 1.0 / std::sqrt(g.cell_volume());
  for (std::size_t i : order) {
    out.E.push_back(std::sqrt(-ep.lambda[i]));
    auto psi = ep.vec[i];
    for (auto& x : psi) x *= scale;
    out.psi.push_back(std::move(psi));
  }
  return out;
}

cplx blaschke(const BoundStateSet& states, double k) {
  cplx d(1.0);
  for (double E : states.E) d *= cplx(k, E) / cplx(k, -E);
  return d;
}

Blaschke blaschke_of(const BoundStateSet& states) {
  return [E = states.E](double k) {
    cplx d(1.0);
    for (double e : E) d *= cplx(k, e) / cplx(k, -e);
    return d;
  };
}

}  // namespace nsaudit::scatter
