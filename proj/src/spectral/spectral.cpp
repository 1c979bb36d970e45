#include "nsaudit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsaudit/errors.hpp"
#include "nsaudit/simd.hpp"

namespace nsaudit::spectral {

ScalarField::ScalarField(const Grid3& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != g.size()) throw InvalidInput("ScalarField size does not match grid");
}

SpectralScalar::SpectralScalar(const Grid3& g, std::vector<cplx> c)
    : grid(g), coeffs(std::move(c)) {
  if (coeffs.size() != g.size()) throw InvalidInput("SpectralScalar size does not match grid");
}

VectorField::VectorField(const Grid3& g) : grid(g) {
  for (auto& c : comp) c.assign(g.size(), 0.0);
}

SpectralVector::SpectralVector(const Grid3& g) : grid(g) {
  for (auto& c : comp) c.assign(g.size(), cplx{});
}

SpectralScalar to_spectral_complex(const Grid3& g, std::span<const cplx> values) {
  SpectralScalar s(g, std::vector<cplx>(values.begin(), values.end()));
  fft_inplace(g, s.coeffs, +1);
  const double v = g.cell_volume();
  for (auto& c : s.coeffs) c *= v;
  return s;
}

SpectralScalar to_spectral(const ScalarField& f) {
  std::vector<cplx> buf(f.values.begin(), f.values.end());
  return to_spectral_complex(f.grid, buf);
}

SpectralVector to_spectral(const VectorField& f) {
  SpectralVector s(f.grid);
  for (int i = 0; i < 3; ++i) s.comp[i] = to_spectral(f.component(i)).coeffs;
  return s;
}

std::vector<cplx> to_physical_complex(const SpectralScalar& s) {
  std::vector<cplx> buf = s.coeffs;
  fft_inplace(s.grid, buf, -1);
  const double scale = 1.0 / std::pow(s.grid.length(), 3);
  for (auto& c : buf) c *= scale;
  return buf;
}

namespace {

// Real parts of the inverse transforms, after checking that every imaginary
// part is below tol times the largest magnitude across all buffers.
std::vector<std::vector<double>> checked_real(const std::vector<std::vector<cplx>>& bufs, double tol) {
  double max_abs = 0.0, max_imag = 0.0;
  for (const auto& buf : bufs)
    for (const auto& c : buf) {
      max_abs = std::max(max_abs, std::abs(c));
      max_imag = std::max(max_imag, std::abs(c.imag()));
    }
  if (max_imag > tol * max_abs && max_imag > 0.0)
    throw InvalidInput("spectral data is not Hermitian: imaginary part " +
                       std::to_string(max_imag / max_abs) + " of max magnitude");
  std::vector<std::vector<double>> out;
  for (const auto& buf : bufs) {
    std::vector<double> re(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) re[i] = buf[i].real();
    out.push_back(std::move(re));
  }
  return out;
}

}  // namespace

ScalarField to_physical(const SpectralScalar& s, double tol) {
  return ScalarField(s.grid, std::move(checked_real({to_physical_complex(s)}, tol)[0]));
}

VectorField to_physical(const SpectralVector& s, double tol) {
  auto re = checked_real({to_physical_complex(s.component(0)), to_physical_complex(s.component(1)),
                          to_physical_complex(s.component(2))},
                         tol);
  VectorField f(s.grid);
  for (int i = 0; i < 3; ++i) f.comp[i] = std::move(re[i]);
  return f;
}

double hermitian_defect(const SpectralScalar& s) {
  const Grid3& g = s.grid;
  const int n = g.n();
  double max_c = 0.0, max_d = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const cplx c = s.coeffs[g.index(i, j, k)];
        const cplx m = s.coeffs[g.index((n - i) % n, (n - j) % n, (n - k) % n)];
        max_c = std::max(max_c, std::abs(c));
        max_d = std::max(max_d, std::abs(c - std::conj(m)));
      }
  return max_c > 0.0 ? max_d / max_c : 0.0;
}

SpectralScalar spectral_gradient(const SpectralScalar& s, int axis) {
  if (axis < 0 || axis > 2) throw InvalidInput("gradient axis must be 0, 1 or 2");
  const Grid3& g = s.grid;
  const int n = g.n();
  SpectralScalar out(g);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int slot = axis == 0 ? i : axis == 1 ? j : k;
        const std::size_t idx = g.index(i, j, k);
        out.coeffs[idx] =
            g.is_nyquist(slot) ? cplx{} : cplx(0.0, -g.wavenumber(slot)) * s.coeffs[idx];
      }
  return out;
}

double norm_l2(const ScalarField& f) {
  return std::sqrt(f.grid.cell_volume() * simd::sum_squares(f.values));
}

double norm_l2(const SpectralScalar& s) {
  return std::sqrt(simd::sum_abs2(s.coeffs) / std::pow(s.grid.length(), 3));
}

double norm_l2(const SpectralVector& s) {
  double sum = 0.0;
  for (const auto& c : s.comp) sum += simd::sum_abs2(c);
  return std::sqrt(sum / std::pow(s.grid.length(), 3));
}

std::vector<SpectralScalar> moment_transforms(const ScalarField& f, int m) {
  if (m != 1 && m != 2) throw InvalidInput("moment order must be 1 or 2");
  const Grid3& g = f.grid;
  const int n = g.n();
  const auto xc = g.centered_coordinates();
  auto weighted = [&](auto weight) {
    std::vector<cplx> buf(g.size());
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const std::size_t idx = g.index(i, j, k);
          buf[idx] = weight(Vec3{xc[i], xc[j], xc[k]}) * f.values[idx];
        }
    return to_spectral_complex(g, buf);
  };
  std::vector<SpectralScalar> out;
  if (m == 1) {
    for (int a = 0; a < 3; ++a)
      out.push_back(weighted([a](const Vec3& x) { return cplx(0.0, x[a]); }));
  } else {
    constexpr int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
    for (const auto& p : pairs)
      out.push_back(weighted([p](const Vec3& x) { return cplx(-x[p[0]] * x[p[1]], 0.0); }));
  }
  return out;
}

namespace {

// Accumulates the squared magnitude of the m-th derivative tensor of one
// real field into acc (off-diagonal second derivatives count twice).
void accumulate_derivative_abs2(const ScalarField& f, int m, std::vector<double>& acc) {
  if (m == 0) {
    const auto s = to_spectral(f);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::norm(s.coeffs[i]);
    return;
  }
  const auto parts = moment_transforms(f, m);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const double w = (m == 2 && p >= 3) ? 2.0 : 1.0;
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * std::norm(parts[p].coeffs[i]);
  }
}

double sqrt_max(const std::vector<double>& v) {
  return std::sqrt(*std::max_element(v.begin(), v.end()));
}

}  // namespace

std::vector<double> derivative_abs2(const VectorField& f, int m) {
  if (m < 0 || m > 2) throw InvalidInput("derivative order must be 0, 1 or 2");
  std::vector<double> acc(f.grid.size(), 0.0);
  for (int c = 0; c < 3; ++c) accumulate_derivative_abs2(f.component(c), m, acc);
  return acc;
}

double spectral_sup_physical(const ScalarField& f, int m) {
  if (m < 0 || m > 2) throw InvalidInput("spectral_sup order must be 0, 1 or 2");
  std::vector<double> acc(f.grid.size(), 0.0);
  accumulate_derivative_abs2(f, m, acc);
  return sqrt_max(acc);
}

double spectral_sup_physical(const VectorField& f, int m) {
  return sqrt_max(derivative_abs2(f, m));
}

double spectral_sup(const SpectralScalar& s, int m) {
  if (m == 0) return std::sqrt(simd::max_abs2(s.coeffs));
  return spectral_sup_physical(to_physical(s), m);
}

double spectral_sup(const SpectralVector& s, int m) {
  if (m == 0) {
    std::vector<double> acc(s.grid.size(), 0.0);
    for (const auto& c : s.comp)
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::norm(c[i]);
    return sqrt_max(acc);
  }
  return spectral_sup_physical(to_physical(s), m);
}

double boundary_mass_fraction(const ScalarField& f) {
  const Grid3& g = f.grid;
  const int n = g.n();
  const int w = std::max(1, n / 16);
  double total = 0.0, shell = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double v = f.values[g.index(i, j, k)];
        total += v * v;
        const bool edge = i < w || j < w || k < w || i >= n - w || j >= n - w || k >= n - w;
        if (edge) shell += v * v;
      }
  return total > 0.0 ? shell / total : 0.0;
}

WeightedNorm weighted_norm(const ScalarField& f, int m) {
  if (m != 1 && m != 2) throw InvalidInput("weighted_norm order must be 1 or 2");
  const Grid3& g = f.grid;
  const int n = g.n();
  const auto xc = g.centered_coordinates();
  double sum = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double r2 = xc[i] * xc[i] + xc[j] * xc[j] + xc[k] * xc[k];
        const double v = f.values[g.index(i, j, k)];
        sum += (m == 1 ? r2 : r2 * r2) * v * v;
      }
  return {sum * g.cell_volume(), boundary_mass_fraction(f) >= 0.01};
}

WeightedNorm weighted_norm(const VectorField& f, int m) {
  WeightedNorm total{0.0, false};
  for (int c = 0; c < 3; ++c) {
    const auto part = weighted_norm(f.component(c), m);
    total.value += part.value;
    total.decay_warning = total.decay_warning || part.decay_warning;
  }
  return total;
}

cplx transform_at(const ScalarField& f, const Vec3& p) {
  const Grid3& g = f.grid;
  const int n = g.n();
  std::array<std::vector<cplx>, 3> phase;
  for (int a = 0; a < 3; ++a) {
    phase[a].resize(n);
    for (int i = 0; i < n; ++i) phase[a][i] = std::polar(1.0, p[a] * i * g.dx());
  }
  cplx sum{};
  for (int k = 0; k < n; ++k) {
    cplx plane{};
    for (int j = 0; j < n; ++j) {
      cplx row{};
      const double* v = &f.values[g.index(0, j, k)];
      for (int i = 0; i < n; ++i) row += v[i] * phase[0][i];
      plane += row * phase[1][j];
    }
    sum += plane * phase[2][k];
  }
  return sum * g.cell_volume();
}

cplx interpolate(const SpectralScalar& s, const Vec3& k) {
  const Grid3& g = s.grid;
  const int half = g.n() / 2;
  std::array<int, 3> base{};
  std::array<double, 3> frac{};
  for (int a = 0; a < 3; ++a) {
    const double u = k[a] / g.dk();
    const double fl = std::floor(u);
    base[a] = static_cast<int>(fl);
    frac[a] = u - fl;
  }
  cplx sum{};
  for (int c = 0; c < 8; ++c) {
    double w = 1.0;
    std::array<int, 3> m{};
    bool inside = true;
    for (int a = 0; a < 3; ++a) {
      const int bit = (c >> a) & 1;
      m[a] = base[a] + bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
      if (m[a] < -half || m[a] > half - 1) inside = false;
    }
    if (!inside || w == 0.0) continue;
    sum += w * s.coeffs[g.index(g.slot(m[0]), g.slot(m[1]), g.slot(m[2]))];
  }
  return sum;
}

cplx shell_average(const std::function<cplx(const Vec3&)>& qt, const Vec3& k,
                   const SphereRule& rule) {
  const double kn = norm(k);
  if (!(kn > 0.0)) throw InvalidInput("shell_average needs |k| > 0");
  cplx sum{};
  for (std::size_t j = 0; j < rule.size(); ++j)
    sum += rule.weights[j] * qt(k - kn * rule.nodes[j]);
  return 0.5 * sum;
}

cplx shell_average(const SpectralScalar& s, const Vec3& k, const SphereRule& rule) {
  const double kn = norm(k);
  if (!(kn > 0.0)) throw InvalidInput("shell_average needs |k| > 0");
  if (kn > s.grid.nyquist())
    throw InvalidInput("shell_average |k| = " + std::to_string(kn) + " beyond Nyquist");
  return shell_average([&s](const Vec3& p) { return interpolate(s, p); }, k, rule);
}

}  // namespace nsaudit::spectral
