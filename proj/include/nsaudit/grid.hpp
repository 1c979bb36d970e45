#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace nsaudit {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

// Periodic cube [0, L)^3 with n points per axis. Linear index has the
// first axis fastest: idx = i + n * (j + n * k).
class Grid3 {
 public:
  // Throws InvalidInput unless n >= 8, n even and L > 0.
  Grid3(int n, double length);

  int n() const { return n_; }
  double length() const { return length_; }
  double dx() const { return length_ / n_; }
  double cell_volume() const { return dx() * dx() * dx(); }
  // Spacing of the wavenumber lattice, 2π/L.
  double dk() const { return 2.0 * std::numbers::pi / length_; }
  std::size_t size() const {
    return static_cast<std::size_t>(n_) * n_ * n_;
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_) * (static_cast<std::size_t>(j) +
                                           static_cast<std::size_t>(n_) * k);
  }
  // Signed mode number for FFT slot i, in [-n/2, n/2 - 1].
  int mode(int i) const { return i < n_ / 2 ? i : i - n_; }
  double wavenumber(int i) const { return dk() * mode(i); }
  Vec3 wavevector(int i, int j, int k) const {
    return {wavenumber(i), wavenumber(j), wavenumber(k)};
  }
  // FFT slot holding signed mode m (taken modulo n).
  int slot(int m) const { return ((m % n_) + n_) % n_; }
  Vec3 point(int i, int j, int k) const { return {i * dx(), j * dx(), k * dx()}; }
  Vec3 center() const { return {length_ / 2, length_ / 2, length_ / 2}; }
  // Largest resolved |k_i|.
  double nyquist() const { return dk() * (n_ / 2); }
  bool is_nyquist(int i) const { return i == n_ / 2; }

  // Per-slot tables, length n.
  std::vector<double> wavenumbers() const;
  // Offset x - c along one axis for each slot.
  std::vector<double> centered_coordinates() const;

  bool operator==(const Grid3&) const = default;

 private:
  int n_;
  double length_;
};

}  // namespace nsaudit
