#include "nsaudit/grid.hpp"

#include <string>

#include "nsaudit/errors.hpp"

namespace nsaudit {

Grid3::Grid3(int n, double length) : n_(n), length_(length) {
  if (n < 8 || n % 2 != 0)
    throw InvalidInput("grid.n must be even and >= 8, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length))
    throw InvalidInput("grid.length must be positive and finite");
}

std::vector<double> Grid3::wavenumbers() const {
  std::vector<double> k(n_);
  for (int i = 0; i < n_; ++i) k[i] = wavenumber(i);
  return k;
}

std::vector<double> Grid3::centered_coordinates() const {
  std::vector<double> x(n_);
  for (int i = 0; i < n_; ++i) x[i] = i * dx() - length_ / 2;
  return x;
}

}  // namespace nsaudit
