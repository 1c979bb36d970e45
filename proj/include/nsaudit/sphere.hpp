#pragma once

#include <vector>

#include "nsaudit/grid.hpp"

namespace nsaudit {

// Quadrature on the unit sphere. Weights sum to 4π.
struct SphereRule {
  std::vector<Vec3> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// Lebedev rules with 6, 14, 26 or 50 nodes (exact through spherical
// harmonic degree 3, 5, 7 and 11). Throws InvalidInput for other counts.
SphereRule lebedev(int points);

// Equal-weight spherical Fibonacci lattice; a dense reference rule.
SphereRule fibonacci_sphere(int points);

}  // namespace nsaudit
