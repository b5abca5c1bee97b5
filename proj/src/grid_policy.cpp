#include "bsforge/grid_policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bsforge {

GridPtr grid_for_region(const RegionSpec &region, const DispersionSymbol &symbol, double lambda,
                        int dimension, const GridPolicy &policy) {
  if (!(policy.margin > 1.0) || !(policy.spacing > 0.0) || !(policy.grid_scale > 0.0)) {
    throw std::invalid_argument("grid policy needs margin > 1, spacing > 0, grid_scale > 0");
  }
  const double r0 = symbol.is_radial() ? symbol.radial_level(lambda) : 1.0;
  const double target = policy.spacing / (policy.grid_scale * r0);
  const auto c = region.center_or_origin(dimension);
  std::vector<double> lengths(dimension);
  std::vector<int> sizes(dimension);
  for (int j = 0; j < dimension; ++j) {
    const double half = std::abs(c[j]) + region.extent(dimension, j);
    const double n = std::max(1.0, std::ceil(half / target - 0.5));
    const double h = half / (n + 0.5);
    int N = static_cast<int>(std::ceil(policy.margin * 2.0 * half / h));
    N |= 1;
    sizes[j] = std::max(N, 3);
    lengths[j] = h * sizes[j];
  }
  return build_grid(dimension, lengths, sizes);
}

GridPtr kernel_grid(double eps, int dimension, double spacing, double box_factor) {
  if (!(eps > 0.0) || !(spacing > 0.0)) {
    throw std::invalid_argument("kernel grid needs eps > 0 and spacing > 0");
  }
  const double L = box_factor / eps + 1.0;
  const int N = static_cast<int>(L / spacing) | 1;
  return build_grid(dimension, std::vector<double>(dimension, L), std::vector<int>(dimension, N));
}

RegionSpec tube_region(double eps, double M, const DispersionSymbol &symbol, double lambda) {
  return knapp_region(eps, M, tube_scales(symbol, lambda));
}

} // namespace bsforge
