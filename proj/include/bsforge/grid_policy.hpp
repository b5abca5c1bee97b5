#pragma once

#include "bsforge/birman_schwinger.hpp"

namespace bsforge {

/// Box = margin * region extent per axis; spacing ~ spacing / (grid_scale * |xi0|) with the
/// region edges placed midway between samples.
struct GridPolicy {
  double margin = 8.0;
  double spacing = 0.35;
  double grid_scale = 1.0;
};

GridPtr grid_for_region(const RegionSpec &region, const DispersionSymbol &symbol, double lambda,
                        int dimension, const GridPolicy &policy = {});

/// Square box of side box_factor/eps (+1) with the given spacing, for kernel profiles.
GridPtr kernel_grid(double eps, int dimension, double spacing = 0.5, double box_factor = 16.0);

/// Tube T_{eps/M} scaled for energy lambda.
RegionSpec tube_region(double eps, double M, const DispersionSymbol &symbol, double lambda);

} // namespace bsforge
