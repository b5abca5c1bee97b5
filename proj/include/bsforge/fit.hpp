#pragma once

#include <utility>
#include <vector>

namespace bsforge {

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0; // ln-space
  double r_squared = 0.0;
};

/// Least squares line through (ln x, ln y).
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>> &points);

} // namespace bsforge
