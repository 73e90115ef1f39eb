#pragma once

#include <algorithm>
#include <cmath>

#include "gkdv/spectral.hpp"

namespace gkdv::testing {

inline GridSpec grid(double length, std::size_t points, double dt = 0.01, std::size_t steps = 10) {
  GridSpec g;
  g.length = length;
  g.points = points;
  g.dt = dt;
  g.steps = steps;
  return g;
}

inline double max_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a.values[j] - b.values[j]));
  return d;
}

inline double sup(const Field& a) { return lq_norm(a, INFINITY); }

inline double max_diff(const Path& a, const Path& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, max_diff(a.snapshots[k], b.snapshots[k]));
  return d;
}

}  // namespace gkdv::testing
