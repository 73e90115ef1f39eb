#pragma once

// p-variation of sampled paths with values in a weighted l^2 space.
//
// The supremum runs over partitions drawn from the sample times. With the
// terminal convention a path is extended by the value 0 after its last
// sample, so a constant path v = phi has V^p norm ||phi||.

#include <cstddef>
#include <vector>

#include "gkdv/spectral.hpp"

namespace gkdv {

struct SampledPath {
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  /// ||x||^2 = weight * sum x_i^2.
  double weight = 1.0;
  bool terminal_zero = true;

  void validate() const;
  std::size_t size() const { return times.size(); }
};

/// Snapshots of a Path as vectors with the grid quadrature weight L/N.
SampledPath sampled(const Path& p, bool terminal_zero = true);

struct Partition {
  std::vector<std::size_t> indices;
};
/// Every sample index.
Partition full_partition(std::size_t n);

double vp_norm(const SampledPath& path, double p);
/// Exhaustive search over all non-empty index subsets. Only for small paths.
double vp_norm_exhaustive(const SampledPath& path, double p);

/// u(t) -> S(-t) u(t).
Path pull_back(const Path& u);
double v2_kdv_norm(const Path& u);

/// sum_k <u(t_{k-1}), v(t_k) - v(t_{k-1})> over the partition, plus the jump of
/// v to 0 after the last point when v uses the terminal convention.
double bilinear_form(const SampledPath& u, const SampledPath& v, const Partition& t);

/// max |B(u, v)| / ||v||_{V^2} over step paths v = 1_{[t_j, inf)} e, with
/// directions e drawn from the normalized samples of u. A lower bound for
/// the U^2 norm of u.
double duality_lower_bound(const SampledPath& u);
double duality_lower_bound(const Path& u);

}  // namespace gkdv
