#pragma once

#include <string>

#include "gkdv/kernels.hpp"
#include "gkdv/littlewood_paley.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

/// Scaling-critical regularity s = 1/2 - 2/(p-1) of the power p >= 5.
struct CriticalIndex {
  double p;
  double s;
};
CriticalIndex critical_index(double p);

struct NormReport {
  std::string name;
  double s = 0.0;
  Band band;
  double value = 0.0;
  int argmax = 0;  // scale exponent of the maximizing band (sup norms)
  double argmax_lambda = 0.0;
  double out_of_band = 0.0;
};

/// sup_z lambda_z^s ||P_z f||.
NormReport besov_norm(const Field& f, double s, const Band& band);
NormReport besov_norm(const Field& f, double s);
/// (sum_z lambda_z^{2s} ||P_z f||^2)^{1/2}.
NormReport sobolev_norm(const Field& f, double s, const Band& band);
NormReport sobolev_norm(const Field& f, double s);

/// sup_z lambda_z^s ||P_z u||_{V^2_KdV}. Bands are visited in decreasing order
/// of a total-variation upper bound and skipped once the bound falls below the
/// running maximum, so the result is exact.
NormReport xs_norm(const Path& u, double s, const Band& band, kernels::Exec exec = kernels::Exec::parallel);
NormReport xs_norm(const Path& u, double s);

/// Per-band values lambda_z^s ||P_z u||_{V^2_KdV} for every band (no pruning).
std::vector<double> xs_profile(const Path& u, double s, const Band& band,
                               kernels::Exec exec = kernels::Exec::parallel);

}  // namespace gkdv
