#pragma once

// Littlewood-Paley decomposition with frequency ratio 1.01.
//
// Scale z has frequency lambda_z = 1.01^z. With the smooth step phi
// (phi = 1 on [0,1], 0 beyond 2) the band symbol is
//   psi_z(xi) = phi(|xi| / lambda_z) - phi(|xi| / lambda_{z-1}),
// supported in lambda_z / 1.01 < |xi| < 2 lambda_z. Consecutive symbols
// telescope, so a band [a, b] sums to phi(|xi|/lambda_b) - phi(|xi|/lambda_{a-1}).

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "gkdv/spectral.hpp"

namespace gkdv {

inline constexpr double kScaleRatio = 1.01;

/// 1.01^z, built once by repeated multiplication (division for z < 0) from 1.
/// Valid for |z| <= kMaxExponent.
double scale_lambda(int z);
inline constexpr int kMaxExponent = 4000;

/// Largest z with 1.01^z <= value (value > 0).
int floor_exponent(double value);
/// Smallest z with 1.01^z >= value (value > 0).
int ceil_exponent(double value);

struct LPScale {
  int exponent = 0;
  double lambda() const { return scale_lambda(exponent); }
};

/// Inclusive range of scale exponents.
struct Band {
  int lo = 0;
  int hi = -1;
  bool empty() const { return hi < lo; }
  std::size_t size() const { return empty() ? 0 : static_cast<std::size_t>(hi - lo + 1); }
  bool contains(int z) const { return z >= lo && z <= hi; }
  bool operator==(const Band&) const = default;
};

/// Scales whose symbols together cover every nonzero resolved frequency:
/// lambda_{lo-1} <= dxi/2 and lambda_hi >= pi N / L.
Band default_band(const GridSpec& g);

/// The smooth step profile.
double bump(double s);
double psi_symbol(int z, double xi);
/// Symbols of P_{<=lambda} and P_{<lambda}; both vanish at xi = 0 (homogeneous
/// convention: the mean is not part of any band).
double leq_symbol(int z, double xi);
double lt_symbol(int z, double xi);

/// Nonzero part of a band symbol on a grid: weights for modes first..first+size-1.
struct BandSymbol {
  std::size_t first = 0;
  std::vector<double> weights;
  bool empty() const { return weights.empty(); }
};

/// Cached per (L, N, z). Thread-safe.
std::shared_ptr<const BandSymbol> band_symbol(const GridSpec& g, int z);

Spectrum project(const Spectrum& s, int z);
Field project(const Field& f, int z);
Field project(const Field& f, LPScale scale);
Spectrum project_leq(const Spectrum& s, int z);
Field project_leq(const Field& f, int z);
Spectrum project_lt(const Spectrum& s, int z);
Field project_lt(const Field& f, int z);
/// Applies P_z to every snapshot.
Path project(const Path& p, int z);

struct LPPiece {
  LPScale scale;
  Field field;
};
std::vector<LPPiece> decompose(const Field& f, const Band& band);

/// ||P_z f||_{L^2}^2 for every z in the band, computed on the coefficients.
std::vector<double> band_energies(const Spectrum& s, const Band& band);

/// Fraction of ||f||^2 not reproduced by the band's partial sum
/// (mean mode plus frequencies outside the covered range).
double out_of_band_fraction(const Spectrum& s, const Band& band);

/// True when the support of psi_z meets the resolved frequencies of g.
bool band_resolved(const GridSpec& g, int z);

struct CoverageRow {
  int exponent;
  double lambda;
  double fraction;
};
std::vector<CoverageRow> band_coverage(const Field& f, const Band& band);

}  // namespace gkdv
