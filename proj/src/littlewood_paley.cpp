#include "gkdv/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "gkdv/error.hpp"

namespace gkdv {

namespace {

const std::vector<double>& lambda_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(2 * kMaxExponent + 1);
    t[kMaxExponent] = 1.0;
    for (int z = 1; z <= kMaxExponent; ++z) {
      t[kMaxExponent + z] = t[kMaxExponent + z - 1] * kScaleRatio;
      t[kMaxExponent - z] = t[kMaxExponent - z + 1] / kScaleRatio;
    }
    return t;
  }();
  return table;
}

double step_h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

inline double mode_weight(std::size_t m, std::size_t half) { return (m == 0 || m == half) ? 1.0 : 2.0; }

}  // namespace

double scale_lambda(int z) {
  if (z < -kMaxExponent || z > kMaxExponent) throw ValidationError("scale exponent out of supported range");
  return lambda_table()[static_cast<std::size_t>(z + kMaxExponent)];
}

int floor_exponent(double value) {
  if (!(value > 0)) throw ValidationError("floor_exponent: value must be positive");
  int z = static_cast<int>(std::floor(std::log(value) / std::log(kScaleRatio)));
  while (scale_lambda(z) > value) --z;
  while (scale_lambda(z + 1) <= value) ++z;
  return z;
}

int ceil_exponent(double value) {
  int z = floor_exponent(value);
  return scale_lambda(z) < value ? z + 1 : z;
}

Band default_band(const GridSpec& g) {
  return Band{floor_exponent(0.5 * g.dxi()) + 1, ceil_exponent(g.nyquist())};
}

double bump(double s) {
  const double a = std::abs(s);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double up = step_h(2.0 - a);
  return up / (up + step_h(a - 1.0));
}

double psi_symbol(int z, double xi) {
  const double a = std::abs(xi);
  return bump(a / scale_lambda(z)) - bump(a / scale_lambda(z - 1));
}

double leq_symbol(int z, double xi) { return xi == 0.0 ? 0.0 : bump(std::abs(xi) / scale_lambda(z)); }
double lt_symbol(int z, double xi) { return xi == 0.0 ? 0.0 : bump(std::abs(xi) / scale_lambda(z - 1)); }

std::shared_ptr<const BandSymbol> band_symbol(const GridSpec& g, int z) {
  using Key = std::tuple<double, std::size_t, int>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const BandSymbol>> cache;
  const Key key{g.length, g.points, z};
  {
    std::lock_guard lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto sym = std::make_shared<BandSymbol>();
  const std::size_t half = g.points / 2;
  const double dxi = g.dxi();
  const double lo_f = std::max(1.0, std::floor(scale_lambda(z - 1) / dxi));
  const std::size_t lo = lo_f > static_cast<double>(half) ? half + 1 : static_cast<std::size_t>(lo_f);
  const double hi_f = std::ceil(2.0 * scale_lambda(z) / dxi);
  const std::size_t hi = hi_f > static_cast<double>(half) ? half : static_cast<std::size_t>(hi_f);
  std::size_t first = 0;
  std::size_t last = 0;
  bool any = false;
  std::vector<double> w;
  for (std::size_t m = lo; m <= hi && lo <= half; ++m) {
    const double v = psi_symbol(z, g.xi(m));
    if (v != 0.0) {
      if (!any) first = m;
      any = true;
      last = m;
    }
    w.push_back(v);
  }
  if (any) {
    sym->first = first;
    sym->weights.assign(w.begin() + static_cast<std::ptrdiff_t>(first - lo),
                        w.begin() + static_cast<std::ptrdiff_t>(last - lo + 1));
  }
  std::lock_guard lock(mu);
  auto [it, inserted] = cache.emplace(key, std::move(sym));
  return it->second;
}

Spectrum project(const Spectrum& s, int z) {
  Spectrum out = Spectrum::zeros(s.grid);
  const auto sym = band_symbol(s.grid, z);
  for (std::size_t i = 0; i < sym->weights.size(); ++i) {
    const std::size_t m = sym->first + i;
    out.coeffs[m] = sym->weights[i] * s.coeffs[m];
  }
  return out;
}

Field project(const Field& f, int z) { return inverse_transform(project(forward_transform(f), z)); }
Field project(const Field& f, LPScale scale) { return project(f, scale.exponent); }

Spectrum project_leq(const Spectrum& s, int z) {
  Spectrum out = s;
  for (std::size_t m = 0; m < out.coeffs.size(); ++m) out.coeffs[m] *= leq_symbol(z, s.grid.xi(m));
  return out;
}

Spectrum project_lt(const Spectrum& s, int z) {
  Spectrum out = s;
  for (std::size_t m = 0; m < out.coeffs.size(); ++m) out.coeffs[m] *= lt_symbol(z, s.grid.xi(m));
  return out;
}

Field project_leq(const Field& f, int z) { return inverse_transform(project_leq(forward_transform(f), z)); }
Field project_lt(const Field& f, int z) { return inverse_transform(project_lt(forward_transform(f), z)); }

Path project(const Path& p, int z) {
  Path out = p;
  for (auto& s : out.snapshots) s = project(s, z);
  return out;
}

std::vector<LPPiece> decompose(const Field& f, const Band& band) {
  std::vector<LPPiece> out;
  if (band.empty()) return out;
  const Spectrum s = forward_transform(f);
  out.reserve(band.size());
  for (int z = band.lo; z <= band.hi; ++z) out.push_back({LPScale{z}, inverse_transform(project(s, z))});
  return out;
}

std::vector<double> band_energies(const Spectrum& s, const Band& band) {
  std::vector<double> out(band.size(), 0.0);
  const std::size_t half = s.grid.points / 2;
  for (int z = band.lo; z <= band.hi; ++z) {
    const auto sym = band_symbol(s.grid, z);
    double acc = 0.0;
    for (std::size_t i = 0; i < sym->weights.size(); ++i) {
      const std::size_t m = sym->first + i;
      const double w = sym->weights[i];
      acc += mode_weight(m, half) * w * w * std::norm(s.coeffs[m]);
    }
    out[static_cast<std::size_t>(z - band.lo)] = s.grid.length * acc;
  }
  return out;
}

double out_of_band_fraction(const Spectrum& s, const Band& band) {
  const std::size_t half = s.grid.points / 2;
  double total = 0.0;
  double missed = 0.0;
  for (std::size_t m = 0; m <= half; ++m) {
    const double e = mode_weight(m, half) * std::norm(s.coeffs[m]);
    total += e;
    double covered = 0.0;
    if (m > 0 && !band.empty()) {
      const double xi = s.grid.xi(m);
      covered = bump(xi / scale_lambda(band.hi)) - bump(xi / scale_lambda(band.lo - 1));
    }
    missed += e * (1.0 - covered) * (1.0 - covered);
  }
  return total > 0.0 ? missed / total : 0.0;
}

bool band_resolved(const GridSpec& g, int z) {
  return scale_lambda(z - 1) < g.nyquist() && 2.0 * scale_lambda(z) > g.dxi();
}

std::vector<CoverageRow> band_coverage(const Field& f, const Band& band) {
  const Spectrum s = forward_transform(f);
  const double total = l2_norm(s);
  const auto e = band_energies(s, band);
  std::vector<CoverageRow> rows;
  rows.reserve(e.size());
  for (int z = band.lo; z <= band.hi; ++z) {
    const double frac = total > 0.0 ? e[static_cast<std::size_t>(z - band.lo)] / (total * total) : 0.0;
    rows.push_back({z, scale_lambda(z), frac});
  }
  return rows;
}

}  // namespace gkdv
