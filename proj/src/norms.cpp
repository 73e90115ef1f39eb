#include "gkdv/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gkdv/airy.hpp"
#include "gkdv/error.hpp"

namespace gkdv {

namespace {

struct PulledBack {
  std::vector<Complex> flat;
  std::vector<Spectrum> spectra;
};

PulledBack pulled_back_spectra(const Path& u) {
  PulledBack pb;
  pb.spectra.reserve(u.snapshots.size());
  for (std::size_t k = 0; k < u.snapshots.size(); ++k) {
    pb.spectra.push_back(evolve(forward_transform(u.snapshots[k]), -u.time(k)));
    pb.flat.insert(pb.flat.end(), pb.spectra.back().coeffs.begin(), pb.spectra.back().coeffs.end());
  }
  return pb;
}

double scale_weight(int z, double s) { return s == 0.0 ? 1.0 : std::pow(scale_lambda(z), s); }

}  // namespace

CriticalIndex critical_index(double p) {
  if (!(p >= 5.0) || !std::isfinite(p))
    throw ValidationError("nonlinearity power p must satisfy p >= 5 (supercritical range)");
  return {p, 0.5 - 2.0 / (p - 1.0)};
}

NormReport besov_norm(const Field& f, double s, const Band& band) {
  NormReport r{"besov", s, band};
  const Spectrum spec = forward_transform(f);
  const auto e = band_energies(spec, band);
  r.argmax = band.lo;
  for (int z = band.lo; z <= band.hi; ++z) {
    const double v = scale_weight(z, s) * std::sqrt(e[static_cast<std::size_t>(z - band.lo)]);
    if (v > r.value) {
      r.value = v;
      r.argmax = z;
    }
  }
  r.argmax_lambda = band.empty() ? 0.0 : scale_lambda(r.argmax);
  r.out_of_band = out_of_band_fraction(spec, band);
  return r;
}

NormReport besov_norm(const Field& f, double s) { return besov_norm(f, s, default_band(f.grid)); }

NormReport sobolev_norm(const Field& f, double s, const Band& band) {
  NormReport r{"sobolev", s, band};
  const Spectrum spec = forward_transform(f);
  const auto e = band_energies(spec, band);
  double acc = 0.0;
  double top = -1.0;
  r.argmax = band.lo;
  for (int z = band.lo; z <= band.hi; ++z) {
    const double w = scale_weight(z, s);
    const double term = w * w * e[static_cast<std::size_t>(z - band.lo)];
    acc += term;
    if (term > top) {
      top = term;
      r.argmax = z;
    }
  }
  r.value = std::sqrt(acc);
  r.argmax_lambda = band.empty() ? 0.0 : scale_lambda(r.argmax);
  r.out_of_band = out_of_band_fraction(spec, band);
  return r;
}

NormReport sobolev_norm(const Field& f, double s) { return sobolev_norm(f, s, default_band(f.grid)); }

std::vector<double> xs_profile(const Path& u, double s, const Band& band, kernels::Exec exec) {
  const auto pb = pulled_back_spectra(u);
  auto v = kernels::band_v2_norms(pb.flat, pb.spectra.size(), u.grid, band, true, exec);
  for (int z = band.lo; z <= band.hi; ++z) v[static_cast<std::size_t>(z - band.lo)] *= scale_weight(z, s);
  return v;
}

NormReport xs_norm(const Path& u, double s, const Band& band, kernels::Exec exec) {
  NormReport r{"xs", s, band};
  r.argmax = band.lo;
  const std::size_t n = u.snapshots.size();
  if (n == 0 || band.empty()) return r;
  const auto pb = pulled_back_spectra(u);

  // Total-variation bound per band: sum of consecutive increments plus the terminal jump.
  std::vector<double> bound(band.size(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const Spectrum inc = (k + 1 < n) ? pb.spectra[k + 1] - pb.spectra[k] : pb.spectra[k];
    const auto e = band_energies(inc, band);
    for (std::size_t b = 0; b < bound.size(); ++b) bound[b] += std::sqrt(e[b]);
  }
  for (int z = band.lo; z <= band.hi; ++z) bound[static_cast<std::size_t>(z - band.lo)] *= scale_weight(z, s);

  std::vector<int> order(band.size());
  std::iota(order.begin(), order.end(), band.lo);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return bound[static_cast<std::size_t>(a - band.lo)] > bound[static_cast<std::size_t>(b - band.lo)];
  });

  const std::size_t chunk = std::max<std::size_t>(8, 4 * static_cast<std::size_t>(kernels::threads()));
  std::size_t next = 0;
  while (next < order.size()) {
    const double ub = bound[static_cast<std::size_t>(order[next] - band.lo)];
    if (ub == 0.0 || ub <= r.value) break;
    std::vector<int> batch;
    while (next < order.size() && batch.size() < chunk) {
      const double b = bound[static_cast<std::size_t>(order[next] - band.lo)];
      if (b == 0.0 || b <= r.value) break;
      batch.push_back(order[next++]);
    }
    const auto vals = kernels::band_v2_norms(pb.flat, n, u.grid, batch, true, exec);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const double v = scale_weight(batch[i], s) * vals[i];
      if (v > r.value) {
        r.value = v;
        r.argmax = batch[i];
      }
    }
    if (batch.empty()) break;
  }
  r.argmax_lambda = scale_lambda(r.argmax);
  for (const auto& sp : pb.spectra) r.out_of_band = std::max(r.out_of_band, out_of_band_fraction(sp, band));
  return r;
}

NormReport xs_norm(const Path& u, double s) { return xs_norm(u, s, default_band(u.grid)); }

}  // namespace gkdv
