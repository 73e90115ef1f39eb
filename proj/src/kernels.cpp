#include "gkdv/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "gkdv/error.hpp"

namespace gkdv::kernels {

namespace {

int g_threads = 0;

int team_size() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

inline double mode_weight(std::size_t m, std::size_t half) { return (m == 0 || m == half) ? 1.0 : 2.0; }

std::vector<double> band_pair_energies(std::span<const Complex> spectra, std::size_t n, const GridSpec& grid, int z,
                                       std::vector<double>& sq_norms) {
  const std::size_t modes = grid.modes();
  const std::size_t half = grid.points / 2;
  const auto sym = band_symbol(grid, z);
  const std::size_t first = sym->first;
  const std::size_t len = sym->weights.size();
  std::vector<double> w2(len);
  for (std::size_t i = 0; i < len; ++i) w2[i] = mode_weight(first + i, half) * sym->weights[i] * sym->weights[i];

  std::vector<double> d(n * n, 0.0);
  sq_norms.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex* ck = spectra.data() + k * modes + first;
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) acc += w2[i] * std::norm(ck[i]);
    sq_norms[k] = grid.length * acc;
    for (std::size_t j = 0; j < k; ++j) {
      const Complex* cj = spectra.data() + j * modes + first;
      double s = 0.0;
      for (std::size_t i = 0; i < len; ++i) s += w2[i] * std::norm(ck[i] - cj[i]);
      d[j * n + k] = d[k * n + j] = grid.length * s;
    }
  }
  return d;
}

}  // namespace

void set_threads(int n) { g_threads = std::max(0, n); }
int threads() { return team_size(); }

std::vector<double> pairwise_sq_distances(std::span<const double> rows, std::size_t n, std::size_t dim, double weight,
                                          Exec exec) {
  if (rows.size() != n * dim) throw ValidationError("pairwise_sq_distances: size mismatch");
  std::vector<double> d(n * n, 0.0);
  auto row_pass = [&](std::size_t k) {
    const double* rk = rows.data() + k * dim;
    for (std::size_t j = 0; j < k; ++j) {
      const double* rj = rows.data() + j * dim;
      double s = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double t = rk[i] - rj[i];
        s += t * t;
      }
      d[j * n + k] = d[k * n + j] = weight * s;
    }
  };
  if (exec == Exec::serial) {
    for (std::size_t k = 0; k < n; ++k) row_pass(k);
  } else {
    const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(team_size())
    for (std::ptrdiff_t k = 0; k < nn; ++k) row_pass(static_cast<std::size_t>(k));
  }
  return d;
}

double vp_power_from_distances(std::span<const double> sq_dist, std::span<const double> sq_norms, std::size_t n,
                               double p, bool terminal) {
  if (!(p >= 1.0)) throw ValidationError("variation exponent p must be >= 1");
  if (n == 0) return 0.0;
  std::vector<double> best(n, 0.0);
  const double half_p = 0.5 * p;
  double answer = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double m = 0.0;
    for (std::size_t j = 0; j < k; ++j) m = std::max(m, best[j] + std::pow(sq_dist[j * n + k], half_p));
    best[k] = m;
    const double tail = terminal ? std::pow(sq_norms[k], half_p) : 0.0;
    answer = std::max(answer, m + tail);
  }
  return answer;
}

std::vector<double> band_v2_norms(std::span<const Complex> spectra, std::size_t n, const GridSpec& grid,
                                  const Band& band, bool terminal, Exec exec) {
  std::vector<int> zs;
  for (int z = band.lo; z <= band.hi; ++z) zs.push_back(z);
  return band_v2_norms(spectra, n, grid, zs, terminal, exec);
}

std::vector<double> band_v2_norms(std::span<const Complex> spectra, std::size_t n, const GridSpec& grid,
                                  std::span<const int> exponents, bool terminal, Exec exec) {
  if (spectra.size() != n * grid.modes()) throw ValidationError("band_v2_norms: size mismatch");
  std::vector<double> out(exponents.size(), 0.0);
  auto one = [&](std::size_t b) {
    std::vector<double> norms;
    const auto d = band_pair_energies(spectra, n, grid, exponents[b], norms);
    out[b] = std::sqrt(vp_power_from_distances(d, norms, n, 2.0, terminal));
  };
  if (exec == Exec::serial) {
    for (std::size_t b = 0; b < out.size(); ++b) one(b);
  } else {
    const auto nb = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(dynamic) num_threads(team_size())
    for (std::ptrdiff_t b = 0; b < nb; ++b) one(static_cast<std::size_t>(b));
  }
  return out;
}

double band_lq_norm(std::span<const Complex> spectra, std::size_t n, const GridSpec& grid, int z, double q,
                    Exec exec) {
  if (spectra.size() != n * grid.modes()) throw ValidationError("band_lq_norm: size mismatch");
  if (!(q >= 1.0) || std::isinf(q)) throw ValidationError("band_lq_norm: q must be finite and >= 1");
  const std::size_t modes = grid.modes();
  const auto sym = band_symbol(grid, z);
  std::vector<double> per(n, 0.0);
  auto one = [&](std::size_t k) {
    Spectrum s = Spectrum::zeros(grid);
    for (std::size_t i = 0; i < sym->weights.size(); ++i) {
      const std::size_t m = sym->first + i;
      s.coeffs[m] = sym->weights[i] * spectra[k * modes + m];
    }
    const Field f = inverse_transform(s);
    double acc = 0.0;
    for (double v : f.values) acc += std::pow(std::abs(v), q);
    per[k] = acc * grid.dx();
  };
  if (exec == Exec::serial) {
    for (std::size_t k = 0; k < n; ++k) one(k);
  } else {
    const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(team_size())
    for (std::ptrdiff_t k = 0; k < nn; ++k) one(static_cast<std::size_t>(k));
  }
  if (n == 1) return std::pow(per[0], 1.0 / q);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) total += ((k == 0 || k + 1 == n) ? 0.5 : 1.0) * grid.dt * per[k];
  return std::pow(total, 1.0 / q);
}

}  // namespace gkdv::kernels
