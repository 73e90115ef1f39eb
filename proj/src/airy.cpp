#include "gkdv/airy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gkdv/error.hpp"

namespace gkdv {

namespace {

// xi_m^3 t reduced modulo 2 pi in extended precision; the raw phase reaches
// 1e5 rad on fine grids and double rounding would cost ~1e-11 in the group law.
double airy_phase(const GridSpec& g, std::size_t m, double t) {
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double k = two_pi / static_cast<long double>(g.length);
  const long double mm = static_cast<long double>(m);
  const long double phase = k * k * k * (mm * mm * mm) * static_cast<long double>(t);
  return static_cast<double>(std::fmod(phase, two_pi));
}

}  // namespace

Spectrum evolve(const Spectrum& s, double t) {
  Spectrum out = s;
  if (t == 0.0) return out;
  const std::size_t half = s.grid.points / 2;
  for (std::size_t m = 1; m < half; ++m) out.coeffs[m] *= std::polar(1.0, airy_phase(s.grid, m, t));
  return out;
}

Field evolve(const Field& f, double t) { return inverse_transform(evolve(forward_transform(f), t)); }

Path free_solution(const Field& phi, const GridSpec& grid) {
  require_same_grid(GridSpec{phi.grid}.with_time(grid.dt, grid.steps), grid, "free_solution");
  const Spectrum s = forward_transform(phi);
  Path out{grid, {}};
  out.snapshots.reserve(grid.steps + 1);
  for (std::size_t k = 0; k <= grid.steps; ++k) {
    Field snap = inverse_transform(evolve(s, grid.time(k)));
    snap.grid = grid;
    out.snapshots.push_back(std::move(snap));
  }
  return out;
}

std::vector<double> cumulative_weights(std::size_t k, double dt) {
  std::vector<double> w(k + 1, 0.0);
  if (k == 0) return w;
  if (k == 1) {
    w[0] = w[1] = 0.5 * dt;
    return w;
  }
  const std::size_t simpson_end = (k % 2 == 0) ? k : k - 3;
  for (std::size_t j = 0; j + 2 <= simpson_end; j += 2) {
    w[j] += dt / 3.0;
    w[j + 1] += 4.0 * dt / 3.0;
    w[j + 2] += dt / 3.0;
  }
  if (k % 2 == 1) {
    const double c = 3.0 * dt / 8.0;
    w[k - 3] += c;
    w[k - 2] += 3.0 * c;
    w[k - 1] += 3.0 * c;
    w[k] += c;
  }
  return w;
}

std::vector<Spectrum> duhamel_spectral(const std::vector<Spectrum>& forcing, double dt) {
  const std::size_t n = forcing.size();
  std::vector<Spectrum> out;
  if (n == 0) return out;
  const std::size_t modes = forcing[0].coeffs.size();
  std::vector<std::vector<Complex>> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = evolve(forcing[k], -dt * static_cast<double>(k)).coeffs;

  // Cumulative integrals of the pulled-back integrand.
  std::vector<std::vector<Complex>> acc(n, std::vector<Complex>(modes, Complex(0.0)));
  for (std::size_t k = 1; k < n; ++k) {
    auto& a = acc[k];
    if (k == 1) {
      for (std::size_t m = 0; m < modes; ++m) a[m] = 0.5 * dt * (g[0][m] + g[1][m]);
    } else if (k % 2 == 0) {
      const double c = dt / 3.0;
      for (std::size_t m = 0; m < modes; ++m)
        a[m] = acc[k - 2][m] + c * (g[k - 2][m] + 4.0 * g[k - 1][m] + g[k][m]);
    } else {
      const double c = 3.0 * dt / 8.0;
      for (std::size_t m = 0; m < modes; ++m)
        a[m] = acc[k - 3][m] + c * (g[k - 3][m] + 3.0 * g[k - 2][m] + 3.0 * g[k - 1][m] + g[k][m]);
    }
  }
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Spectrum s{forcing[k].grid, std::move(acc[k])};
    out.push_back(evolve(s, dt * static_cast<double>(k)));
  }
  return out;
}

Path duhamel(const Path& forcing) {
  std::vector<Spectrum> f;
  f.reserve(forcing.snapshots.size());
  for (const auto& s : forcing.snapshots) {
    if (!forcing.grid.same_space(s.grid)) throw ValidationError("duhamel: snapshot grid differs from path grid");
    f.push_back(forward_transform(s));
  }
  const auto d = duhamel_spectral(f, forcing.grid.dt);
  Path out{forcing.grid, {}};
  out.snapshots.reserve(d.size());
  for (const auto& s : d) {
    Field snap = inverse_transform(s);
    snap.grid = forcing.grid;
    out.snapshots.push_back(std::move(snap));
  }
  out.snapshots.front() = Field::zeros(forcing.grid);
  return out;
}

Path duhamel(const Path& forcing, const GridSpec& grid) {
  require_same_grid(forcing.grid, grid, "duhamel");
  if (forcing.snapshots.size() != grid.steps + 1) throw ValidationError("duhamel: snapshot count does not match grid");
  return duhamel(forcing);
}

Spectrum derivative(const Spectrum& s) {
  Spectrum out = s;
  const std::size_t half = s.grid.points / 2;
  for (std::size_t m = 0; m < half; ++m) out.coeffs[m] *= Complex(0.0, s.grid.xi(m));
  out.coeffs[half] = 0.0;
  return out;
}

Field derivative(const Field& f) { return inverse_transform(derivative(forward_transform(f))); }

double airy_residual(const Path& w, const Path* rhs) {
  const std::size_t n = w.snapshots.size();
  if (rhs) require_same_grid(w.grid, rhs->grid, "airy_residual");
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    Spectrum dt_w = (0.5 / w.grid.dt) * (forward_transform(w.snapshots[k + 1]) - forward_transform(w.snapshots[k - 1]));
    Spectrum d3 = derivative(derivative(derivative(forward_transform(w.snapshots[k]))));
    Spectrum r = dt_w + d3;
    if (rhs) r = r - forward_transform(rhs->snapshots[k]);
    worst = std::max(worst, l2_norm(r));
  }
  return worst;
}

}  // namespace gkdv
