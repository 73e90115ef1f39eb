#include "gkdv/nonlinearity.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gkdv/error.hpp"
#include "gkdv/kernels.hpp"

namespace gkdv {

namespace {

double step_h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

void check_power(double p) {
  if (!(p >= 5.0) || !std::isfinite(p))
    throw ValidationError("nonlinearity power p must satisfy p >= 5 (supercritical range)");
}

void apply_taper(Spectrum& s) {
  const double ny = s.grid.nyquist();
  for (std::size_t m = 0; m < s.coeffs.size(); ++m) s.coeffs[m] *= dealias_taper(s.grid.xi(m), ny);
}

Spectrum pointwise_on_padded(const Spectrum& s, std::size_t padded, const std::function<double(double)>& g) {
  Field fine = zero_pad(s, padded);
  for (double& v : fine.values) v = g(v);
  Spectrum out = truncate(forward_transform(fine), s.grid);
  apply_taper(out);
  return out;
}

// Restriction of a spectrum to the band's partial-sum symbol (mean removed).
Spectrum band_limit(const Spectrum& s, const Band& band) {
  Spectrum out = s;
  out.coeffs[0] = 0.0;
  for (std::size_t m = 1; m < out.coeffs.size(); ++m) {
    const double xi = s.grid.xi(m);
    out.coeffs[m] *= band.empty() ? 0.0 : bump(xi / scale_lambda(band.hi)) - bump(xi / scale_lambda(band.lo - 1));
  }
  return out;
}

double relative_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    num += (a[j] - b[j]) * (a[j] - b[j]);
    den += b[j] * b[j];
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

// Scales of the band whose symbol is nonzero on at least one active mode.
std::vector<int> touching_scales(const GridSpec& g, const Band& band, const std::vector<std::size_t>& active) {
  std::vector<int> out;
  for (int z = band.lo; z <= band.hi; ++z) {
    const auto sym = band_symbol(g, z);
    for (std::size_t m : active) {
      if (m >= sym->first && m < sym->first + sym->weights.size() && sym->weights[m - sym->first] != 0.0) {
        out.push_back(z);
        break;
      }
    }
  }
  return out;
}

struct ActiveModes {
  std::vector<std::size_t> modes;
  double skipped = 0.0;
};

ActiveModes active_modes(const Spectrum& s, double threshold) {
  ActiveModes a;
  const std::size_t half = s.grid.points / 2;
  double total = 0.0;
  for (std::size_t m = 1; m <= half; ++m) total += std::norm(s.coeffs[m]);
  for (std::size_t m = 1; m <= half; ++m) {
    const double e = std::norm(s.coeffs[m]);
    if (e == 0.0) continue;
    if (e > threshold * total && m < half) {
      a.modes.push_back(m);
    } else {
      a.skipped += e;
    }
  }
  if (total > 0.0) a.skipped /= total;
  return a;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 2;
  while (p < n) p *= 2;
  return p;
}

ExpansionResult quintic_mode_space(const Spectrum& s, const Band& band, std::size_t nodes, double budget,
                                   ExpansionResult res) {
  const ActiveModes act = active_modes(s, 1e-28);
  res.skipped_mass = act.skipped;
  const std::size_t na = act.modes.size();
  if (na == 0) return res;
  const auto scales = touching_scales(s.grid, band, act.modes);
  res.bands = scales.size();
  const double signed_count = 2.0 * static_cast<double>(na);
  const double required = std::pow(signed_count, 5) +
                          static_cast<double>(scales.size()) * static_cast<double>(nodes) * std::pow(na, 4.0) * 2.0;
  if (required > budget)
    throw BudgetExceeded("quintic expansion: mode-tuple count exceeds budget", required, budget);

  const Quadrature q = gauss_legendre(nodes);
  auto idx2 = [na](std::size_t a, std::size_t b) { return a * na + b; };
  std::vector<double> k2(na * na, 0.0), k3(na * na * na, 0.0), k4(na * na * na * na, 0.0),
      k5(na * na * na * na * na, 0.0);
  std::vector<double> psi(na), lt(na), mv(na);
  std::vector<double> q1(na), q2(na * na), q3(na * na * na), q4(na * na * na * na);
  for (int z : scales) {
    for (std::size_t i = 0; i < na; ++i) {
      const double xi = s.grid.xi(act.modes[i]);
      psi[i] = psi_symbol(z, xi);
      lt[i] = lt_symbol(z, xi);
    }
    std::fill(q1.begin(), q1.end(), 0.0);
    std::fill(q2.begin(), q2.end(), 0.0);
    std::fill(q3.begin(), q3.end(), 0.0);
    std::fill(q4.begin(), q4.end(), 0.0);
    for (std::size_t t = 0; t < q.nodes.size(); ++t) {
      const double w = q.weights[t];
      for (std::size_t i = 0; i < na; ++i) mv[i] = lt[i] + q.nodes[t] * psi[i];
      for (std::size_t a = 0; a < na; ++a) {
        const double wa = w * mv[a];
        q1[a] += wa;
        for (std::size_t b = 0; b < na; ++b) {
          const double wab = wa * mv[b];
          q2[idx2(a, b)] += wab;
          for (std::size_t c = 0; c < na; ++c) {
            const double wabc = wab * mv[c];
            q3[idx2(a, b) * na + c] += wabc;
            double* row = &q4[(idx2(a, b) * na + c) * na];
            for (std::size_t d = 0; d < na; ++d) row[d] += wabc * mv[d];
          }
        }
      }
    }
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < na; ++i)
      if (psi[i] != 0.0) live.push_back(i);
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t l : live) k2[idx2(a, l)] += q1[a] * psi[l];
    for (std::size_t ab = 0; ab < na * na; ++ab)
      for (std::size_t l : live) k3[ab * na + l] += q2[ab] * psi[l];
    for (std::size_t abc = 0; abc < na * na * na; ++abc)
      for (std::size_t l : live) k4[abc * na + l] += q3[abc] * psi[l];
    for (std::size_t abcd = 0; abcd < na * na * na * na; ++abcd) {
      const double v = q4[abcd];
      if (v == 0.0) continue;
      for (std::size_t l : live) k5[abcd * na + l] += v * psi[l];
    }
  }

  // Signed mode list and the five-fold sum binned by output mode.
  const std::size_t ns = 2 * na;
  std::vector<long> mode(ns);
  std::vector<std::size_t> absidx(ns);
  std::vector<Complex> coef(ns);
  for (std::size_t i = 0; i < na; ++i) {
    mode[2 * i] = static_cast<long>(act.modes[i]);
    mode[2 * i + 1] = -static_cast<long>(act.modes[i]);
    absidx[2 * i] = absidx[2 * i + 1] = i;
    coef[2 * i] = s.coeffs[act.modes[i]];
    coef[2 * i + 1] = std::conj(s.coeffs[act.modes[i]]);
  }
  const long top = static_cast<long>(act.modes.back()) * 5;
  const std::size_t nbins = static_cast<std::size_t>(2 * top + 1);
  const int nthreads = kernels::threads();
  std::vector<std::vector<Complex>> partial(static_cast<std::size_t>(nthreads), std::vector<Complex>(nbins));
  const auto ns_i = static_cast<std::ptrdiff_t>(ns);
#pragma omp parallel for schedule(static) num_threads(nthreads)
  for (std::ptrdiff_t j1s = 0; j1s < ns_i; ++j1s) {
    auto& bins = partial[static_cast<std::size_t>(omp_get_thread_num())];
    const auto j1 = static_cast<std::size_t>(j1s);
    const std::size_t a = absidx[j1];
    for (std::size_t j2 = 0; j2 < ns; ++j2) {
      const std::size_t b = absidx[j2];
      const double kab = k2[idx2(a, b)];
      if (kab == 0.0) continue;
      const Complex c12 = coef[j1] * coef[j2] * kab;
      for (std::size_t j3 = 0; j3 < ns; ++j3) {
        const std::size_t c = absidx[j3];
        const double kabc = k3[idx2(a, b) * na + c];
        if (kabc == 0.0) continue;
        const Complex c123 = c12 * coef[j3] * kabc;
        for (std::size_t j4 = 0; j4 < ns; ++j4) {
          const std::size_t d = absidx[j4];
          const std::size_t abcd = (idx2(a, b) * na + c) * na + d;
          const double kabcd = k4[abcd];
          if (kabcd == 0.0) continue;
          const Complex c1234 = c123 * coef[j4] * kabcd;
          const long partial_mode = mode[j1] + mode[j2] + mode[j3] + mode[j4] + top;
          const double* k5row = &k5[abcd * na];
          for (std::size_t j5 = 0; j5 < ns; ++j5) {
            const double kk = k5row[absidx[j5]];
            if (kk == 0.0) continue;
            bins[static_cast<std::size_t>(partial_mode + mode[j5])] += c1234 * coef[j5] * kk;
          }
        }
      }
    }
  }
  // Deterministic reduction: partials summed in thread order.
  std::vector<Complex> bins(nbins);
  for (const auto& pb : partial)
    for (std::size_t i = 0; i < nbins; ++i) bins[i] += pb[i];

  // Reference: u^5 sampled on a grid that resolves every product mode.
  GridSpec fine = s.grid;
  fine.points = next_pow2(static_cast<std::size_t>(2 * top + 2));
  fine.points = std::max(fine.points, s.grid.points);
  Field uf = zero_pad(s, fine.points);
  for (double& v : uf.values) v = v * v * v * v * v;
  const Spectrum ref = forward_transform(uf);
  Spectrum got = Spectrum::zeros(fine);
  const double c = res.constant;
  for (long m = 0; m <= top && static_cast<std::size_t>(m) < got.coeffs.size(); ++m)
    got.coeffs[static_cast<std::size_t>(m)] = c * bins[static_cast<std::size_t>(m + top)];
  const double den = l2_norm(ref);
  res.residual = den > 0.0 ? l2_norm(got - ref) / den : 0.0;
  return res;
}

ExpansionResult quintic_pointwise(const Spectrum& s, double p, const Band& band, std::size_t nodes, double budget,
                                  ExpansionResult res) {
  const ActiveModes act = active_modes(s, 1e-28);
  res.skipped_mass = act.skipped;
  if (act.modes.empty()) return res;
  const auto scales = touching_scales(s.grid, band, act.modes);
  res.bands = scales.size();
  const double per_level = static_cast<double>(scales.size()) * static_cast<double>(nodes);
  const double required = std::pow(per_level, 4) * static_cast<double>(s.grid.points);
  if (required > budget)
    throw BudgetExceeded("quintic expansion: band-tuple count exceeds budget", required, budget);

  const PowerLaw law(p);
  const Quadrature q = gauss_legendre(nodes);
  const Field u = inverse_transform(s);
  std::vector<double> acc(s.grid.points, 0.0);
  for (int z5 : scales) {
    const Field f5 = inverse_transform(project(s, z5));
    for (std::size_t t5 = 0; t5 < nodes; ++t5) {
      const Spectrum a5 = truncation_operator(s, z5, q.nodes[t5]);
      for (int z4 : scales) {
        const Field f4 = inverse_transform(project(a5, z4));
        for (std::size_t t4 = 0; t4 < nodes; ++t4) {
          const Spectrum a4 = truncation_operator(a5, z4, q.nodes[t4]);
          for (int z3 : scales) {
            const Field f3 = inverse_transform(project(a4, z3));
            for (std::size_t t3 = 0; t3 < nodes; ++t3) {
              const Spectrum a3 = truncation_operator(a4, z3, q.nodes[t3]);
              for (int z2 : scales) {
                const Field f2 = inverse_transform(project(a3, z2));
                for (std::size_t t2 = 0; t2 < nodes; ++t2) {
                  const Field a2 = inverse_transform(truncation_operator(a3, z2, q.nodes[t2]));
                  const double w = q.weights[t5] * q.weights[t4] * q.weights[t3] * q.weights[t2];
                  for (std::size_t j = 0; j < acc.size(); ++j)
                    acc[j] += w * law.derivative(a2.values[j], 4) * f2.values[j] * f3.values[j] * f4.values[j] *
                              f5.values[j];
                }
              }
            }
          }
        }
      }
    }
  }
  std::vector<double> ref(u.values.size());
  for (std::size_t j = 0; j < ref.size(); ++j) ref[j] = law.value(u.values[j]);
  res.residual = relative_gap(acc, ref);
  return res;
}

}  // namespace

PowerLaw::PowerLaw(double power) : p(power) { check_power(power); }

double PowerLaw::value(double x) const { return std::pow(std::abs(x), p - 1.0) * x; }

double PowerLaw::derivative(double x, int k) const {
  const double a = std::abs(x);
  switch (k) {
    case 0:
      return value(x);
    case 1:
      return p * std::pow(a, p - 1.0);
    case 2:
      return p * (p - 1.0) * std::pow(a, p - 3.0) * x;
    case 3:
      return p * (p - 1.0) * (p - 2.0) * std::pow(a, p - 3.0);
    case 4:
      return fourth_coefficient() * std::pow(a, p - 5.0) * x;
    default:
      throw ValidationError("PowerLaw: derivative order must lie in 0..4");
  }
}

double PowerLaw::fourth_coefficient() const { return p * (p - 1.0) * (p - 2.0) * (p - 3.0); }

double dealias_taper(double xi, double nyquist) {
  const double a = std::abs(xi);
  const double start = 0.9 * nyquist;
  if (a <= start) return 1.0;
  if (a >= nyquist) return 0.0;
  const double t = (a - start) / (nyquist - start);
  const double up = step_h(1.0 - t);
  return up / (up + step_h(t));
}

Spectrum power_spectrum(const Spectrum& s, double p) {
  const PowerLaw law(p);
  if (p == 5.0) return pointwise_on_padded(s, s.grid.padded_points(), [](double v) { return v * v * v * v * v; });
  return pointwise_on_padded(s, s.grid.padded_points(), [&](double v) { return law.value(v); });
}

Field evaluate_power(const Field& f, double p) { return inverse_transform(power_spectrum(forward_transform(f), p)); }

Field quintic_reference(const Field& f) {
  const Spectrum s = forward_transform(f);
  return inverse_transform(pointwise_on_padded(s, 8 * f.grid.points, [](double v) {
    const double v2 = v * v;
    return v2 * v2 * v;
  }));
}

Spectrum truncation_operator(const Spectrum& u, int z, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("truncation_operator: tau must lie in [0, 1]");
  Spectrum out = u;
  for (std::size_t m = 0; m < out.coeffs.size(); ++m) {
    const double xi = u.grid.xi(m);
    out.coeffs[m] *= lt_symbol(z, xi) + tau * psi_symbol(z, xi);
  }
  return out;
}

Field truncation_operator(const Field& u, int z, double tau) {
  return inverse_transform(truncation_operator(forward_transform(u), z, tau));
}

Quadrature gauss_legendre(std::size_t n) {
  if (n == 0) throw ValidationError("gauss_legendre: need at least one node");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const auto nu = static_cast<unsigned>(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Newton iteration from the Tricomi initial guess.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double pn = std::legendre(nu, x);
      const double pm = n > 1 ? std::legendre(nu - 1, x) : 1.0;
      dp = static_cast<double>(n) * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      const double pn = std::legendre(nu, x);
      const double pm = n > 1 ? std::legendre(nu - 1, x) : 1.0;
      dp = static_cast<double>(n) * (x * pn - pm) / (x * x - 1.0);
    }
    // Map [-1, 1] -> [0, 1], ascending.
    q.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    q.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

ExpansionResult telescoping_check(const Field& u, double p, const Band& band, std::size_t nodes) {
  const PowerLaw law(p);
  ExpansionResult res;
  res.nodes = nodes;
  const Spectrum s = band_limit(forward_transform(u), band);
  const Field ub = inverse_transform(s);
  const ActiveModes act = active_modes(s, 1e-28);
  res.skipped_mass = act.skipped;
  if (act.modes.empty()) return res;
  const auto scales = touching_scales(s.grid, band, act.modes);
  res.bands = scales.size();
  const Quadrature q = gauss_legendre(nodes);
  const std::size_t n = u.grid.points;

  std::vector<std::vector<double>> parts(scales.size());
  const auto nz = static_cast<std::ptrdiff_t>(scales.size());
#pragma omp parallel for schedule(dynamic) num_threads(kernels::threads())
  for (std::ptrdiff_t iz = 0; iz < nz; ++iz) {
    const int z = scales[static_cast<std::size_t>(iz)];
    const Field uz = inverse_transform(project(s, z));
    const Field lo = inverse_transform(project_lt(s, z));
    std::vector<double> part(n, 0.0);
    for (std::size_t t = 0; t < nodes; ++t)
      for (std::size_t j = 0; j < n; ++j)
        part[j] += q.weights[t] * law.derivative(lo.values[j] + q.nodes[t] * uz.values[j], 1);
    for (std::size_t j = 0; j < n; ++j) part[j] *= uz.values[j];
    parts[static_cast<std::size_t>(iz)] = std::move(part);
  }
  std::vector<double> lhs(n, 0.0);
  for (const auto& part : parts)
    for (std::size_t j = 0; j < n; ++j) lhs[j] += part[j];
  std::vector<double> ref(n);
  for (std::size_t j = 0; j < n; ++j) ref[j] = law.value(ub.values[j]);
  res.residual = relative_gap(lhs, ref);
  return res;
}

ExpansionResult quintic_expansion_check(const Field& u, double p, const Band& band, std::size_t nodes, double budget) {
  const PowerLaw law(p);
  ExpansionResult res;
  res.nodes = nodes;
  res.constant = law.fourth_coefficient();
  res.displayed_constant = res.constant * (p - 4.0);
  const Spectrum s = band_limit(forward_transform(u), band);
  if (p == 5.0) return quintic_mode_space(s, band, nodes, budget, res);
  return quintic_pointwise(s, p, band, nodes, budget, res);
}

}  // namespace gkdv
