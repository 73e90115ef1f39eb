#include "gkdv/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "gkdv/error.hpp"

namespace gkdv {

namespace {

// FFTW planning is not thread-safe; execution through the new-array
// interface is. Plans are created once per size and never destroyed.
struct FftPlans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

const FftPlans& plans_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<FftPlans>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  auto p = std::make_unique<FftPlans>();
  std::vector<double> re(n);
  std::vector<Complex> co(n / 2 + 1);
  auto* cptr = reinterpret_cast<fftw_complex*>(co.data());
  const int ni = static_cast<int>(n);
  p->r2c = fftw_plan_dft_r2c_1d(ni, re.data(), cptr, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p->c2r = fftw_plan_dft_c2r_1d(ni, cptr, re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  auto& ref = *p;
  cache.emplace(n, std::move(p));
  return ref;
}

void check_finite(std::span<const double> v) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!std::isfinite(v[j])) {
      std::ostringstream os;
      os << "forward_transform: non-finite value " << v[j] << " at sample " << j;
      throw ValidationError(os.str());
    }
  }
}

// Forward: c_m = (-1)^m / N * DFT_m  (phase of the x_0 = -L/2 origin).
std::vector<Complex> rfft(std::span<const double> values) {
  const std::size_t n = values.size();
  const auto& plan = plans_for(n);
  std::vector<double> in(values.begin(), values.end());
  std::vector<Complex> out(n / 2 + 1);
  fftw_execute_dft_r2c(plan.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < out.size(); ++m) out[m] *= (m % 2 == 0) ? inv : -inv;
  return out;
}

std::vector<double> irfft(std::span<const Complex> coeffs, std::size_t n) {
  const auto& plan = plans_for(n);
  std::vector<Complex> in(coeffs.begin(), coeffs.end());
  for (std::size_t m = 1; m < in.size(); m += 2) in[m] = -in[m];
  std::vector<double> out(n);
  fftw_execute_dft_c2r(plan.c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  return out;
}

template <class T>
T combine(const T& a, const T& b, double sb) {
  if (!a.grid.same_space(b.grid) || a.values.size() != b.values.size())
    throw ValidationError("field arithmetic: operands live on different grids");
  T out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += sb * b.values[i];
  return out;
}

}  // namespace

void GridSpec::validate() const {
  std::vector<std::string> errs;
  if (!(length > 0) || !std::isfinite(length)) errs.push_back("domain_length must be positive");
  if (points < 2 || (points & (points - 1)) != 0) errs.push_back("num_points must be a power of two >= 2");
  if (!(dt > 0) || !std::isfinite(dt)) errs.push_back("dt must be positive");
  if (steps < 1) errs.push_back("num_steps must be >= 1");
  if (!(dealias_factor >= 1.0)) {
    errs.push_back("dealias_factor must be >= 1");
  } else {
    const double padded = dealias_factor * static_cast<double>(points);
    if (std::abs(padded - std::round(padded)) > 1e-9) errs.push_back("dealias_factor * num_points must be an integer");
  }
  if (!errs.empty()) {
    std::string msg = "invalid grid:";
    for (auto& e : errs) msg += " " + e + ";";
    throw ValidationError(msg);
  }
}

double GridSpec::dxi() const { return 2.0 * std::numbers::pi / length; }
double GridSpec::nyquist() const { return std::numbers::pi * static_cast<double>(points) / length; }

std::size_t GridSpec::padded_points() const {
  auto m = static_cast<std::size_t>(std::llround(dealias_factor * static_cast<double>(points)));
  if (m % 2 == 1) ++m;
  return std::max(m, points);
}

GridSpec GridSpec::with_time(double new_dt, std::size_t new_steps) const {
  GridSpec g = *this;
  g.dt = new_dt;
  g.steps = new_steps;
  return g;
}

Field::Field(GridSpec g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.points) throw ValidationError("Field: sample count does not match grid");
}

Field Field::zeros(const GridSpec& g) { return Field(g, std::vector<double>(g.points, 0.0)); }

Field Field::sample(const GridSpec& g, const std::function<double(double)>& f) {
  std::vector<double> v(g.points);
  for (std::size_t j = 0; j < g.points; ++j) v[j] = f(g.x(j));
  return Field(g, std::move(v));
}

Spectrum Spectrum::zeros(const GridSpec& g) { return Spectrum{g, std::vector<Complex>(g.modes())}; }

Path Path::zeros(const GridSpec& g) {
  return Path{g, std::vector<Field>(g.steps + 1, Field::zeros(g))};
}

Spectrum forward_transform(const Field& f) {
  check_finite(f.values);
  return Spectrum{f.grid, rfft(f.values)};
}

Field inverse_transform(const Spectrum& s) {
  return Field(s.grid, irfft(s.coeffs, s.grid.points));
}

Spectrum apply_multiplier(const Spectrum& s, const Multiplier& m) {
  Spectrum out = s;
  const std::size_t half = s.grid.points / 2;
  for (std::size_t k = 0; k <= half; ++k) {
    const double xi = s.grid.xi(k);
    const Complex mp = m(xi);
    if (k > 0) {
      const Complex mn = m(-xi);
      if (std::abs(mn - std::conj(mp)) > 1e-12 * (1.0 + std::abs(mp))) {
        std::ostringstream os;
        os << "apply_multiplier: symbol is not conjugate-symmetric at xi=" << xi;
        throw ValidationError(os.str());
      }
    } else if (std::abs(mp.imag()) > 1e-12 * (1.0 + std::abs(mp))) {
      throw ValidationError("apply_multiplier: symbol must be real at xi=0");
    }
    out.coeffs[k] *= (k == half) ? Complex(mp.real(), 0.0) : mp;
  }
  return out;
}

Field apply_multiplier(const Field& f, const Multiplier& m) {
  return inverse_transform(apply_multiplier(forward_transform(f), m));
}

void scale_modes(Spectrum& s, std::span<const double> table) {
  for (std::size_t k = 0; k < s.coeffs.size(); ++k) s.coeffs[k] *= table[k];
}

double inner_product(const Field& a, const Field& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) acc += a.values[j] * b.values[j];
  return acc * a.grid.dx();
}

double inner_product(const Spectrum& a, const Spectrum& b) {
  const std::size_t half = a.grid.points / 2;
  double acc = (a.coeffs[0] * std::conj(b.coeffs[0])).real() + (a.coeffs[half] * std::conj(b.coeffs[half])).real();
  double mid = 0.0;
  for (std::size_t k = 1; k < half; ++k) mid += (a.coeffs[k] * std::conj(b.coeffs[k])).real();
  return a.grid.length * (acc + 2.0 * mid);
}

double l2_norm(const Field& f) { return std::sqrt(inner_product(f, f)); }
double l2_norm(const Spectrum& s) { return std::sqrt(std::max(0.0, inner_product(s, s))); }

double lq_norm(const Field& f, double q) {
  if (!(q >= 1.0)) throw ValidationError("lq_norm: exponent q must be >= 1");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  if (q == 2.0) return l2_norm(f);
  double acc = 0.0;
  for (double v : f.values) acc += std::pow(std::abs(v), q);
  return std::pow(acc * f.grid.dx(), 1.0 / q);
}

double mixed_norm(const Path& p, double q_time, double q_space) {
  if (!(q_time >= 1.0) || !(q_space >= 1.0)) throw ValidationError("mixed_norm: exponents must lie in [1, inf]");
  const std::size_t n = p.snapshots.size();
  if (n == 0) return 0.0;
  if (std::isinf(q_time)) {
    double m = 0.0;
    for (const auto& s : p.snapshots) m = std::max(m, lq_norm(s, q_space));
    return m;
  }
  if (n == 1) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = (k == 0 || k + 1 == n) ? 0.5 * p.grid.dt : p.grid.dt;
    const double inner = lq_norm(p.snapshots[k], q_space);
    if (inner > 0) acc += w * std::pow(inner, q_time);
  }
  return std::pow(acc, 1.0 / q_time);
}

Field operator+(const Field& a, const Field& b) { return combine(a, b, 1.0); }
Field operator-(const Field& a, const Field& b) { return combine(a, b, -1.0); }
Field operator*(double c, const Field& a) {
  Field out = a;
  for (auto& v : out.values) v *= c;
  return out;
}

Spectrum operator+(const Spectrum& a, const Spectrum& b) {
  if (!a.grid.same_space(b.grid) || a.coeffs.size() != b.coeffs.size())
    throw ValidationError("spectrum arithmetic: operands live on different grids");
  Spectrum out = a;
  for (std::size_t k = 0; k < out.coeffs.size(); ++k) out.coeffs[k] += b.coeffs[k];
  return out;
}
Spectrum operator-(const Spectrum& a, const Spectrum& b) {
  if (!a.grid.same_space(b.grid) || a.coeffs.size() != b.coeffs.size())
    throw ValidationError("spectrum arithmetic: operands live on different grids");
  Spectrum out = a;
  for (std::size_t k = 0; k < out.coeffs.size(); ++k) out.coeffs[k] -= b.coeffs[k];
  return out;
}
Spectrum operator*(double c, const Spectrum& a) {
  Spectrum out = a;
  for (auto& v : out.coeffs) v *= c;
  return out;
}

Path operator+(const Path& a, const Path& b) {
  require_same_grid(a.grid, b.grid, "path sum");
  Path out = a;
  for (std::size_t k = 0; k < out.snapshots.size(); ++k) out.snapshots[k] = a.snapshots[k] + b.snapshots[k];
  return out;
}
Path operator-(const Path& a, const Path& b) {
  require_same_grid(a.grid, b.grid, "path difference");
  Path out = a;
  for (std::size_t k = 0; k < out.snapshots.size(); ++k) out.snapshots[k] = a.snapshots[k] - b.snapshots[k];
  return out;
}
Path operator*(double c, const Path& a) {
  Path out = a;
  for (auto& s : out.snapshots) s = c * s;
  return out;
}

Field zero_pad(const Spectrum& s, std::size_t points) {
  if (points < s.grid.points) throw ValidationError("zero_pad: target grid is coarser than the source");
  GridSpec g = s.grid;
  g.points = points;
  std::vector<Complex> c(points / 2 + 1, Complex(0.0));
  const std::size_t half = s.grid.points / 2;
  for (std::size_t k = 0; k < half; ++k) c[k] = s.coeffs[k];
  // The source Nyquist cosine splits evenly between +-N/2 on the finer grid.
  if (points > s.grid.points) {
    c[half] = Complex(s.coeffs[half].real(), 0.0);
  } else {
    c[half] = s.coeffs[half];
  }
  return Field(g, irfft(c, points));
}

Spectrum truncate(const Spectrum& fine, const GridSpec& coarse) {
  Spectrum out = Spectrum::zeros(coarse);
  const std::size_t half = coarse.points / 2;
  for (std::size_t k = 0; k < half; ++k) out.coeffs[k] = fine.coeffs[k];
  if (fine.grid.points == coarse.points) {
    out.coeffs[half] = fine.coeffs[half];
  } else {
    // Folding +-N/2 of the fine spectrum onto the coarse Nyquist cosine.
    out.coeffs[half] = Complex(fine.coeffs[half].real(), 0.0);
  }
  return out;
}

Field rescale(const Field& f, double c, double p) {
  if (!(c > 0)) throw ValidationError("rescale: factor must be positive");
  const Spectrum s = forward_transform(f);
  const GridSpec& g = f.grid;
  const std::size_t half = g.points / 2;
  const double amp = std::pow(c, 2.0 / (p - 1.0));
  std::vector<double> out(g.points);
  for (std::size_t j = 0; j < g.points; ++j) {
    const double y = c * g.x(j);
    // Evaluate sum_m c_m e^{i xi_m y} by a stable phase recurrence.
    const Complex step = std::polar(1.0, g.dxi() * y);
    Complex ph(1.0, 0.0);
    double acc = s.coeffs[0].real();
    for (std::size_t m = 1; m < half; ++m) {
      ph *= step;
      if (m % 64 == 0) ph = std::polar(1.0, g.dxi() * static_cast<double>(m) * y);
      acc += 2.0 * (s.coeffs[m] * ph).real();
    }
    acc += s.coeffs[half].real() * std::cos(g.xi(half) * y);
    out[j] = amp * acc;
  }
  return Field(g, std::move(out));
}

double sup_l2_distance(const Path& a, const Path& b) {
  require_same_grid(a.grid, b.grid, "sup_l2_distance");
  double m = 0.0;
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) m = std::max(m, l2_norm(a.snapshots[k] - b.snapshots[k]));
  return m;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw ValidationError(std::string(what) + ": grids do not match");
}

}  // namespace gkdv
