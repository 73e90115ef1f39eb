#pragma once

// Periodic-cell discretization of the line, the Fourier transform contract
// and basic field algebra.
//
// Transform normalization ("cell-average"): the coefficient of mode m is
//   c_m = (1/N) sum_j f(x_j) exp(-i xi_m x_j),  xi_m = 2 pi m / L,
// with grid points x_j = -L/2 + j L/N. It approximates (1/L) int f e^{-i xi x} dx.
// Parseval reads  (L/N) sum_j |f_j|^2 = L sum_{all m} |c_m|^2.
// Only the non-negative half spectrum m = 0..N/2 is stored; real fields
// carry c_{-m} = conj(c_m) implicitly.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gkdv {

using Complex = std::complex<double>;

struct GridSpec {
  double length = 200.0;
  std::size_t points = 4096;
  double dt = 0.01;
  std::size_t steps = 100;
  double dealias_factor = 2.0;

  /// Throws ValidationError listing every violated invariant.
  void validate() const;

  double dx() const { return length / static_cast<double>(points); }
  double dxi() const;
  double nyquist() const;  // pi N / L
  double horizon() const { return dt * static_cast<double>(steps); }
  double x(std::size_t j) const { return -0.5 * length + static_cast<double>(j) * dx(); }
  double time(std::size_t k) const { return dt * static_cast<double>(k); }
  std::size_t modes() const { return points / 2 + 1; }
  double xi(std::size_t m) const { return dxi() * static_cast<double>(m); }
  std::size_t padded_points() const;

  /// Same spatial grid, different time sampling.
  GridSpec with_time(double new_dt, std::size_t new_steps) const;

  bool same_space(const GridSpec& o) const { return length == o.length && points == o.points; }
  bool operator==(const GridSpec&) const = default;
};

struct Field {
  GridSpec grid;
  std::vector<double> values;

  Field() = default;
  Field(GridSpec g, std::vector<double> v);
  static Field zeros(const GridSpec& g);
  static Field sample(const GridSpec& g, const std::function<double(double)>& f);

  std::size_t size() const { return values.size(); }
};

struct Spectrum {
  GridSpec grid;
  std::vector<Complex> coeffs;  // modes 0..N/2

  static Spectrum zeros(const GridSpec& g);
};

struct Path {
  GridSpec grid;
  std::vector<Field> snapshots;  // K+1 snapshots at t_k = k dt

  static Path zeros(const GridSpec& g);
  std::size_t size() const { return snapshots.size(); }
  double time(std::size_t k) const { return grid.time(k); }
};

Spectrum forward_transform(const Field& f);
Field inverse_transform(const Spectrum& s);

/// Multiplier m(xi) applied to every resolved mode. Conjugate symmetry
/// m(-xi) = conj(m(xi)) is required so that the output is real. The Nyquist
/// mode is a pure cosine on the grid and receives Re m(xi_{N/2}).
using Multiplier = std::function<Complex(double)>;
Field apply_multiplier(const Field& f, const Multiplier& m);
Spectrum apply_multiplier(const Spectrum& s, const Multiplier& m);

/// Multiplies coefficient m by table[m] (real, even symbol).
void scale_modes(Spectrum& s, std::span<const double> table);

double inner_product(const Field& a, const Field& b);
double inner_product(const Spectrum& a, const Spectrum& b);
double l2_norm(const Field& f);
double l2_norm(const Spectrum& s);
/// q >= 1, or q = infinity.
double lq_norm(const Field& f, double q);
/// Inner spatial L^{q_space} per snapshot, outer trapezoid-weighted L^{q_time}
/// over [0, T] (sup when q_time is infinite).
double mixed_norm(const Path& p, double q_time, double q_space);

// Field algebra.
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double c, const Field& a);
Spectrum operator+(const Spectrum& a, const Spectrum& b);
Spectrum operator-(const Spectrum& a, const Spectrum& b);
Spectrum operator*(double c, const Spectrum& a);
Path operator+(const Path& a, const Path& b);
Path operator-(const Path& a, const Path& b);
Path operator*(double c, const Path& a);

/// Spectral (trigonometric) interpolation to a finer grid with the same
/// length; `points` must be >= the source points.
Field zero_pad(const Spectrum& s, std::size_t points);
/// Keeps modes 0..N/2 of a spectrum computed on a finer grid.
Spectrum truncate(const Spectrum& fine, const GridSpec& coarse);

/// Critical rescaling f_c(x) = c^{2/(p-1)} f(c x), evaluated by trigonometric
/// interpolation of f about the cell centre.
Field rescale(const Field& f, double c, double p);

/// L^inf_t L^2_x distance between two paths on the same grid.
double sup_l2_distance(const Path& a, const Path& b);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

}  // namespace gkdv
