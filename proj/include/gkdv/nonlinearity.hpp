#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gkdv/littlewood_paley.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

/// f(x) = |x|^{p-1} x and its first four derivatives.
struct PowerLaw {
  double p;

  explicit PowerLaw(double power);
  double value(double x) const;
  /// k-th derivative, 0 <= k <= 4.
  double derivative(double x, int k) const;
  /// Coefficient of the fourth derivative, p(p-1)(p-2)(p-3).
  double fourth_coefficient() const;
};

/// Smooth spectral taper: 1 below 0.9 of the Nyquist frequency, 0 at Nyquist.
double dealias_taper(double xi, double nyquist);

/// |f|^{p-1} f evaluated pointwise on the zero-padded grid
/// (grid.dealias_factor x N points), truncated back and tapered.
Spectrum power_spectrum(const Spectrum& s, double p);
Field evaluate_power(const Field& f, double p);

/// Product of five copies of f computed exactly on an 8x padded grid, then
/// truncated and tapered like evaluate_power.
Field quintic_reference(const Field& f);

/// u_{<lambda} + tau u_lambda.
Field truncation_operator(const Field& u, int z, double tau);
Spectrum truncation_operator(const Spectrum& u, int z, double tau);

/// Gauss-Legendre nodes and weights on [0, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(std::size_t n);

struct ExpansionResult {
  double residual = 0.0;
  std::size_t bands = 0;        // bands whose symbol meets the input's support
  std::size_t nodes = 0;        // quadrature nodes per tau variable
  double skipped_mass = 0.0;    // spectral mass below the pruning threshold
  double constant = 0.0;        // constant multiplying the fourth derivative
  double displayed_constant = 0.0;  // p(p-1)(p-2)(p-3)(p-4)
};

/// Relative L^2 gap between sum_z int_0^1 f'(u_{<z} + tau u_z) dtau u_z and
/// f(u), both evaluated pointwise on the grid. The input is first projected
/// onto the band.
ExpansionResult telescoping_check(const Field& u, double p, const Band& band, std::size_t nodes);

/// Fourfold iterated version of the same identity, with five frequency
/// localized factors and tensorized quadrature in four tau variables,
/// compared against f(u). For p = 5 the fourth derivative is linear and the
/// sum is evaluated exactly in mode space; other powers are evaluated
/// pointwise over band tuples and usually exceed the work budget.
ExpansionResult quintic_expansion_check(const Field& u, double p, const Band& band, std::size_t nodes,
                                        double budget = 2e10);

}  // namespace gkdv
