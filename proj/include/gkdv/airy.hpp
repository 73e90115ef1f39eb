#pragma once

// Airy group S(t) = exp(-t d^3/dx^3): mode xi is multiplied by exp(i xi^3 t),
// so v(t) = S(t) phi solves v_t + v_xxx = 0. The Nyquist mode is a cosine whose
// discrete third derivative vanishes; it is left untouched.

#include "gkdv/spectral.hpp"

namespace gkdv {

Spectrum evolve(const Spectrum& s, double t);
Field evolve(const Field& f, double t);

/// Snapshot k is S(k dt) phi.
Path free_solution(const Field& phi, const GridSpec& grid);

/// t -> int_0^t S(t - s) forcing(s) ds on the forcing's time grid. The
/// integrand is pulled back to g(s) = S(-s) forcing(s) and integrated with
/// composite Simpson weights (3/8 rule on the last three intervals for odd
/// counts, trapezoid on the first interval).
Path duhamel(const Path& forcing);
Path duhamel(const Path& forcing, const GridSpec& grid);

/// Spectral form of duhamel: input and output are per-snapshot spectra.
std::vector<Spectrum> duhamel_spectral(const std::vector<Spectrum>& forcing, double dt);

/// Weights integrating k + 1 uniform samples over [0, k dt]: composite Simpson,
/// the 3/8 rule on the last three intervals for odd k, trapezoid for k = 1.
std::vector<double> cumulative_weights(std::size_t k, double dt);

/// max_k || (w_{k+1} - w_{k-1}) / (2 dt) + w_xxx(t_k) - rhs(t_k) ||_{L^2} over
/// interior snapshots; rhs may be null (free equation).
double airy_residual(const Path& w, const Path* rhs = nullptr);

/// Spectral x-derivative.
Spectrum derivative(const Spectrum& s);
Field derivative(const Field& f);

}  // namespace gkdv
