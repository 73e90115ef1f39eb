#pragma once

// Hot loops shared by the norm and estimate code. Every kernel has a serial
// reference path and an OpenMP path; both produce bitwise-identical results
// because reductions are done per output element in a fixed order.

#include <cstddef>
#include <span>
#include <vector>

#include "gkdv/littlewood_paley.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv::kernels {

enum class Exec { serial, parallel };

/// Number of worker threads used by Exec::parallel (0 = OpenMP default).
void set_threads(int n);
int threads();

/// Row-major n x dim matrix of real samples; returns the n x n matrix of
/// weight * sum (row_j - row_k)^2.
std::vector<double> pairwise_sq_distances(std::span<const double> rows, std::size_t n, std::size_t dim, double weight,
                                          Exec exec = Exec::parallel);

/// Supremum over partitions of the sample indices of sum |increment|^p,
/// given squared pairwise distances (n x n) and squared norms of each sample
/// (used only for the terminal jump to zero). Returns the p-th power.
double vp_power_from_distances(std::span<const double> sq_dist, std::span<const double> sq_norms, std::size_t n,
                               double p, bool terminal);

/// V^2 norm of every Littlewood-Paley piece of a sampled spectral path.
/// `spectra` holds n half-spectra of length grid.modes() back to back.
std::vector<double> band_v2_norms(std::span<const Complex> spectra, std::size_t n, const GridSpec& grid,
                                  const Band& band, bool terminal, Exec exec = Exec::parallel);
/// Same for an explicit list of scale exponents.
std::vector<double> band_v2_norms(std::span<const Complex> spectra, std::size_t n, const GridSpec& grid,
                                  std::span<const int> exponents, bool terminal, Exec exec = Exec::parallel);

/// Space-time L^q norm (trapezoid in time, rectangle in space) of one band of
/// a sampled spectral path: || P_z u ||_{L^q_t L^q_x}.
double band_lq_norm(std::span<const Complex> spectra, std::size_t n, const GridSpec& grid, int z, double q,
                    Exec exec = Exec::parallel);

}  // namespace gkdv::kernels
