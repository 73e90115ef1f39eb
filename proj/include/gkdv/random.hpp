#pragma once

#include <cstdint>
#include <random>

#include "gkdv/spectral.hpp"

namespace gkdv {

using Rng = std::mt19937_64;

/// splitmix64 finalizer applied to master + index; used to give every trial
/// its own independent stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Independent standard normal samples.
Field white_noise(const GridSpec& g, Rng& rng);

/// Random conjugate-symmetric coefficients on the modes with xi_lo <= |xi| <= xi_hi
/// (complex Gaussian), Nyquist and mean excluded.
Field random_band_limited(const GridSpec& g, double xi_lo, double xi_hi, Rng& rng);

/// a cos(k (x - c) + theta) exp(-(x - c)^2 / (2 w^2)).
Field gaussian_packet(const GridSpec& g, double amplitude, double width, double centre = 0.0, double carrier = 0.0,
                      double phase = 0.0);

struct PacketLaw {
  int count = 4;              // packets per trial
  double width_factor = 6.0;  // packet width = width_factor / lambda
  double centre_spread = 0.0; // centres uniform in [-spread, spread]
};

/// Sum of Gaussian wave packets with carriers drawn from [lambda, 1.9 lambda],
/// random phases, normal amplitudes and centres. Not yet frequency projected.
Field random_packets(const GridSpec& g, double lambda, const PacketLaw& law, Rng& rng);

}  // namespace gkdv
