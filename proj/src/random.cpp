#include "gkdv/random.hpp"

#include <cmath>
#include <numbers>

namespace gkdv {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Field white_noise(const GridSpec& g, Rng& rng) {
  std::normal_distribution<double> nd;
  Field f = Field::zeros(g);
  for (double& v : f.values) v = nd(rng);
  return f;
}

Field random_band_limited(const GridSpec& g, double xi_lo, double xi_hi, Rng& rng) {
  std::normal_distribution<double> nd;
  Spectrum s = Spectrum::zeros(g);
  const std::size_t half = g.points / 2;
  for (std::size_t m = 1; m < half; ++m) {
    const double xi = g.xi(m);
    if (xi >= xi_lo && xi <= xi_hi) {
      const double re = nd(rng);
      const double im = nd(rng);
      s.coeffs[m] = Complex(re, im);
    }
  }
  return inverse_transform(s);
}

Field gaussian_packet(const GridSpec& g, double amplitude, double width, double centre, double carrier,
                      double phase) {
  return Field::sample(g, [=](double x) {
    const double y = x - centre;
    return amplitude * std::cos(carrier * y + phase) * std::exp(-0.5 * y * y / (width * width));
  });
}

Field random_packets(const GridSpec& g, double lambda, const PacketLaw& law, Rng& rng) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  Field out = Field::zeros(g);
  const double width = law.width_factor / lambda;
  for (int i = 0; i < law.count; ++i) {
    const double amp = nd(rng);
    const double carrier = lambda * (1.0 + 0.9 * ud(rng));
    const double phase = 2.0 * std::numbers::pi * ud(rng);
    const double centre = law.centre_spread * (2.0 * ud(rng) - 1.0);
    const Field pk = gaussian_packet(g, amp, width, centre, carrier, phase);
    for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += pk.values[j];
  }
  return out;
}

}  // namespace gkdv
