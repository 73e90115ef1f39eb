#include <doctest.h>

#include <numbers>

#include "gkdv/airy.hpp"
#include "gkdv/littlewood_paley.hpp"
#include "gkdv/random.hpp"
#include "support.hpp"

using namespace gkdv;
using gkdv::testing::grid;
using gkdv::testing::max_diff;
using gkdv::testing::sup;

TEST_CASE("lattice exponents") {
  CHECK(scale_lambda(0) == 1.0);
  CHECK(scale_lambda(1) == 1.01);
  CHECK(scale_lambda(-1) == doctest::Approx(1.0 / 1.01).epsilon(1e-15));
  for (double v : {0.013, 0.5, 1.0, 7.3, 300.0}) {
    const int lo = floor_exponent(v), hi = ceil_exponent(v);
    CHECK(scale_lambda(lo) <= v);
    CHECK(scale_lambda(lo + 1) > v);
    CHECK(scale_lambda(hi) >= v);
    CHECK(scale_lambda(hi - 1) < v);
  }
  CHECK(floor_exponent(scale_lambda(37)) == 37);
}

TEST_CASE("bump profile") {
  CHECK(bump(0.0) == 1.0);
  CHECK(bump(1.0) == 1.0);
  CHECK(bump(2.0) == 0.0);
  CHECK(bump(-0.5) == 1.0);
  double prev = 1.0;
  for (double s = 1.0; s <= 2.0; s += 0.01) {
    const double b = bump(s);
    CHECK(b >= 0.0);
    CHECK(b <= prev);
    prev = b;
  }
  CHECK(bump(1.5) == doctest::Approx(0.5));
}

TEST_CASE("band symbols") {
  Rng rng(3);
  std::uniform_real_distribution<double> ud(0.01, 50.0);
  for (int z : {-200, -3, 0, 5, 250}) {
    CHECK(psi_symbol(z, 0.0) == 0.0);
    const double lam = scale_lambda(z);
    for (int i = 0; i < 20; ++i) {
      const double xi = ud(rng);
      CHECK(psi_symbol(z, xi) == doctest::Approx(psi_symbol(0, xi / lam)).epsilon(1e-12));
      CHECK(psi_symbol(z, -xi) == psi_symbol(z, xi));
      CHECK(psi_symbol(z, xi) >= 0.0);
    }
    // Support (lambda / 1.01, 2 lambda).
    CHECK(psi_symbol(z, 2.0 * lam) == 0.0);
    CHECK(psi_symbol(z, lam / 1.01) == 0.0);
    CHECK(psi_symbol(z, 1.5 * lam) > 0.0);
  }
  // Telescoping: P_{<z} = P_{<=z} - P_z.
  for (double xi : {0.3, 1.0, 1.7, 4.2}) CHECK(lt_symbol(7, xi) == doctest::Approx(leq_symbol(7, xi) - psi_symbol(7, xi)));
}

TEST_CASE("partition of unity on a small grid") {
  const GridSpec g = grid(30.0, 256);
  const Band band = default_band(g);
  for (std::size_t m = 1; m <= g.points / 2; ++m) {
    double sum = 0.0;
    for (int z = band.lo; z <= band.hi; ++z) sum += psi_symbol(z, g.xi(m));
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("projections") {
  const GridSpec g = grid(40.0, 256);
  const double xi0 = g.xi(20);
  const Field harmonic = Field::sample(g, [xi0](double x) { return std::cos(xi0 * x); });

  SUBCASE("far scale gives zero") {
    // Exact zeros on the coefficients; the field carries transform rounding only.
    const Spectrum s = forward_transform(harmonic);
    const Spectrum low = project(s, floor_exponent(xi0 / 10.0));
    CHECK(std::abs(low.coeffs[20]) == 0.0);
    CHECK(sup(project(harmonic, floor_exponent(xi0 / 10.0))) <= 1e-15);
    CHECK(sup(project(harmonic, ceil_exponent(xi0 * 3.0))) <= 1e-15);
  }
  SUBCASE("disjoint bands compose to zero") {
    Rng rng(8);
    const Spectrum s = forward_transform(white_noise(g, rng));
    const int z = floor_exponent(2.0);
    const int far = z + 80;  // 1.01^80 > 2.02
    CHECK(l2_norm(project(project(s, z), far)) == 0.0);
  }
  SUBCASE("reconstruction and near-orthogonality") {
    Rng rng(9);
    const Field f = white_noise(g, rng);
    const Band band = default_band(g);
    Field sum = Field::zeros(g);
    double energy = 0.0;
    for (const auto& piece : decompose(f, band)) {
      sum = sum + piece.field;
      energy += std::pow(l2_norm(piece.field), 2);
    }
    const double mean = forward_transform(f).coeffs[0].real();
    for (auto& v : sum.values) v += mean;
    CHECK(max_diff(sum, f) <= 1e-10 * sup(f));
    // psi >= 0 and sum psi = 1 imply sum psi^2 <= 1.
    CHECK(energy <= std::pow(l2_norm(f), 2));
    const auto energies = band_energies(forward_transform(f), band);
    double from_coeffs = 0.0;
    for (double e : energies) from_coeffs += e;
    CHECK(from_coeffs == doctest::Approx(energy).epsilon(1e-10));
  }
  SUBCASE("two harmonics give two clusters") {
    const double xi1 = g.xi(3), xi2 = g.xi(60);
    const Field f = Field::sample(g, [&](double x) { return std::cos(xi1 * x) + std::sin(xi2 * x); });
    const auto pieces = decompose(f, default_band(g));
    int clusters = 0;
    bool prev_active = false;
    for (const auto& p : pieces) {
      const bool active = sup(p.field) > 0.0;
      if (active && !prev_active) ++clusters;
      prev_active = active;
    }
    CHECK(clusters == 2);
  }
  SUBCASE("commutes with the Airy group") {
    Rng rng(10);
    const Spectrum s = forward_transform(white_noise(g, rng));
    const int z = floor_exponent(3.0);
    CHECK(l2_norm(evolve(project(s, z), 0.7) - project(evolve(s, 0.7), z)) <= 1e-12 * l2_norm(s));
  }
}

TEST_CASE("out-of-band fraction and coverage") {
  const GridSpec g = grid(40.0, 256);
  const Field one = Field::sample(g, [](double) { return 1.0; });
  CHECK(out_of_band_fraction(forward_transform(one), default_band(g)) == doctest::Approx(1.0));
  Rng rng(12);
  const Field f = random_band_limited(g, 1.0, 3.0, rng);
  CHECK(out_of_band_fraction(forward_transform(f), default_band(g)) < 1e-12);
  const auto rows = band_coverage(f, default_band(g));
  CHECK(rows.size() == default_band(g).size());
  CHECK_FALSE(band_resolved(g, ceil_exponent(10.0 * g.nyquist())));
  CHECK(band_resolved(g, floor_exponent(2.0)));
}
