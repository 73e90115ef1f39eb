#include <doctest.h>

#include <numbers>

#include "gkdv/airy.hpp"
#include "gkdv/error.hpp"
#include "gkdv/random.hpp"
#include "support.hpp"

using namespace gkdv;
using gkdv::testing::grid;
using gkdv::testing::max_diff;
using gkdv::testing::sup;

TEST_CASE("group identity, law and unitarity") {
  const GridSpec g = grid(60.0, 512);
  Rng rng(21);
  const Field f = white_noise(g, rng);
  CHECK(max_diff(evolve(f, 0.0), f) <= 1e-14 * sup(f));
  const Spectrum s = forward_transform(f);
  CHECK(l2_norm(evolve(evolve(s, 0.25), 0.5) - evolve(s, 0.75)) <= 1e-12 * l2_norm(s));
  CHECK(std::abs(l2_norm(evolve(s, 3.3)) - l2_norm(s)) <= 1e-12 * l2_norm(s));
  CHECK(l2_norm(evolve(evolve(s, 1.3), -1.3) - s) <= 1e-12 * l2_norm(s));
}

TEST_CASE("single harmonic phase advances by xi^3 t") {
  const GridSpec g = grid(20.0, 64);
  const double xi = g.xi(4), t = 0.37;
  const Field c = Field::sample(g, [xi](double x) { return std::cos(xi * x); });
  const Field expected = Field::sample(g, [xi, t](double x) { return std::cos(xi * x + xi * xi * xi * t); });
  CHECK(max_diff(evolve(c, t), expected) < 1e-12);
}

TEST_CASE("free solution") {
  const GridSpec g = grid(40.0, 256, 0.002, 50);
  CHECK(sup(free_solution(Field::zeros(g), g).snapshots.back()) == 0.0);
  const Field phi = gaussian_packet(g, 1.0, 2.0, 0.0, 1.0);
  const Path v = free_solution(phi, g);
  REQUIRE(v.size() == 51);
  for (const auto& s : v.snapshots) CHECK(std::abs(l2_norm(s) - l2_norm(phi)) <= 1e-12 * l2_norm(phi));
  // Centered differences: O(dt^2) residual.
  const double r1 = airy_residual(v);
  const Path fine = free_solution(phi, g.with_time(0.001, 100));
  const double r2 = airy_residual(fine);
  CHECK(r2 < 0.3 * r1);
}

TEST_CASE("quadrature weights integrate cubics exactly") {
  const double dt = 0.1;
  for (std::size_t k : {2, 3, 5, 6, 7, 20}) {
    const auto w = cumulative_weights(k, dt);
    REQUIRE(w.size() == k + 1);
    double sum = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
      const double t = dt * static_cast<double>(j);
      sum += w[j] * (1.0 - 2.0 * t + 3.0 * t * t * t);
    }
    const double T = dt * static_cast<double>(k);
    CHECK(sum == doctest::Approx(T - T * T + 0.75 * T * T * T * T).epsilon(1e-13));
  }
  const auto trap = cumulative_weights(1, dt);
  CHECK(trap[0] == doctest::Approx(0.05));
  CHECK(trap[1] == doctest::Approx(0.05));
}

TEST_CASE("Duhamel integral") {
  const GridSpec g = grid(40.0, 128, 0.01, 40);
  const Field phi = gaussian_packet(g, 1.0, 2.0, 0.0, 0.8);

  SUBCASE("zero forcing") { CHECK(sup(duhamel(Path::zeros(g)).snapshots.back()) == 0.0); }
  SUBCASE("free forcing gives t S(t) phi") {
    const Path v = free_solution(phi, g);
    const Path d = duhamel(v);
    CHECK(sup(d.snapshots[0]) == 0.0);
    for (std::size_t k = 0; k < d.size(); ++k)
      CHECK(max_diff(d.snapshots[k], g.time(k) * v.snapshots[k]) <= 1e-12 * sup(phi));
  }
  SUBCASE("linearity") {
    Rng rng(30);
    Path a = Path::zeros(g), b = Path::zeros(g);
    for (std::size_t k = 0; k < a.size(); ++k) {
      a.snapshots[k] = random_band_limited(g, 0.2, 2.0, rng);
      b.snapshots[k] = random_band_limited(g, 0.2, 2.0, rng);
    }
    const Path lhs = duhamel(2.0 * a + (-0.5) * b);
    const Path rhs = 2.0 * duhamel(a) + (-0.5) * duhamel(b);
    CHECK(max_diff(lhs, rhs) <= 1e-12 * gkdv::testing::max_diff(lhs, Path::zeros(g)));
  }
  SUBCASE("smooth forcing is fourth order") {
    // forcing(t) = cos(t) S(t) phi; exact result sin(t) S(t) phi.
    auto error = [&](double dt, std::size_t steps) {
      const GridSpec gg = g.with_time(dt, steps);
      Path f = free_solution(phi, gg);
      for (std::size_t k = 0; k < f.size(); ++k) f.snapshots[k] = std::cos(gg.time(k)) * f.snapshots[k];
      const Path d = duhamel(f);
      const Field exact = std::sin(gg.horizon()) * evolve(phi, gg.horizon());
      return max_diff(d.snapshots.back(), exact);
    };
    const double e1 = error(0.1, 10), e2 = error(0.05, 20);
    CHECK(e1 / e2 > 10.0);
  }
  SUBCASE("mismatched grids are rejected") {
    Path f = Path::zeros(g);
    f.snapshots[3] = Field::zeros(grid(40.0, 64));
    CHECK_THROWS_AS(duhamel(f), ValidationError);
    CHECK_THROWS_AS(duhamel(Path::zeros(g), g.with_time(0.01, 7)), ValidationError);
  }
}

TEST_CASE("spectral derivative") {
  const GridSpec g = grid(10.0, 64);
  const double k = 2.0 * std::numbers::pi * 2.0 / g.length;
  const Field s = Field::sample(g, [k](double x) { return std::sin(k * x); });
  const Field c = Field::sample(g, [k](double x) { return std::cos(k * x); });
  CHECK(max_diff(derivative(s), k * c) < 1e-13);
}
