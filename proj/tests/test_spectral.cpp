#include <doctest.h>

#include <numbers>

#include "gkdv/error.hpp"
#include "gkdv/random.hpp"
#include "gkdv/spectral.hpp"
#include "support.hpp"

using namespace gkdv;
using gkdv::testing::grid;
using gkdv::testing::max_diff;
using gkdv::testing::sup;

TEST_CASE("grid validation lists every problem") {
  GridSpec g = grid(-1.0, 7, 0.0, 10);
  try {
    g.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("length") != std::string::npos);
    CHECK(msg.find("points") != std::string::npos);
    CHECK(msg.find("dt") != std::string::npos);
  }
  CHECK_NOTHROW(grid(10.0, 64).validate());
}

TEST_CASE("transform round trip and Parseval") {
  const GridSpec g = grid(37.0, 512);
  Rng rng(derive_seed(1, 0));
  const Field f = white_noise(g, rng);
  const Spectrum s = forward_transform(f);
  CHECK(max_diff(inverse_transform(s), f) <= 1e-12 * sup(f));
  const double direct = std::pow(lq_norm(f, 2.0), 2);
  CHECK(std::abs(direct - std::pow(l2_norm(s), 2)) <= 1e-12 * direct);
}

TEST_CASE("coefficient convention of a single cosine") {
  const GridSpec g = grid(10.0, 64);
  const double k = 2.0 * std::numbers::pi * 3.0 / g.length;
  const Spectrum s = forward_transform(Field::sample(g, [k](double x) { return std::cos(k * x); }));
  CHECK(std::abs(s.coeffs[3] - Complex(0.5, 0.0)) < 1e-14);
  for (std::size_t m = 0; m < s.coeffs.size(); ++m)
    if (m != 3) CHECK(std::abs(s.coeffs[m]) < 1e-14);
}

TEST_CASE("multipliers") {
  const GridSpec g = grid(10.0, 64);
  const double k = 2.0 * std::numbers::pi / g.length;
  const Field c = Field::sample(g, [k](double x) { return std::cos(k * x); });
  const Field sn = Field::sample(g, [k](double x) { return std::sin(k * x); });

  SUBCASE("identity") { CHECK(max_diff(apply_multiplier(c, [](double) { return Complex(1.0); }), c) < 1e-14); }
  SUBCASE("derivative of cosine") {
    const Field d = apply_multiplier(c, [](double xi) { return Complex(0.0, xi); });
    CHECK(max_diff(d, -k * sn) < 1e-13);
  }
  SUBCASE("i xi twice equals -xi^2") {
    Rng rng(4);
    const Field f = random_band_limited(g, 0.5, 5.0, rng);
    auto dx = [](double xi) { return Complex(0.0, xi); };
    const Field twice = apply_multiplier(apply_multiplier(f, dx), dx);
    const Field once = apply_multiplier(f, [](double xi) { return Complex(-xi * xi); });
    CHECK(max_diff(twice, once) <= 1e-12 * sup(once));
  }
  SUBCASE("linearity") {
    Rng rng(5);
    const Field a = white_noise(g, rng), b = white_noise(g, rng);
    auto m = [](double xi) { return std::exp(Complex(0.0, xi * xi * xi * 0.3)); };
    const Field lhs = apply_multiplier(2.0 * a + (-3.0) * b, m);
    const Field rhs = 2.0 * apply_multiplier(a, m) + (-3.0) * apply_multiplier(b, m);
    CHECK(max_diff(lhs, rhs) <= 1e-12 * sup(lhs));
  }
}

TEST_CASE("Lebesgue norms") {
  const GridSpec g = grid(10.0, 128);
  const Field one = Field::sample(g, [](double) { return 1.0; });
  CHECK(l2_norm(one) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
  CHECK(lq_norm(one, INFINITY) == 1.0);
  Rng rng(9);
  const Field f = white_noise(g, rng);
  for (double q : {1.0, 2.0, 3.5, 6.0, double(INFINITY)})
    CHECK(lq_norm(2.0 * f, q) == doctest::Approx(2.0 * lq_norm(f, q)).epsilon(1e-13));
  CHECK_THROWS_AS(lq_norm(f, 0.5), ValidationError);
}

TEST_CASE("mixed norms") {
  const GridSpec g = grid(10.0, 64, 0.1, 8);
  Rng rng(11);
  const Field f = white_noise(g, rng);
  Path constant = Path::zeros(g);
  for (auto& s : constant.snapshots) s = f;
  CHECK(mixed_norm(constant, INFINITY, 3.0) == doctest::Approx(lq_norm(f, 3.0)).epsilon(1e-14));

  // Constant in time: the trapezoid rule integrates exactly.
  CHECK(mixed_norm(constant, 2.0, 2.0) == doctest::Approx(std::sqrt(g.horizon()) * l2_norm(f)).epsilon(1e-12));

  Path random = Path::zeros(g);
  for (auto& s : random.snapshots) s = white_noise(g, rng);
  // (q, q) collapses to the flat space-time L^q norm with trapezoid weights in time.
  double flat = 0.0;
  for (std::size_t k = 0; k < random.size(); ++k) {
    const double wt = (k == 0 || k + 1 == random.size()) ? 0.5 * g.dt : g.dt;
    flat += wt * std::pow(lq_norm(random.snapshots[k], 4.0), 4.0);
  }
  CHECK(mixed_norm(random, 4.0, 4.0) == doctest::Approx(std::pow(flat, 0.25)).epsilon(1e-12));
  CHECK_THROWS_AS(mixed_norm(random, 0.0, 2.0), ValidationError);
}

TEST_CASE("zero padding interpolates and truncation inverts it") {
  const GridSpec g = grid(20.0, 64);
  Rng rng(2);
  const Field f = random_band_limited(g, 0.3, 4.0, rng);
  const Field fine = zero_pad(forward_transform(f), 256);
  for (std::size_t j = 0; j < f.size(); ++j) CHECK(std::abs(fine.values[4 * j] - f.values[j]) < 1e-12);
  const Spectrum back = truncate(forward_transform(fine), g);
  CHECK(l2_norm(back - forward_transform(f)) < 1e-13);
  CHECK_THROWS_AS(zero_pad(forward_transform(f), 32), ValidationError);
}

TEST_CASE("field algebra checks grids") {
  const Field a = Field::zeros(grid(10.0, 64));
  const Field b = Field::zeros(grid(10.0, 128));
  CHECK_THROWS_AS(a + b, ValidationError);
  CHECK_THROWS_AS(Field(grid(10.0, 64), std::vector<double>(3)), ValidationError);
}
