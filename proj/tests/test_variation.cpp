#include <doctest.h>

#include "gkdv/airy.hpp"
#include "gkdv/error.hpp"
#include "gkdv/random.hpp"
#include "gkdv/variation.hpp"
#include "support.hpp"

using namespace gkdv;
using gkdv::testing::grid;

namespace {

SampledPath scalar_path(const std::vector<double>& xs, bool terminal = true) {
  SampledPath p;
  p.terminal_zero = terminal;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    p.times.push_back(static_cast<double>(i));
    p.values.push_back({xs[i]});
  }
  return p;
}

SampledPath random_path(Rng& rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> nd;
  SampledPath p;
  for (std::size_t i = 0; i < n; ++i) {
    p.times.push_back(0.5 * static_cast<double>(i));
    std::vector<double> v(dim);
    for (auto& x : v) x = nd(rng);
    p.values.push_back(v);
  }
  return p;
}

SampledPath combine(const SampledPath& a, const SampledPath& b, double ca, double cb) {
  SampledPath out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.values[i].size(); ++j) out.values[i][j] = ca * a.values[i][j] + cb * b.values[i][j];
  return out;
}

}  // namespace

TEST_CASE("V^p of simple paths") {
  CHECK(vp_norm(scalar_path({3.0, 3.0, 3.0}), 2.0) == doctest::Approx(3.0));
  CHECK(vp_norm(scalar_path({3.0, 3.0, 3.0}, false), 2.0) == 0.0);
  CHECK(vp_norm(scalar_path({0.0, 1.0, 0.0}, false), 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(vp_norm(scalar_path({0.0, 0.0}), 1.5) == 0.0);
  CHECK_THROWS_AS(vp_norm(scalar_path({1.0, 2.0}), 0.9), ValidationError);
}

TEST_CASE("dynamic program matches enumeration") {
  for (int i = 0; i < 40; ++i) {
    Rng rng(derive_seed(51, i));
    SampledPath p = random_path(rng, 10, 1 + i % 3);
    p.terminal_zero = i % 2 == 0;
    for (double q : {1.0, 2.0, 2.5, 4.0}) CHECK(vp_norm(p, q) == vp_norm_exhaustive(p, q));
  }
}

TEST_CASE("V^p is a norm and decreases in p") {
  for (int i = 0; i < 20; ++i) {
    Rng rng(derive_seed(52, i));
    const SampledPath a = random_path(rng, 9, 3), b = random_path(rng, 9, 3);
    for (double q : {1.0, 2.0, 3.0}) {
      CHECK(vp_norm(combine(a, b, 1.0, 1.0), q) <= vp_norm(a, q) + vp_norm(b, q) + 1e-10);
      CHECK(vp_norm(combine(a, b, -2.5, 0.0), q) == doctest::Approx(2.5 * vp_norm(a, q)).epsilon(1e-10));
    }
    CHECK(vp_norm(a, 3.0) <= vp_norm(a, 2.0));
    CHECK(vp_norm(a, 2.0) <= vp_norm(a, 1.0));
  }
}

TEST_CASE("sampled path validation") {
  SampledPath p = scalar_path({1.0, 2.0});
  p.times[1] = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = scalar_path({1.0, 2.0});
  p.values[1] = {1.0, 2.0};
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("adapted V^2 norm") {
  const GridSpec g = grid(40.0, 256, 0.05, 12);
  const Field phi = gaussian_packet(g, 1.0, 1.5, 0.0, 1.2);
  CHECK(v2_kdv_norm(free_solution(phi, g)) == doctest::Approx(l2_norm(phi)).epsilon(1e-12));
  CHECK(v2_kdv_norm(Path::zeros(g)) == 0.0);

  // Duhamel path with smooth forcing: halving dt changes the value by < 2%.
  auto value = [&](double dt, std::size_t steps) {
    const GridSpec gg = g.with_time(dt, steps);
    Path f = free_solution(gaussian_packet(gg, 1.0, 1.0, 3.0, 0.5), gg);
    for (std::size_t k = 0; k < f.size(); ++k) f.snapshots[k] = std::cos(3.0 * gg.time(k)) * f.snapshots[k];
    return v2_kdv_norm(duhamel(f));
  };
  const double coarse = value(0.05, 12), fine = value(0.025, 24);
  CHECK(std::abs(coarse - fine) <= 0.02 * fine);
}

TEST_CASE("bilinear form") {
  Rng rng(60);
  const SampledPath u = random_path(rng, 8, 4);
  SampledPath v = random_path(rng, 8, 4);
  v.terminal_zero = false;
  const Partition full = full_partition(8);

  SUBCASE("constant v gives zero") {
    SampledPath c = v;
    for (auto& x : c.values) x = v.values[0];
    CHECK(bilinear_form(u, c, full) == 0.0);
  }
  SUBCASE("constant u telescopes") {
    SampledPath c = u;
    for (auto& x : c.values) x = u.values[2];
    double expected = 0.0;
    for (std::size_t j = 0; j < 4; ++j) expected += u.weight * u.values[2][j] * (v.values[7][j] - v.values[0][j]);
    CHECK(bilinear_form(c, v, full) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("refinement converges to the Stieltjes integral") {
    // u = (cos t, sin t), v = (t, t^2) on [0, 1]: int <u, v'> dt = 3 sin 1 - 2 cos 1,
    // which integration by parts turns into the boundary term minus int <u', v>.
    const double exact = 3.0 * std::sin(1.0) - 2.0 * std::cos(1.0);
    auto error = [exact](std::size_t n) {
      SampledPath a, b;
      a.terminal_zero = b.terminal_zero = false;
      for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n);
        a.times.push_back(t);
        b.times.push_back(t);
        a.values.push_back({std::cos(t), std::sin(t)});
        b.values.push_back({t, t * t});
      }
      return std::abs(bilinear_form(a, b, full_partition(n + 1)) - exact);
    };
    const double coarse = error(40), fine = error(80);
    CHECK(fine < 0.6 * coarse);
    CHECK(fine < 0.02);
  }
  SUBCASE("mismatched inputs are rejected") {
    SampledPath shifted = v;
    shifted.times[3] += 0.1;
    CHECK_THROWS_AS(bilinear_form(u, shifted, full), ValidationError);
    CHECK_THROWS_AS(bilinear_form(u, v, Partition{{3}}), ValidationError);
    CHECK_THROWS_AS(bilinear_form(u, v, Partition{{3, 2}}), ValidationError);
  }
}

TEST_CASE("duality lower bound") {
  const GridSpec g = grid(40.0, 256, 0.05, 10);
  const Field phi = gaussian_packet(g, 1.0, 1.5, 0.0, 1.2);
  const Path v = free_solution(phi, g);
  const double lb = duality_lower_bound(v);
  CHECK(lb <= l2_norm(phi) * (1.0 + 1e-12));
  CHECK(lb >= 0.9 * l2_norm(phi));
  CHECK(duality_lower_bound(Path::zeros(g)) == 0.0);
  CHECK(duality_lower_bound(2.0 * v) == doctest::Approx(2.0 * lb).epsilon(1e-12));
}
