#include <doctest.h>

#include "gkdv/error.hpp"
#include "gkdv/estimate_lab.hpp"
#include "gkdv/littlewood_paley.hpp"
#include "gkdv/norms.hpp"
#include "support.hpp"

using namespace gkdv;
using gkdv::testing::grid;

namespace {

LabConfig small_lab() {
  LabConfig cfg;
  cfg.trials = 2;
  cfg.length = 100.0;
  cfg.points = 2048;
  cfg.time_samples = 16;
  cfg.sweep_min = 1.0;
  cfg.sweep_max = 8.0;
  cfg.sweep_count = 3;
  return cfg;
}

}  // namespace

TEST_CASE("regression helpers") {
  std::vector<double> x, y;
  for (double v : {0.5, 2.0, 9.0, 40.0}) {
    x.push_back(v);
    y.push_back(3.0 * std::pow(v, -0.7));
  }
  CHECK(loglog_slope(x, y) == doctest::Approx(-0.7).epsilon(1e-12));
  const auto zs = sweep_exponents(0.5, 50.0, 5);
  REQUIRE(zs.size() == 5);
  CHECK(scale_lambda(zs.front()) == doctest::Approx(0.5).epsilon(0.011));
  CHECK(scale_lambda(zs.back()) == doctest::Approx(50.0).epsilon(0.011));
  for (std::size_t i = 1; i < zs.size(); ++i) CHECK(zs[i] > zs[i - 1]);
}

TEST_CASE("trial data") {
  const LabConfig cfg = small_lab();
  const GridSpec g = cfg.grid();
  const int z = floor_exponent(3.0);
  const Spectrum a = trial_spectrum(cfg, g, z, 5);
  const Spectrum b = trial_spectrum(cfg, g, z, 5);
  CHECK(a.coeffs == b.coeffs);
  CHECK(l2_norm(a - trial_spectrum(cfg, g, z, 6)) > 0.0);
  const auto sym = band_symbol(g, z);
  for (std::size_t m = 0; m < a.coeffs.size(); ++m)
    if (m < sym->first || m >= sym->first + sym->weights.size()) CHECK(a.coeffs[m] == Complex(0.0));
}

TEST_CASE("Strichartz report") {
  LabConfig cfg = small_lab();
  CHECK_THROWS_AS(verify_strichartz(cfg, 4.0), ValidationError);
  const EstimateReport rep = verify_strichartz(cfg, 6.0);
  CHECK(rep.records.size() == 6);
  CHECK(rep.expected_slope == doctest::Approx(-1.0 / 6.0));
  for (const auto& r : rep.records) CHECK(r.ratio == doctest::Approx(r.lhs / r.rhs));

  SUBCASE("zero data is excluded") {
    cfg.amplitude = 0.0;
    const EstimateReport z = verify_strichartz(cfg, 6.0);
    CHECK(z.excluded == z.records.size());
    for (const auto& r : z.records) CHECK(r.lhs == 0.0);
  }
  SUBCASE("ratios are invariant under scaling the data") {
    cfg.amplitude = 2.0;
    const EstimateReport d = verify_strichartz(cfg, 6.0);
    for (std::size_t i = 0; i < d.records.size(); ++i) {
      CHECK(d.records[i].lhs == doctest::Approx(2.0 * rep.records[i].lhs).epsilon(1e-12));
      CHECK(d.records[i].ratio == doctest::Approx(rep.records[i].ratio).epsilon(1e-12));
    }
  }
  SUBCASE("thread count does not change results") {
    cfg.exec = kernels::Exec::serial;
    const EstimateReport s = verify_strichartz(cfg, 6.0);
    for (std::size_t i = 0; i < s.records.size(); ++i) CHECK(s.records[i].lhs == rep.records[i].lhs);
  }
}

TEST_CASE("bilinear and interpolated reports") {
  LabConfig cfg = small_lab();
  cfg.horizon = 4.0;
  cfg.sweep_min = 2.0;
  cfg.fixed = 1.0;
  const EstimateReport rep = verify_bilinear(cfg);
  CHECK(rep.excluded == 0);
  cfg.sweep_min = 1.05;
  CHECK_THROWS_AS(verify_bilinear(cfg), ValidationError);

  LabConfig lin = small_lab();
  CHECK(verify_interpolated(lin, 6.0).expected_slope == doctest::Approx(-1.0 / 6.0));
  CHECK(verify_interpolated(lin, 10.0).expected_slope == doctest::Approx(0.1));
  CHECK_THROWS_AS(verify_interpolated(lin, 5.0), ValidationError);
  CHECK_THROWS_AS(verify_interpolated(lin, 6.0, "cubic"), ValidationError);
  CHECK_THROWS_AS(verify_interpolated(lin, 2.0, "bilinear", 5.0), ValidationError);
}

TEST_CASE("multilinear report") {
  MultilinearConfig mc;
  mc.lab = small_lab();
  mc.lab.trials = 2;
  mc.lab.sweep_min = 3.5;
  mc.lab.sweep_max = 10.0;
  mc.lab.sweep_count = 2;
  mc.lab.packets.width_factor = 3.0;

  SUBCASE("p = 5 far case vanishes exactly") {
    mc.p = 5.0;
    const EstimateReport rep = verify_multilinear(mc);
    for (const auto& r : rep.records) CHECK(r.lhs == 0.0);
  }
  SUBCASE("zero factors give zero") {
    mc.p = 6.0;
    mc.lab.amplitude = 0.0;
    const EstimateReport rep = verify_multilinear(mc);
    for (const auto& r : rep.records) CHECK(r.lhs == 0.0);
  }
  SUBCASE("ordering and case constraints") {
    mc.lambdas = {0.3, 0.5, 0.4, 0.6};
    CHECK_THROWS_AS(verify_multilinear(mc), ValidationError);
    mc.lambdas = {0.3, 0.3, 0.3, 0.3};
    mc.which = MultilinearCase::near;
    CHECK_THROWS_AS(verify_multilinear(mc), ValidationError);
    mc.lab.sweep_min = mc.lab.sweep_max = 0.31;
    mc.lab.sweep_count = 1;
    mc.epsilon = 0.01;
    mc.delta = 0.02;
    CHECK_THROWS_AS(verify_multilinear(mc), ValidationError);
  }
}

TEST_CASE("L^6 smallness") {
  const GridSpec g = grid(100.0, 1024, 0.05, 20);
  CHECK(verify_l6_smallness(Field::zeros(g), 5.0).sup == 0.0);
  const Field phi = gaussian_packet(g, 1.0, 2.0, 0.0, 1.5);
  const SmallnessResult a = verify_l6_smallness(phi, 5.0);
  const SmallnessResult b = verify_l6_smallness(3.0 * phi, 5.0);
  CHECK(a.sup > 0.0);
  CHECK(b.sup == doctest::Approx(3.0 * a.sup).epsilon(1e-12));
  CHECK(b.ratio == doctest::Approx(a.ratio).epsilon(1e-12));
}
