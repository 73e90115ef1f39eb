#include <doctest.h>

#include "gkdv/airy.hpp"
#include "gkdv/error.hpp"
#include "gkdv/picard.hpp"
#include "support.hpp"

using namespace gkdv;
using gkdv::testing::grid;
using gkdv::testing::max_diff;
using gkdv::testing::sup;

namespace {

// Short horizon on a grid that resolves the fifth harmonic of the packet carrier.
PicardConfig small_config(double amplitude) {
  PicardConfig cfg;
  cfg.grid = grid(64.0, 512, 0.01, 20);
  cfg.data = amplitude * packet_datum(cfg.grid);
  cfg.substeps = 40;
  return cfg;
}

}  // namespace

TEST_CASE("configuration is validated as a whole") {
  PicardConfig cfg = small_config(0.1);
  cfg.p = 4.0;
  cfg.max_iters = 0;
  cfg.contraction_target = 1.5;
  try {
    solve_picard(cfg);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("p must be >= 5") != std::string::npos);
    CHECK(msg.find("max_iters") != std::string::npos);
    CHECK(msg.find("contraction_target") != std::string::npos);
  }
}

TEST_CASE("single Picard step") {
  const GridSpec g = grid(64.0, 256, 0.02, 20);
  const Path zero = Path::zeros(g);
  CHECK(max_diff(picard_step(zero, zero, 5.0), zero) == 0.0);

  const Field phi = packet_datum(g);
  const Path v = free_solution(phi, g);
  const Path w1 = picard_step(v, zero, 5.0);
  CHECK(sup(w1.snapshots.front()) == 0.0);

  // Quintic smallness: scaling the data by 2 scales the first iterate by 2^5.
  const Path small = picard_step(free_solution(1e-6 * phi, g), zero, 5.0);
  const Path twice = picard_step(free_solution(2e-6 * phi, g), zero, 5.0);
  CHECK(sup(twice.snapshots.back()) == doctest::Approx(32.0 * sup(small.snapshots.back())).epsilon(1e-9));
  CHECK(sup(small.snapshots.back()) < 1e-27);

  Path bad = zero;
  bad.snapshots[0] = phi;
  CHECK_THROWS_AS(picard_step(v, bad, 5.0), ValidationError);
}

TEST_CASE("Picard iteration") {
  SUBCASE("zero data converges at once") {
    const PicardResult r = solve_picard(small_config(0.0));
    CHECK(r.trace.converged);
    CHECK(r.trace.iterations() == 1);
    CHECK(max_diff(r.w, Path::zeros(r.w.grid)) == 0.0);
  }
  SUBCASE("small data contracts and matches the direct solver") {
    const PicardConfig cfg = small_config(0.3);
    const PicardResult r = solve_picard(cfg);
    CHECK(r.trace.converged);
    CHECK(r.trace.contraction_ok);
    CHECK(r.trace.max_ratio <= 0.5);
    CHECK(sup(r.w.snapshots.front()) == 0.0);
    CHECK(r.trace.rows.back().w_norm <= r.trace.alpha * (1.0 + 1e-9));
    const Path ref = direct_solve(cfg.data, cfg.p, cfg.grid, cfg.substeps);
    CHECK(sup_l2_distance(r.v + r.w, ref) <= 1e-5 * l2_norm(cfg.data));
    for (const auto& row : r.trace.rows) {
      CHECK(row.diff_norm >= 0.0);
      CHECK(row.diff_l2 >= 0.0);
    }
  }
  SUBCASE("large data diverges with a trace") {
    try {
      solve_picard(small_config(20.0));
      FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
      CHECK(e.trace.diverged);
      CHECK_FALSE(e.trace.reason.empty());
      CHECK(e.trace.iterations() >= 1);
    }
  }
}

TEST_CASE("direct solver") {
  const GridSpec g = grid(64.0, 512, 0.01, 10);
  CHECK(max_diff(direct_solve(Field::zeros(g), 5.0, g, 4), Path::zeros(g)) == 0.0);

  const Field phi = 0.8 * packet_datum(g);
  const Path psi = direct_solve(phi, 5.0, g, 40);
  const double mass0 = forward_transform(phi).coeffs[0].real();
  const double l2 = l2_norm(phi);
  for (const auto& s : psi.snapshots) {
    CHECK(std::abs(forward_transform(s).coeffs[0].real() - mass0) * g.length <= 1e-10);
    CHECK(std::abs(l2_norm(s) - l2) <= 1e-6 * l2);
  }

  SUBCASE("linear regime") {
    const Field tiny = 1e-3 * packet_datum(g);
    const Path d = direct_solve(tiny, 5.0, g, 4);
    const Path v = free_solution(tiny, g);
    CHECK(sup_l2_distance(d, v) <= 1e-12 * l2_norm(tiny));
  }
  SUBCASE("self-convergence in the time step") {
    // Fourth order shows once h times the cubic phase mismatch of the generated
    // harmonics is small; the default fine step 2.5e-4 is in that regime.
    const GridSpec one = g.with_time(0.05, 1);
    const Field a = direct_solve(phi, 5.0, one, 200).snapshots.back();
    const Field b = direct_solve(phi, 5.0, one, 400).snapshots.back();
    const Field c = direct_solve(phi, 5.0, one, 800).snapshots.back();
    const double order = std::log2(l2_norm(a - b) / l2_norm(b - c));
    CHECK(order >= 3.5);
  }
  SUBCASE("ceiling aborts with the time") {
    try {
      direct_solve(phi, 5.0, g, 4, 0.5);
      FAIL("expected BlowUpError");
    } catch (const BlowUpError& e) {
      CHECK(e.time == doctest::Approx(g.dt));
    }
  }
}

TEST_CASE("probes") {
  const PicardConfig cfg = small_config(0.3);
  SUBCASE("Lipschitz ratios") {
    const auto none = lipschitz_probe(cfg, Field::zeros(cfg.grid), 2);
    for (const auto& l : none) CHECK(l.ratio == 0.0);
    const auto levels = lipschitz_probe(cfg, 1e-3 * cfg.data, 3);
    REQUIRE(levels.size() == 3);
    for (std::size_t i = 1; i < levels.size(); ++i) {
      CHECK(levels[i].perturbation == doctest::Approx(0.5 * levels[i - 1].perturbation));
      CHECK(levels[i].ratio <= 2.0 * levels[0].ratio);
      CHECK(levels[i].ratio >= 0.5 * levels[0].ratio);
    }
  }
  SUBCASE("bisection brackets the threshold") {
    const ThresholdReport rep = bisect_threshold(small_config(1.0), 1.0, 0.05);
    CHECK(rep.lo > 0.0);
    CHECK(rep.hi > rep.lo);
    CHECK(rep.hi - rep.lo <= 0.05 * rep.lo + 1e-12);
    for (const auto& st : rep.steps) {
      if (st.converged) CHECK(st.amplitude <= rep.lo);
      else CHECK(st.amplitude >= rep.hi);
    }
  }
  SUBCASE("horizon trend of a single row is zero") {
    const auto rows = horizon_probe(cfg, {0.5});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].iterations >= 1);
  }
}
