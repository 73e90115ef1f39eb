#pragma once

// Duhamel fixed-point construction psi = v + w with v = S(t) phi and
//   w_{n+1}(t) = -int_0^t S(t - s) d_x f(v + w_n)(s) ds,  w_0 = 0,
// plus an integrating-factor Runge-Kutta solver used as the reference.
//
// Iterates live on a fine time grid (grid.dt / substeps); reported paths and
// X-norms use the coarse grid.

#include <optional>
#include <string>
#include <vector>

#include "gkdv/error.hpp"
#include "gkdv/estimate_lab.hpp"
#include "gkdv/kernels.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

struct PicardConfig {
  GridSpec grid;                    // T = grid.dt * grid.steps
  Field data;
  double p = 5.0;
  std::size_t max_iters = 40;
  double contraction_target = 0.5;
  double tolerance = 1e-11;         // relative to the size of v in each norm
  std::size_t substeps = 40;        // fine Duhamel steps per coarse step
  double smallness_gate = 1.0;      // delta_0 for the L^6 gate (warning only)
  double ceiling = 1e6;             // divergence when ||w||_inf exceeds ceiling * ||phi||_inf
  kernels::Exec exec = kernels::Exec::parallel;

  void validate() const;
};

struct IterationRow {
  std::size_t n = 0;
  double w_norm = 0.0;     // ||w_n||_X
  double diff_norm = 0.0;  // ||w_n - w_{n-1}||_X
  double diff_l2 = 0.0;    // ||w_n - w_{n-1}||_{L^inf L^2}
  double ratio = 0.0;      // q_{n-1} = diff_n / diff_{n-1}; 0 for n = 1
  double residual = 0.0;   // mild gKdV residual of v + w_{n-1}
};

struct IterationTrace {
  std::vector<IterationRow> rows;
  bool converged = false;
  bool diverged = false;
  std::string reason;
  double alpha = 0.0;       // ||w_1||_X / (1 - max q), bound on every iterate
  double max_ratio = 0.0;
  bool contraction_ok = false;  // every q below contraction_target
  SmallnessResult smallness;
  std::vector<std::string> warnings;

  std::size_t iterations() const { return rows.size(); }
};

class DivergenceError : public NumericalFailure {
 public:
  DivergenceError(const std::string& what, IterationTrace t) : NumericalFailure(what), trace(std::move(t)) {}
  IterationTrace trace;
};

class BlowUpError : public NumericalFailure {
 public:
  BlowUpError(const std::string& what, double t) : NumericalFailure(what), time(t) {}
  double time;
};

struct PicardResult {
  Path w;       // coarse grid
  Path v;       // free solution on the coarse grid
  IterationTrace trace;
};

/// One iteration on a single time grid: -duhamel(d_x f_p(v + w_prev)).
Path picard_step(const Path& v, const Path& w_prev, double p);

/// Iterates to tolerance; throws DivergenceError (carrying the trace) when
/// q_n >= 1 three times in a row, values become non-finite or exceed the ceiling.
PicardResult solve_picard(const PicardConfig& cfg);

/// Integrating-factor RK4 for psi_t + psi_xxx + (|psi|^{p-1} psi)_x = 0 with
/// `substeps` fine steps per coarse step. Throws BlowUpError past the ceiling.
Path direct_solve(const Field& phi, double p, const GridSpec& grid, std::size_t substeps = 40, double ceiling = 1e6);
Path direct_solve(const Field& phi, double p, double T);

struct BracketStep {
  double amplitude = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  double last_ratio = 0.0;
};

struct ThresholdReport {
  double lo = 0.0;   // largest amplitude seen to converge
  double hi = 0.0;   // smallest amplitude seen to fail
  std::vector<BracketStep> steps;
  double threshold() const { return lo; }
};

/// Amplitude a multiplies cfg.data. Doubles or halves from `start` until the
/// outcome changes, then bisects until (hi - lo) <= rel_width * lo.
ThresholdReport bisect_threshold(const PicardConfig& cfg, double start = 1.0, double rel_width = 0.01);

struct LipschitzLevel {
  double perturbation = 0.0;  // ||delta phi||_B
  double difference = 0.0;    // ||w - w'||_X
  double ratio = 0.0;
};

/// Ratios ||w(phi) - w(phi + d)||_X / ||d||_B for d = delta, delta/2, ...
/// (levels entries). delta = 0 gives ratio 0.
std::vector<LipschitzLevel> lipschitz_probe(const PicardConfig& cfg, const Field& delta, std::size_t levels = 4);

struct HorizonRow {
  double horizon = 0.0;
  double w_norm = 0.0;
  double max_ratio = 0.0;
  std::size_t iterations = 0;
};

/// Same data solved on [0, T] for each T (coarse dt kept); slope of log ||w||_X
/// against log T is the growth trend.
std::vector<HorizonRow> horizon_probe(const PicardConfig& cfg, const std::vector<double>& horizons);
double horizon_trend(const std::vector<HorizonRow>& rows);

/// Default smooth test datum: Gaussian packet with the given carrier and
/// spectral width, unit amplitude.
Field packet_datum(const GridSpec& g, double carrier = 2.6, double spectral_width = 1.6);

}  // namespace gkdv
