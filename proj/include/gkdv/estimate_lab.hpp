#pragma once

// Randomized measurements of the frequency scaling of linear, bilinear and
// multilinear space-time estimates for localized free Airy solutions.
//
// Trial data are sums of Gaussian wave packets at the target frequency,
// projected onto one Littlewood-Paley band. Every (frequency, trial) pair gets
// its own random stream derived from the master seed, so the report does not
// depend on the number of threads.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gkdv/kernels.hpp"
#include "gkdv/random.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

struct LabConfig {
  std::uint64_t seed = 7;
  std::size_t trials = 16;        // per swept frequency
  double length = 200.0;
  std::size_t points = 32768;
  PacketLaw packets{};
  double horizon = 1.0;           // time horizon scale (see each experiment)
  std::size_t time_samples = 48;
  double sweep_min = 0.25;        // swept frequency range
  double sweep_max = 250.0;
  std::size_t sweep_count = 10;
  double fixed = 1.0;             // frequency held fixed (bilinear mu, multilinear lambdas)
  double amplitude = 1.0;         // global data scale
  kernels::Exec exec = kernels::Exec::parallel;

  GridSpec grid() const;
  void validate() const;
};

struct EstimateRecord {
  std::vector<double> frequencies;
  std::size_t trial = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double normalized = 0.0;  // LHS divided by the data norms only (regressed quantity)
  bool excluded = false;    // zero or rounding-level LHS
  bool flagged = false;     // admissibility edge case
};

struct EstimateReport {
  std::string estimate;
  std::vector<std::string> frequency_names;
  std::size_t swept = 0;          // index into frequencies used for the regression
  std::vector<EstimateRecord> records;
  double slope = 0.0;
  double expected_slope = 0.0;
  double tolerance = 0.0;
  double worst_ratio = 0.0;
  std::size_t excluded = 0;
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<std::string> notes;

  bool slope_ok() const;
};

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Lattice frequencies 1.01^z, evenly spaced in z, spanning [lo, hi].
std::vector<int> sweep_exponents(double lo, double hi, std::size_t count);

/// Band-projected packet data at scale z for one trial. The spectral form is
/// exactly zero outside the band's support.
Spectrum trial_spectrum(const LabConfig& cfg, const GridSpec& g, int z, std::uint64_t stream);
Field trial_data(const LabConfig& cfg, const GridSpec& g, int z, std::uint64_t stream);

/// ||S(t) phi_lambda||_{L^q_t L^r_x([0, T_lambda])} against lambda^{-1/q} ||phi_lambda||,
/// T_lambda = horizon / lambda^3.
EstimateReport verify_strichartz(const LabConfig& cfg, double q, double s = 0.0);

/// ||u_{<=lambda}||_{L^inf_{t,x}} against lambda^{1/2 - s_p} ||u||_{X^{s_p}}.
EstimateReport verify_bernstein_linfty(const LabConfig& cfg, double p);

/// ||v_mu u_lambda||_{L^2_{t,x}} against lambda^{-1} ||phi_mu|| ||phi_lambda||, mu = cfg.fixed,
/// T_lambda = horizon / lambda^2.
EstimateReport verify_bilinear(const LabConfig& cfg);

/// Interpolated forms. kind = "linear": ||u_lambda||_{L^q} against lambda^{1/2-4/q};
/// kind = "bilinear": ||v_mu u_lambda||_{L^q} against mu^{1/2-1/q-s_p} lambda^{1/2-3/q-s_p}.
EstimateReport verify_interpolated(const LabConfig& cfg, double q, const std::string& kind = "linear",
                                   double p = 5.0);

enum class MultilinearCase { near, far };

struct MultilinearConfig {
  LabConfig lab;
  double p = 6.0;
  MultilinearCase which = MultilinearCase::far;
  std::vector<double> lambdas{0.3, 0.3, 0.3, 0.3};  // lambda_2 <= ... <= lambda_5
  double epsilon = 0.02;
  double delta = 0.01;
  std::size_t norm_samples = 5;  // snapshots used for the X / V^2 norms on the right-hand side
};

/// |int int |v0_{<=l2}|^{p-5} v1_{<=l2} v2 v3 v4 v5 u_mu dx dt| against the
/// lemma's frequency weights times the factors' norms. The swept frequency is mu.
EstimateReport verify_multilinear(const MultilinearConfig& cfg);

struct SmallnessResult {
  double sup = 0.0;    // sup_lambda lambda^{1/6 + s_p} ||P_lambda S(t) phi||_{L^6_{t,x}([0,T])}
  double besov = 0.0;  // ||phi||_{B^{s_p}}
  double ratio = 0.0;  // sup / besov
  int argmax = 0;
};
/// Time sampling comes from phi.grid (dt, steps); T = dt * steps.
SmallnessResult verify_l6_smallness(const Field& phi, double p);
SmallnessResult verify_l6_smallness(const Field& phi, double T, double p);

}  // namespace gkdv
