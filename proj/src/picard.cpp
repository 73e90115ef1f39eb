#include "gkdv/picard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gkdv/airy.hpp"
#include "gkdv/littlewood_paley.hpp"
#include "gkdv/nonlinearity.hpp"
#include "gkdv/norms.hpp"
#include "gkdv/random.hpp"

namespace gkdv {

namespace {

using Modes = std::vector<Complex>;

double modes_l2(const Modes& c, const GridSpec& g) {
  const std::size_t half = g.points / 2;
  double acc = std::norm(c[0]) + std::norm(c[half]);
  for (std::size_t m = 1; m < half; ++m) acc += 2.0 * std::norm(c[m]);
  return std::sqrt(g.length * acc);
}

Spectrum nonlinear_term(const Spectrum& psi, double p) {
  Spectrum f = derivative(power_spectrum(psi, p));
  for (auto& c : f.coeffs) c = -c;
  return f;
}

bool all_finite(const Modes& c) {
  return std::all_of(c.begin(), c.end(), [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

// Pulled-back iterate: g_k = S(-t_k) w(t_k) on the fine grid.
struct FineIterate {
  std::vector<Modes> g;
};

// One fixed-point sweep in the interaction picture. Returns the new pulled-back
// iterate and the residual of the old one.
FineIterate sweep(const Spectrum& phi_hat, const FineIterate& prev, const GridSpec& fine, double p,
                  kernels::Exec exec, double& residual) {
  const std::size_t n = fine.steps + 1;
  const std::size_t modes = fine.modes();
  const double h = fine.dt;
  std::vector<Modes> G(n);
  const auto task = [&](std::size_t k) {
    Spectrum psi{fine, phi_hat.coeffs};
    if (!prev.g.empty())
      for (std::size_t m = 0; m < modes; ++m) psi.coeffs[m] += prev.g[k][m];
    const double t = fine.time(k);
    psi = evolve(psi, t);
    G[k] = evolve(nonlinear_term(psi, p), -t).coeffs;
  };
  if (exec == kernels::Exec::serial) {
    for (std::size_t k = 0; k < n; ++k) task(k);
  } else {
    const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(kernels::threads())
    for (std::ptrdiff_t k = 0; k < nn; ++k) task(static_cast<std::size_t>(k));
  }

  // Interaction-picture residual of the previous iterate: g' = G.
  residual = 0.0;
  Modes r(modes);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    for (std::size_t m = 0; m < modes; ++m) {
      const Complex dg = prev.g.empty() ? Complex(0.0) : (prev.g[k + 1][m] - prev.g[k - 1][m]) / (2.0 * h);
      r[m] = dg - G[k][m];
    }
    residual = std::max(residual, modes_l2(r, fine));
  }

  // Cumulative quadrature, same weights as duhamel_spectral.
  FineIterate out;
  out.g.assign(n, Modes(modes, Complex(0.0)));
  for (std::size_t k = 1; k < n; ++k) {
    auto& a = out.g[k];
    if (k == 1) {
      for (std::size_t m = 0; m < modes; ++m) a[m] = 0.5 * h * (G[0][m] + G[1][m]);
    } else if (k % 2 == 0) {
      const double c = h / 3.0;
      for (std::size_t m = 0; m < modes; ++m) a[m] = out.g[k - 2][m] + c * (G[k - 2][m] + 4.0 * G[k - 1][m] + G[k][m]);
    } else {
      const double c = 3.0 * h / 8.0;
      for (std::size_t m = 0; m < modes; ++m)
        a[m] = out.g[k - 3][m] + c * (G[k - 3][m] + 3.0 * G[k - 2][m] + 3.0 * G[k - 1][m] + G[k][m]);
    }
  }
  return out;
}

Path coarse_path(const FineIterate& it, const GridSpec& coarse, const GridSpec& fine, std::size_t substeps) {
  Path out{coarse, {}};
  out.snapshots.reserve(coarse.steps + 1);
  for (std::size_t k = 0; k <= coarse.steps; ++k) {
    const std::size_t kf = k * substeps;
    Field f = inverse_transform(evolve(Spectrum{fine, it.g[kf]}, fine.time(kf)));
    f.grid = coarse;
    out.snapshots.push_back(std::move(f));
  }
  return out;
}

double sup_norm(const Path& u) {
  double m = 0.0;
  for (const auto& s : u.snapshots) m = std::max(m, lq_norm(s, INFINITY));
  return m;
}

}  // namespace

void PicardConfig::validate() const {
  std::vector<std::string> errs;
  try {
    grid.validate();
  } catch (const ValidationError& e) {
    errs.push_back(e.what());
  }
  if (!(p >= 5.0)) errs.push_back("p must be >= 5 (the supercritical range p >= 5)");
  if (max_iters < 1) errs.push_back("max_iters must be >= 1");
  if (!(contraction_target > 0.0 && contraction_target < 1.0)) errs.push_back("contraction_target must lie in (0, 1)");
  if (!(tolerance > 0.0)) errs.push_back("tolerance must be positive");
  if (substeps < 1) errs.push_back("substeps must be >= 1");
  if (!(ceiling > 1.0)) errs.push_back("ceiling must exceed 1");
  if (!data.grid.same_space(grid) || data.values.size() != grid.points) errs.push_back("initial data grid differs from the solver grid");
  if (!errs.empty()) {
    std::string msg = "invalid Picard configuration:";
    for (auto& e : errs) msg += " " + e + ";";
    throw ValidationError(msg);
  }
}

Path picard_step(const Path& v, const Path& w_prev, double p) {
  require_same_grid(v.grid, w_prev.grid, "picard_step");
  if (v.snapshots.size() != w_prev.snapshots.size()) throw ValidationError("picard_step: snapshot counts differ");
  if (!w_prev.snapshots.empty() && lq_norm(w_prev.snapshots.front(), INFINITY) != 0.0)
    throw ValidationError("picard_step: previous iterate must vanish at t = 0");
  Path forcing{v.grid, {}};
  forcing.snapshots.reserve(v.snapshots.size());
  for (std::size_t k = 0; k < v.snapshots.size(); ++k) {
    const Spectrum psi = forward_transform(v.snapshots[k] + w_prev.snapshots[k]);
    Field f = inverse_transform(nonlinear_term(psi, p));
    f.grid = v.grid;
    forcing.snapshots.push_back(std::move(f));
  }
  return duhamel(forcing);
}

PicardResult solve_picard(const PicardConfig& cfg) {
  cfg.validate();
  const GridSpec& coarse = cfg.grid;
  const GridSpec fine = coarse.with_time(coarse.dt / static_cast<double>(cfg.substeps), coarse.steps * cfg.substeps);
  const double sp = critical_index(cfg.p).s;
  const Band band = default_band(coarse);
  Field phi = cfg.data;
  phi.grid = coarse;
  const Spectrum phi_hat = forward_transform(phi);

  PicardResult res;
  res.v = free_solution(phi, coarse);
  auto& tr = res.trace;
  tr.smallness = verify_l6_smallness(phi, coarse.horizon(), cfg.p);
  if (tr.smallness.sup > cfg.smallness_gate)
    tr.warnings.push_back("L6 smallness gate exceeded: " + std::to_string(tr.smallness.sup) + " > " +
                          std::to_string(cfg.smallness_gate));

  const double v_x = besov_norm(phi, sp, band).value;
  const double v_l2 = l2_norm(phi);
  const double phi_inf = lq_norm(phi, INFINITY);

  FineIterate cur;
  Path w_cur{coarse, std::vector<Field>(coarse.steps + 1, Field::zeros(coarse))};
  std::size_t run = 0;
  double first_diff = 0.0;
  for (std::size_t n = 1; n <= cfg.max_iters; ++n) {
    double residual = 0.0;
    FineIterate next = sweep(phi_hat, cur, fine, cfg.p, cfg.exec, residual);
    IterationRow row;
    row.n = n;
    row.residual = residual;

    bool finite = true;
    for (const auto& g : next.g) finite = finite && all_finite(g);
    if (!finite) {
      tr.diverged = true;
      tr.reason = "non-finite iterate";
      tr.rows.push_back(row);
      throw DivergenceError("Picard iteration produced non-finite values at n = " + std::to_string(n), tr);
    }

    Path w_next = coarse_path(next, coarse, fine, cfg.substeps);
    double dl2 = 0.0;
    Modes d(fine.modes());
    for (std::size_t k = 0; k < next.g.size(); ++k) {
      for (std::size_t m = 0; m < d.size(); ++m) d[m] = next.g[k][m] - (cur.g.empty() ? Complex(0.0) : cur.g[k][m]);
      dl2 = std::max(dl2, modes_l2(d, fine));
    }
    Path diff{coarse, {}};
    diff.snapshots.reserve(w_next.snapshots.size());
    for (std::size_t k = 0; k < w_next.snapshots.size(); ++k)
      diff.snapshots.push_back(w_next.snapshots[k] - w_cur.snapshots[k]);
    row.diff_l2 = dl2;
    row.diff_norm = xs_norm(diff, sp, band, cfg.exec).value;
    row.w_norm = xs_norm(w_next, sp, band, cfg.exec).value;
    if (n == 1) {
      first_diff = row.diff_norm;
    } else {
      const double prev = tr.rows.back().diff_norm;
      row.ratio = prev > 0.0 ? row.diff_norm / prev : 0.0;
      tr.max_ratio = std::max(tr.max_ratio, row.ratio);
    }
    tr.rows.push_back(row);
    cur = std::move(next);
    w_cur = std::move(w_next);

    if (!std::isfinite(row.diff_norm) || sup_norm(w_cur) > cfg.ceiling * phi_inf) {
      tr.diverged = true;
      tr.reason = "iterate exceeded the ceiling";
      throw DivergenceError("Picard iterate exceeded the ceiling at n = " + std::to_string(n), tr);
    }
    run = (n > 1 && row.ratio >= 1.0) ? run + 1 : 0;
    if (run >= 3) {
      tr.diverged = true;
      tr.reason = "contraction ratio >= 1 for three consecutive iterations";
      throw DivergenceError("Picard iteration diverged at n = " + std::to_string(n), tr);
    }
    if (row.diff_norm <= cfg.tolerance * v_x && row.diff_l2 <= cfg.tolerance * v_l2) {
      tr.converged = true;
      break;
    }
  }
  if (!tr.converged) tr.reason = "max_iters reached";
  tr.alpha = tr.max_ratio < 1.0 ? first_diff / (1.0 - tr.max_ratio) : std::numeric_limits<double>::infinity();
  tr.contraction_ok = tr.max_ratio <= cfg.contraction_target;
  res.w = std::move(w_cur);
  return res;
}

Path direct_solve(const Field& phi, double p, const GridSpec& grid, std::size_t substeps, double ceiling) {
  if (!phi.grid.same_space(grid)) throw ValidationError("direct_solve: data grid differs from solver grid");
  if (substeps < 1) throw ValidationError("direct_solve: substeps must be >= 1");
  const double h = grid.dt / static_cast<double>(substeps);
  Spectrum psi = forward_transform(phi);
  psi.grid = grid;
  const double limit = ceiling * std::max(lq_norm(phi, INFINITY), std::numeric_limits<double>::min());
  Path out{grid, {}};
  out.snapshots.reserve(grid.steps + 1);
  Field first = phi;
  first.grid = grid;
  out.snapshots.push_back(first);
  for (std::size_t k = 1; k <= grid.steps; ++k) {
    for (std::size_t j = 0; j < substeps; ++j) {
      const Spectrum a = nonlinear_term(psi, p);
      const Spectrum b = nonlinear_term(evolve(psi + (0.5 * h) * a, 0.5 * h), p);
      const Spectrum c = nonlinear_term(evolve(psi, 0.5 * h) + (0.5 * h) * b, p);
      const Spectrum d = nonlinear_term(evolve(psi, h) + h * evolve(c, 0.5 * h), p);
      psi = evolve(psi + (h / 6.0) * a, h) + (h / 3.0) * evolve(b + c, 0.5 * h) + (h / 6.0) * d;
    }
    Field f = inverse_transform(psi);
    f.grid = grid;
    const double top = lq_norm(f, INFINITY);
    if (!std::isfinite(top) || top > limit)
      throw BlowUpError("direct_solve: solution exceeded the ceiling at t = " + std::to_string(grid.time(k)),
                        grid.time(k));
    out.snapshots.push_back(std::move(f));
  }
  return out;
}

Path direct_solve(const Field& phi, double p, double T) {
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(T / 0.01 - 1e-9)));
  return direct_solve(phi, p, phi.grid.with_time(T / static_cast<double>(steps), steps));
}

ThresholdReport bisect_threshold(const PicardConfig& cfg, double start, double rel_width) {
  if (!(start > 0.0) || !(rel_width > 0.0)) throw ValidationError("bisection needs positive start and width");
  ThresholdReport rep;
  auto attempt = [&](double a) {
    PicardConfig c = cfg;
    c.data = a * cfg.data;
    BracketStep st;
    st.amplitude = a;
    try {
      const auto r = solve_picard(c);
      st.converged = r.trace.converged;
      st.iterations = r.trace.iterations();
      st.last_ratio = r.trace.rows.empty() ? 0.0 : r.trace.rows.back().ratio;
    } catch (const DivergenceError& e) {
      st.converged = false;
      st.iterations = e.trace.iterations();
      st.last_ratio = e.trace.rows.empty() ? 0.0 : e.trace.rows.back().ratio;
    }
    rep.steps.push_back(st);
    return st.converged;
  };
  double a = start;
  if (attempt(a)) {
    rep.lo = a;
    for (int i = 0;; ++i) {
      if (i == 60) throw NumericalFailure("bisection: no divergence found while growing the amplitude");
      a *= 2.0;
      if (!attempt(a)) break;
      rep.lo = a;
    }
    rep.hi = a;
  } else {
    rep.hi = a;
    for (int i = 0;; ++i) {
      if (i == 60) throw NumericalFailure("bisection: no convergence found while shrinking the amplitude");
      a *= 0.5;
      if (attempt(a)) break;
      rep.hi = a;
    }
    rep.lo = a;
  }
  while (rep.hi - rep.lo > rel_width * rep.lo) {
    const double mid = 0.5 * (rep.lo + rep.hi);
    if (attempt(mid)) {
      rep.lo = mid;
    } else {
      rep.hi = mid;
    }
  }
  return rep;
}

std::vector<LipschitzLevel> lipschitz_probe(const PicardConfig& cfg, const Field& delta, std::size_t levels) {
  const double sp = critical_index(cfg.p).s;
  const Band band = default_band(cfg.grid);
  std::vector<LipschitzLevel> out(levels);
  const double d0 = besov_norm(delta, sp, band).value;
  if (!(d0 > 0.0)) {
    for (std::size_t l = 0; l < levels; ++l) out[l] = LipschitzLevel{0.0, 0.0, 0.0};
    return out;
  }
  const PicardResult base = solve_picard(cfg);
  if (!base.trace.converged) throw NumericalFailure("lipschitz_probe: base solve did not converge");
  std::vector<std::optional<PicardResult>> runs(levels);
  const auto nl = static_cast<std::ptrdiff_t>(levels);
  bool failed = false;
#pragma omp parallel for schedule(dynamic) num_threads(kernels::threads())
  for (std::ptrdiff_t l = 0; l < nl; ++l) {
    PicardConfig c = cfg;
    c.data = cfg.data + std::ldexp(1.0, -static_cast<int>(l)) * delta;
    try {
      runs[static_cast<std::size_t>(l)] = solve_picard(c);
    } catch (const DivergenceError&) {
#pragma omp critical
      failed = true;
    }
  }
  if (failed) throw NumericalFailure("lipschitz_probe: perturbed solve diverged");
  for (std::size_t l = 0; l < levels; ++l) {
    const Path& w2 = runs[l]->w;
    if (!runs[l]->trace.converged) throw NumericalFailure("lipschitz_probe: perturbed solve did not converge");
    Path diff{cfg.grid, {}};
    for (std::size_t k = 0; k < w2.snapshots.size(); ++k) diff.snapshots.push_back(w2.snapshots[k] - base.w.snapshots[k]);
    out[l].perturbation = std::ldexp(d0, -static_cast<int>(l));
    out[l].difference = xs_norm(diff, sp, band, cfg.exec).value;
    out[l].ratio = out[l].difference / out[l].perturbation;
  }
  return out;
}

std::vector<HorizonRow> horizon_probe(const PicardConfig& cfg, const std::vector<double>& horizons) {
  std::vector<HorizonRow> out;
  for (double T : horizons) {
    PicardConfig c = cfg;
    const auto steps = static_cast<std::size_t>(std::max(1L, std::lround(T / cfg.grid.dt)));
    c.grid = cfg.grid.with_time(T / static_cast<double>(steps), steps);
    c.data.grid = c.grid;
    const PicardResult r = solve_picard(c);
    if (!r.trace.converged) throw NumericalFailure("horizon_probe: solve did not converge at T = " + std::to_string(T));
    out.push_back(HorizonRow{T, r.trace.rows.back().w_norm, r.trace.max_ratio, r.trace.iterations()});
  }
  return out;
}

double horizon_trend(const std::vector<HorizonRow>& rows) {
  std::vector<double> t, w;
  for (const auto& r : rows) {
    t.push_back(r.horizon);
    w.push_back(r.w_norm);
  }
  return loglog_slope(t, w);
}

Field packet_datum(const GridSpec& g, double carrier, double spectral_width) {
  return gaussian_packet(g, 1.0, 1.0 / spectral_width, 0.0, carrier, 0.0);
}

}  // namespace gkdv
