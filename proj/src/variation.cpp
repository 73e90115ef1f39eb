#include "gkdv/variation.hpp"

#include <algorithm>
#include <cmath>

#include "gkdv/airy.hpp"
#include "gkdv/error.hpp"
#include "gkdv/kernels.hpp"

namespace gkdv {

namespace {

struct Flat {
  std::vector<double> rows;
  std::vector<double> sq_norms;
  std::size_t dim = 0;
};

Flat flatten(const SampledPath& path) {
  Flat f;
  const std::size_t n = path.size();
  f.dim = n ? path.values[0].size() : 0;
  f.rows.reserve(n * f.dim);
  f.sq_norms.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (double x : path.values[k]) s += x * x;
    f.sq_norms[k] = path.weight * s;
    f.rows.insert(f.rows.end(), path.values[k].begin(), path.values[k].end());
  }
  return f;
}

double dot(const std::vector<double>& a, const std::vector<double>& b, double w) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return w * s;
}

void check_exponent(double p) {
  if (!(p >= 1.0)) throw ValidationError("variation exponent p must be >= 1");
}

}  // namespace

void SampledPath::validate() const {
  if (times.size() != values.size()) throw ValidationError("sampled path: times and values differ in length");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw ValidationError("sampled path: times must be strictly increasing");
  for (const auto& v : values)
    if (v.size() != values.front().size()) throw ValidationError("sampled path: values differ in dimension");
  if (!(weight > 0)) throw ValidationError("sampled path: weight must be positive");
}

SampledPath sampled(const Path& p, bool terminal_zero) {
  SampledPath s;
  s.weight = p.grid.dx();
  s.terminal_zero = terminal_zero;
  for (std::size_t k = 0; k < p.snapshots.size(); ++k) {
    s.times.push_back(p.time(k));
    s.values.push_back(p.snapshots[k].values);
  }
  return s;
}

Partition full_partition(std::size_t n) {
  Partition t;
  t.indices.resize(n);
  for (std::size_t k = 0; k < n; ++k) t.indices[k] = k;
  return t;
}

double vp_norm(const SampledPath& path, double p) {
  check_exponent(p);
  path.validate();
  const Flat f = flatten(path);
  const std::size_t n = path.size();
  const auto d = kernels::pairwise_sq_distances(f.rows, n, f.dim, path.weight);
  return std::pow(kernels::vp_power_from_distances(d, f.sq_norms, n, p, path.terminal_zero), 1.0 / p);
}

double vp_norm_exhaustive(const SampledPath& path, double p) {
  check_exponent(p);
  path.validate();
  const std::size_t n = path.size();
  if (n > 24) throw ValidationError("vp_norm_exhaustive: too many samples for enumeration");
  const Flat f = flatten(path);
  const auto d = kernels::pairwise_sq_distances(f.rows, n, f.dim, path.weight, kernels::Exec::serial);
  const double hp = 0.5 * p;
  double best = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    double sum = 0.0;
    std::size_t prev = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (!(mask & (std::size_t{1} << k))) continue;
      if (prev != n) sum += std::pow(d[prev * n + k], hp);
      prev = k;
    }
    if (path.terminal_zero) sum += std::pow(f.sq_norms[prev], hp);
    best = std::max(best, sum);
  }
  return std::pow(best, 1.0 / p);
}

Path pull_back(const Path& u) {
  Path out = u;
  for (std::size_t k = 0; k < out.snapshots.size(); ++k) out.snapshots[k] = evolve(u.snapshots[k], -u.time(k));
  return out;
}

double v2_kdv_norm(const Path& u) { return vp_norm(sampled(pull_back(u), true), 2.0); }

double bilinear_form(const SampledPath& u, const SampledPath& v, const Partition& t) {
  u.validate();
  v.validate();
  if (u.times != v.times) throw ValidationError("bilinear_form: paths use different sample times");
  if (u.values.size() && v.values.size() && u.values[0].size() != v.values[0].size())
    throw ValidationError("bilinear_form: paths take values in different spaces");
  if (t.indices.size() < 2 && !(t.indices.size() == 1 && v.terminal_zero))
    throw ValidationError("bilinear_form: partition needs at least two points");
  for (std::size_t i = 0; i < t.indices.size(); ++i) {
    if (t.indices[i] >= u.size()) throw ValidationError("bilinear_form: partition index out of range");
    if (i > 0 && t.indices[i] <= t.indices[i - 1]) throw ValidationError("bilinear_form: partition must increase");
  }
  double sum = 0.0;
  std::vector<double> inc(u.values.empty() ? 0 : u.values[0].size());
  for (std::size_t i = 1; i < t.indices.size(); ++i) {
    const auto& a = v.values[t.indices[i]];
    const auto& b = v.values[t.indices[i - 1]];
    for (std::size_t j = 0; j < inc.size(); ++j) inc[j] = a[j] - b[j];
    sum += dot(u.values[t.indices[i - 1]], inc, u.weight);
  }
  if (v.terminal_zero) {
    const std::size_t last = t.indices.back();
    sum -= dot(u.values[last], v.values[last], u.weight);
  }
  return sum;
}

double duality_lower_bound(const SampledPath& u) {
  u.validate();
  const std::size_t n = u.size();
  if (n == 0) return 0.0;
  // Gram matrix of the samples.
  std::vector<double> gram(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) gram[i * n + j] = gram[j * n + i] = dot(u.values[i], u.values[j], u.weight);
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ni = std::sqrt(gram[i * n + i]);
    if (ni == 0.0) continue;
    // v = 1_{[t_j, inf)} e with e = u_i / |u_i|; |v|_{V^2} = 1 for j = 0, sqrt(2) otherwise.
    const double tail = gram[(n - 1) * n + i] / ni;
    best = std::max(best, std::abs(tail));
    for (std::size_t j = 1; j < n; ++j) {
      const double b = gram[(j - 1) * n + i] / ni - tail;
      best = std::max(best, std::abs(b) / std::sqrt(2.0));
    }
  }
  return best;
}

double duality_lower_bound(const Path& u) { return duality_lower_bound(sampled(u, true)); }

}  // namespace gkdv
