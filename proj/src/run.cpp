#include "gkdv/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gkdv/airy.hpp"
#include "gkdv/error.hpp"
#include "gkdv/estimate_lab.hpp"
#include "gkdv/io.hpp"
#include "gkdv/kernels.hpp"
#include "gkdv/littlewood_paley.hpp"
#include "gkdv/norms.hpp"
#include "gkdv/picard.hpp"
#include "gkdv/random.hpp"
#include "gkdv/variation.hpp"

namespace gkdv::cli {

using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : schema())
    if (k.key == key) return &k;
  return nullptr;
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end && *end == '\0';
}

bool parse_integer(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return end && *end == '\0';
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "no" || s == "off") {
    out = false;
    return true;
  }
  return false;
}

bool parse_list(const std::string& s, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v;
    if (!parse_real(trim(item), v)) return false;
    out.push_back(v);
  }
  return !out.empty();
}

KeyValues experiment_defaults(const std::string& e) {
  if (e == "verify-strichartz")
    return {{"domain_length", "200"}, {"num_points", "32768"}, {"sweep_min", "0.25"}, {"sweep_max", "250"},
            {"variant", "strichartz"}};
  if (e == "verify-bilinear")
    return {{"domain_length", "200"}, {"num_points", "32768"}, {"horizon", "4"}, {"sweep_min", "2"},
            {"sweep_max", "200"}, {"variant", "bilinear"}};
  if (e == "verify-multilinear")
    return {{"domain_length", "100"}, {"num_points", "2048"}, {"p", "6"}, {"time_samples", "64"},
            {"width_factor", "3"}, {"trials", "20"}, {"sweep_min", "0.33"}, {"sweep_max", "30"}, {"sweep_count", "5"}};
  if (e == "picard" || e == "lipschitz") return {{"domain_length", "128"}, {"num_points", "1024"}};
  return {};
}

bool uses_time_grid(const std::string& e) {
  return e == "solve" || e == "picard" || e == "lipschitz" || e == "verify-smallness" || e == "norms";
}

}  // namespace

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      {"domain_length", "200", KeyType::real, "length L of the periodic cell"},
      {"num_points", "4096", KeyType::integer, "grid points N (power of two)"},
      {"dt", "0.01", KeyType::real, "reported time step"},
      {"dealias_factor", "2", KeyType::real, "zero-padding ratio for nonlinear products"},
      {"p", "5", KeyType::real, "power of the nonlinearity (p >= 5)"},
      {"horizon", "1", KeyType::real, "time horizon T (estimates: scale of T_lambda)"},
      {"seed", "7", KeyType::integer, "master random seed"},
      {"threads", "0", KeyType::integer, "worker threads (0 = OpenMP default)"},
      {"band_lo", "", KeyType::text, "lowest band exponent (empty = resolvable range)"},
      {"band_hi", "", KeyType::text, "highest band exponent (empty = resolvable range)"},
      {"s", "", KeyType::text, "regularity index for norms (empty = s_p)"},
      {"out_dir", "", KeyType::text, "output directory"},
      {"format", "json", KeyType::text, "report format: json or csv"},
      {"datum", "packet", KeyType::text, "initial data: packet or noise"},
      {"amplitude", "0.4", KeyType::real, "data amplitude"},
      {"carrier", "2.6", KeyType::real, "packet carrier frequency"},
      {"spectral_width", "1.6", KeyType::real, "packet spectral width"},
      {"noise_lo", "0.5", KeyType::real, "noise datum: lowest |xi|"},
      {"noise_hi", "4", KeyType::real, "noise datum: highest |xi|"},
      {"trials", "16", KeyType::integer, "trials per swept frequency"},
      {"sweep_min", "0.25", KeyType::real, "smallest swept frequency"},
      {"sweep_max", "250", KeyType::real, "largest swept frequency"},
      {"sweep_count", "10", KeyType::integer, "number of swept frequencies"},
      {"fixed", "1", KeyType::real, "fixed low frequency mu (bilinear)"},
      {"packets", "4", KeyType::integer, "wave packets per trial"},
      {"width_factor", "6", KeyType::real, "packet width times frequency"},
      {"time_samples", "48", KeyType::integer, "time samples per estimate trial"},
      {"q", "6", KeyType::real, "Lebesgue exponent"},
      {"variant", "", KeyType::text, "strichartz|bernstein|interpolated, bilinear|interpolated"},
      {"case", "far", KeyType::text, "multilinear case: near or far"},
      {"lambdas", "0.3,0.3,0.3,0.3", KeyType::list, "multilinear lambda_2..lambda_5"},
      {"epsilon", "0.02", KeyType::real, "multilinear near-case epsilon"},
      {"delta", "0.01", KeyType::real, "multilinear near-case delta"},
      {"norm_samples", "5", KeyType::integer, "snapshots for right-hand-side norms"},
      {"max_iters", "40", KeyType::integer, "Picard iteration cap"},
      {"tolerance", "1e-11", KeyType::real, "Picard stopping tolerance (relative)"},
      {"substeps", "40", KeyType::integer, "fine steps per reported step"},
      {"contraction_target", "0.5", KeyType::real, "target contraction ratio"},
      {"smallness_gate", "1", KeyType::real, "L6 smallness gate delta_0"},
      {"ceiling", "1e6", KeyType::real, "divergence / blow-up ceiling factor"},
      {"amplitude_bisect", "false", KeyType::boolean, "bisect the data amplitude for the smallness threshold"},
      {"bisect_start", "1", KeyType::real, "starting amplitude for bisection"},
      {"bisect_width", "0.01", KeyType::real, "relative bracket width"},
      {"delta_scale", "1e-3", KeyType::real, "Lipschitz perturbation size relative to the datum"},
      {"levels", "4", KeyType::integer, "Lipschitz halving levels"},
  };
  return keys;
}

const std::vector<std::string>& experiments() {
  static const std::vector<std::string> e = {"solve",           "picard",          "norms",
                                             "verify-strichartz", "verify-bilinear", "verify-multilinear",
                                             "verify-smallness",  "lipschitz"};
  return e;
}

KeyValues parse_config_text(const std::string& text) {
  KeyValues out;
  std::vector<std::string> errs;
  std::stringstream ss(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(ss, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errs.push_back("line " + std::to_string(no) + ": expected key=value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      errs.push_back("line " + std::to_string(no) + ": empty key");
      continue;
    }
    if (out.count(key)) errs.push_back("line " + std::to_string(no) + ": duplicate key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  if (!errs.empty()) {
    std::string msg = "malformed config:";
    for (auto& e : errs) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  return out;
}

double RunConfig::real(const std::string& key) const {
  double v = 0.0;
  parse_real(values.at(key), v);
  return v;
}

long RunConfig::integer(const std::string& key) const {
  long v = 0;
  parse_integer(values.at(key), v);
  return v;
}

const std::string& RunConfig::text(const std::string& key) const { return values.at(key); }

bool RunConfig::flag(const std::string& key) const {
  bool v = false;
  parse_bool(values.at(key), v);
  return v;
}

std::vector<double> RunConfig::list(const std::string& key) const {
  std::vector<double> v;
  parse_list(values.at(key), v);
  return v;
}

RunConfig resolve(const std::string& experiment, const KeyValues& file_values, const KeyValues& overrides) {
  std::vector<std::string> errs;
  const auto& ex = experiments();
  if (std::find(ex.begin(), ex.end(), experiment) == ex.end()) errs.push_back("unknown experiment '" + experiment + "'");

  RunConfig cfg;
  cfg.experiment = experiment;
  for (const auto& k : schema()) cfg.values[k.key] = k.fallback;
  for (const auto& [k, v] : experiment_defaults(experiment)) cfg.values[k] = v;
  for (const auto* layer : {&file_values, &overrides})
    for (const auto& [k, v] : *layer) {
      if (!find_key(k)) {
        errs.push_back("unknown key '" + k + "'");
        continue;
      }
      cfg.values[k] = v;
    }

  // Type checks.
  for (const auto& k : schema()) {
    const std::string& v = cfg.values[k.key];
    double r;
    long i;
    bool b;
    std::vector<double> l;
    switch (k.type) {
      case KeyType::real:
        if (!parse_real(v, r) || !std::isfinite(r)) errs.push_back(k.key + ": expected a real number, got '" + v + "'");
        break;
      case KeyType::integer:
        if (!parse_integer(v, i)) errs.push_back(k.key + ": expected an integer, got '" + v + "'");
        break;
      case KeyType::boolean:
        if (!parse_bool(v, b)) errs.push_back(k.key + ": expected true or false, got '" + v + "'");
        break;
      case KeyType::list:
        if (!parse_list(v, l)) errs.push_back(k.key + ": expected a comma separated list of numbers");
        break;
      case KeyType::text:
        break;
    }
  }
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (auto& e : errs) msg += "\n  " + e;
    throw ValidationError(msg);
  }

  // Range checks.
  auto need = [&](bool ok, const std::string& m) {
    if (!ok) errs.push_back(m);
  };
  const double p = cfg.real("p");
  need(p >= 5.0, "p = " + trim(cfg.text("p")) + " is out of scope: only the supercritical range p >= 5 is supported");
  const long n = cfg.integer("num_points");
  need(n >= 8 && (n & (n - 1)) == 0, "num_points must be a power of two >= 8");
  need(cfg.real("domain_length") > 0.0, "domain_length must be positive");
  need(cfg.real("dt") > 0.0, "dt must be positive");
  need(cfg.real("dealias_factor") >= 1.0, "dealias_factor must be >= 1");
  need(cfg.real("horizon") > 0.0, "horizon must be positive");
  need(cfg.integer("seed") >= 0, "seed must be nonnegative");
  need(cfg.integer("threads") >= 0, "threads must be nonnegative");
  need(cfg.text("format") == "json" || cfg.text("format") == "csv", "format must be json or csv");
  need(cfg.text("datum") == "packet" || cfg.text("datum") == "noise", "datum must be packet or noise");
  need(cfg.real("spectral_width") > 0.0, "spectral_width must be positive");
  need(cfg.real("noise_hi") > cfg.real("noise_lo") && cfg.real("noise_lo") >= 0.0, "noise range must satisfy 0 <= noise_lo < noise_hi");
  for (const char* k : {"band_lo", "band_hi"}) {
    long z;
    need(cfg.text(k).empty() || parse_integer(cfg.text(k), z), std::string(k) + " must be empty or an integer exponent");
  }
  long zl, zh;
  if (parse_integer(cfg.text("band_lo"), zl) && parse_integer(cfg.text("band_hi"), zh))
    need(zl <= zh, "band_lo must not exceed band_hi");
  double sv;
  need(cfg.text("s").empty() || parse_real(cfg.text("s"), sv), "s must be empty or a real number");
  need(cfg.integer("trials") >= 1, "trials must be >= 1");
  need(cfg.real("sweep_min") > 0.0 && cfg.real("sweep_max") >= cfg.real("sweep_min"), "sweep range must satisfy 0 < sweep_min <= sweep_max");
  need(cfg.integer("sweep_count") >= 1, "sweep_count must be >= 1");
  need(cfg.real("fixed") > 0.0, "fixed must be positive");
  need(cfg.integer("packets") >= 1, "packets must be >= 1");
  need(cfg.real("width_factor") > 0.0, "width_factor must be positive");
  need(cfg.integer("time_samples") >= 2, "time_samples must be >= 2");
  need(cfg.integer("norm_samples") >= 2, "norm_samples must be >= 2");
  need(cfg.integer("max_iters") >= 1, "max_iters must be >= 1");
  need(cfg.real("tolerance") > 0.0, "tolerance must be positive");
  need(cfg.integer("substeps") >= 1, "substeps must be >= 1");
  const double ct = cfg.real("contraction_target");
  need(ct > 0.0 && ct < 1.0, "contraction_target must lie in (0, 1)");
  need(cfg.real("ceiling") > 1.0, "ceiling must exceed 1");
  need(cfg.real("bisect_start") > 0.0 && cfg.real("bisect_width") > 0.0, "bisect_start and bisect_width must be positive");
  need(cfg.integer("levels") >= 1, "levels must be >= 1");
  need(cfg.text("case") == "near" || cfg.text("case") == "far", "case must be near or far");
  const auto lambdas = cfg.list("lambdas");
  need(lambdas.size() == 4, "lambdas must list exactly four frequencies");
  need(std::all_of(lambdas.begin(), lambdas.end(), [](double x) { return x > 0.0; }), "lambdas must be positive");
  need(std::is_sorted(lambdas.begin(), lambdas.end()), "lambdas must be nondecreasing");

  const std::string& variant = cfg.text("variant");
  if (experiment == "verify-strichartz") {
    need(variant == "strichartz" || variant == "bernstein" || variant == "interpolated",
         "variant must be strichartz, bernstein or interpolated");
    if (variant == "strichartz") need(cfg.real("q") > 4.0, "Strichartz exponent q must exceed 4");
    if (variant == "interpolated") need(cfg.real("q") >= 6.0, "interpolated linear estimate needs q >= 6");
  } else if (experiment == "verify-bilinear") {
    need(variant == "bilinear" || variant == "interpolated", "variant must be bilinear or interpolated");
    need(cfg.real("sweep_min") >= 1.1 * cfg.real("fixed"), "bilinear schedule must satisfy sweep_min >= 1.1 fixed");
    if (variant == "interpolated") need(cfg.real("q") > 0.5 * (p - 1.0), "interpolated bilinear estimate needs q > (p-1)/2");
  } else if (experiment == "verify-multilinear") {
    if (cfg.text("case") == "far")
      need(cfg.real("sweep_min") >= 1.1 * (lambdas.empty() ? 0.0 : lambdas.back()), "far case requires sweep_min >= 1.1 lambda_5");
    else
      need(cfg.real("sweep_max") < 1.1 * (lambdas.empty() ? 0.0 : lambdas.back()), "near case requires sweep_max < 1.1 lambda_5");
    if (cfg.text("case") == "near") need(cfg.real("epsilon") > cfg.real("delta") && cfg.real("delta") > 0.0, "near case needs epsilon > delta > 0");
  }
  if (uses_time_grid(experiment) && cfg.real("dt") > 0.0) {
    const double steps = cfg.real("horizon") / cfg.real("dt");
    need(std::abs(steps - std::round(steps)) <= 1e-9 * steps && std::round(steps) >= 1.0,
         "horizon must be a positive integer multiple of dt");
  }
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (auto& e : errs) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  return cfg;
}

namespace {

GridSpec make_grid(const RunConfig& cfg) {
  GridSpec g;
  g.length = cfg.real("domain_length");
  g.points = static_cast<std::size_t>(cfg.integer("num_points"));
  g.dealias_factor = cfg.real("dealias_factor");
  g.dt = cfg.real("dt");
  g.steps = static_cast<std::size_t>(std::llround(cfg.real("horizon") / g.dt));
  g.validate();
  return g;
}

Field make_datum(const RunConfig& cfg, const GridSpec& g) {
  if (cfg.text("datum") == "noise") {
    Rng rng(derive_seed(static_cast<std::uint64_t>(cfg.integer("seed")), 0));
    Field f = random_band_limited(g, cfg.real("noise_lo"), cfg.real("noise_hi"), rng);
    const double n = l2_norm(f);
    return n > 0.0 ? (cfg.real("amplitude") / n) * f : f;
  }
  return cfg.real("amplitude") * packet_datum(g, cfg.real("carrier"), cfg.real("spectral_width"));
}

Band make_band(const RunConfig& cfg, const GridSpec& g) {
  Band b = default_band(g);
  if (!cfg.text("band_lo").empty()) b.lo = std::stoi(cfg.text("band_lo"));
  if (!cfg.text("band_hi").empty()) b.hi = std::stoi(cfg.text("band_hi"));
  return b;
}

LabConfig make_lab(const RunConfig& cfg) {
  LabConfig lab;
  lab.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  lab.trials = static_cast<std::size_t>(cfg.integer("trials"));
  lab.length = cfg.real("domain_length");
  lab.points = static_cast<std::size_t>(cfg.integer("num_points"));
  lab.packets.count = static_cast<int>(cfg.integer("packets"));
  lab.packets.width_factor = cfg.real("width_factor");
  lab.horizon = cfg.real("horizon");
  lab.time_samples = static_cast<std::size_t>(cfg.integer("time_samples"));
  lab.sweep_min = cfg.real("sweep_min");
  lab.sweep_max = cfg.real("sweep_max");
  lab.sweep_count = static_cast<std::size_t>(cfg.integer("sweep_count"));
  lab.fixed = cfg.real("fixed");
  return lab;
}

PicardConfig make_picard(const RunConfig& cfg) {
  PicardConfig pc;
  pc.grid = make_grid(cfg);
  pc.data = make_datum(cfg, pc.grid);
  pc.p = cfg.real("p");
  pc.max_iters = static_cast<std::size_t>(cfg.integer("max_iters"));
  pc.contraction_target = cfg.real("contraction_target");
  pc.tolerance = cfg.real("tolerance");
  pc.substeps = static_cast<std::size_t>(cfg.integer("substeps"));
  pc.smallness_gate = cfg.real("smallness_gate");
  pc.ceiling = cfg.real("ceiling");
  return pc;
}

json config_json(const RunConfig& cfg) {
  json j = json::object();
  j["experiment"] = cfg.experiment;
  for (const auto& k : schema()) {
    const std::string& v = cfg.values.at(k.key);
    switch (k.type) {
      case KeyType::real:
        j[k.key] = cfg.real(k.key);
        break;
      case KeyType::integer:
        j[k.key] = cfg.integer(k.key);
        break;
      case KeyType::boolean:
        j[k.key] = cfg.flag(k.key);
        break;
      case KeyType::list:
        j[k.key] = cfg.list(k.key);
        break;
      case KeyType::text:
        j[k.key] = v;
        break;
    }
  }
  return j;
}

// Non-finite values are not representable in JSON; they are written as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  return io::format_number(v);
}

struct Report {
  std::string status = "ok";
  json result = json::object();
  io::Table table;
  int code = kOk;
};

std::string render(const RunConfig& cfg, const Report& rep) {
  if (cfg.text("format") == "csv") {
    std::string out = "# schema_version=" + std::to_string(kSchemaVersion) + "\n# version=" + kVersion + "\n";
    out += "# experiment=" + cfg.experiment + "\n";
    for (const auto& k : schema()) out += "# config." + k.key + "=" + cfg.values.at(k.key) + "\n";
    out += "# status=" + rep.status + "\n";
    for (const auto& [k, v] : rep.result.items())
      if (v.is_primitive()) out += "# " + k + "=" + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
    out += io::table_csv(rep.table);
    return out;
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["version"] = kVersion;
  j["experiment"] = cfg.experiment;
  j["config"] = config_json(cfg);
  j["status"] = rep.status;
  j["result"] = rep.result;
  json cols = rep.table.columns;
  json rows = json::array();
  for (const auto& r : rep.table.rows) {
    json row = json::array();
    for (double v : r) row.push_back(number(v));
    rows.push_back(row);
  }
  j["table"] = {{"columns", cols}, {"rows", rows}};
  return j.dump(2) + "\n";
}

Report estimate_report(const EstimateReport& er) {
  Report rep;
  auto& r = rep.result;
  r["estimate"] = er.estimate;
  r["slope"] = number(er.slope);
  r["expected_slope"] = number(er.expected_slope);
  r["tolerance"] = number(er.tolerance);
  r["slope_ok"] = er.slope_ok();
  r["worst_ratio"] = number(er.worst_ratio);
  r["records"] = er.records.size();
  r["excluded"] = er.excluded;
  json params = json::object();
  for (const auto& [k, v] : er.parameters) params[k] = number(v);
  r["parameters"] = params;
  r["notes"] = er.notes;
  for (const auto& f : er.frequency_names) rep.table.columns.push_back(f);
  for (const char* c : {"trial", "lhs", "rhs", "ratio", "normalized", "excluded", "flagged"}) rep.table.columns.push_back(c);
  for (const auto& rec : er.records) {
    std::vector<double> row = rec.frequencies;
    row.insert(row.end(), {static_cast<double>(rec.trial), rec.lhs, rec.rhs, rec.ratio, rec.normalized,
                           rec.excluded ? 1.0 : 0.0, rec.flagged ? 1.0 : 0.0});
    rep.table.rows.push_back(std::move(row));
  }
  return rep;
}

json trace_json(const IterationTrace& t) {
  json j;
  j["iterations"] = t.iterations();
  j["converged"] = t.converged;
  j["diverged"] = t.diverged;
  j["reason"] = t.reason;
  j["alpha"] = number(t.alpha);
  j["max_ratio"] = number(t.max_ratio);
  j["contraction_ok"] = t.contraction_ok;
  j["smallness_sup"] = number(t.smallness.sup);
  j["smallness_ratio"] = number(t.smallness.ratio);
  j["warnings"] = t.warnings;
  return j;
}

io::Table trace_table(const IterationTrace& t) {
  io::Table tab{{"n", "w_norm", "diff_norm", "diff_l2", "ratio", "residual"}, {}};
  for (const auto& r : t.rows)
    tab.rows.push_back({static_cast<double>(r.n), r.w_norm, r.diff_norm, r.diff_l2, r.ratio, r.residual});
  return tab;
}

Report run_solve(const RunConfig& cfg, const std::filesystem::path& dir) {
  Report rep;
  const GridSpec g = make_grid(cfg);
  const Field phi = make_datum(cfg, g);
  const double p = cfg.real("p");
  try {
    const Path psi = direct_solve(phi, p, g, static_cast<std::size_t>(cfg.integer("substeps")), cfg.real("ceiling"));
    const double mass0 = forward_transform(phi).coeffs[0].real() * g.length;
    const double l20 = l2_norm(phi);
    double mass_drift = 0.0, l2_drift = 0.0;
    rep.table.columns = {"t", "mass", "l2", "linf"};
    for (std::size_t k = 0; k < psi.snapshots.size(); ++k) {
      const auto& s = psi.snapshots[k];
      const double mass = forward_transform(s).coeffs[0].real() * g.length;
      const double l2 = l2_norm(s);
      mass_drift = std::max(mass_drift, std::abs(mass - mass0));
      l2_drift = std::max(l2_drift, l20 > 0.0 ? std::abs(l2 - l20) / l20 : 0.0);
      rep.table.rows.push_back({g.time(k), mass, l2, lq_norm(s, INFINITY)});
    }
    rep.result["mass_drift"] = mass_drift;
    rep.result["l2_relative_drift"] = l2_drift;
    rep.result["final_linf"] = lq_norm(psi.snapshots.back(), INFINITY);
    io::write_atomic(dir / "solve_path.bin", io::encode_path(psi));
  } catch (const BlowUpError& e) {
    rep.status = "blow_up";
    rep.code = kNumerical;
    rep.result["message"] = e.what();
    rep.result["blow_up_time"] = e.time;
  }
  return rep;
}

Report run_picard(const RunConfig& cfg, const std::filesystem::path& dir) {
  Report rep;
  PicardConfig pc = make_picard(cfg);
  if (cfg.flag("amplitude_bisect")) {
    pc.data = (1.0 / cfg.real("amplitude")) * pc.data;
    const ThresholdReport tr = bisect_threshold(pc, cfg.real("bisect_start"), cfg.real("bisect_width"));
    rep.result["threshold"] = tr.threshold();
    rep.result["bracket_lo"] = tr.lo;
    rep.result["bracket_hi"] = tr.hi;
    bool monotone = true;
    for (const auto& s : tr.steps)
      monotone = monotone && (s.converged ? s.amplitude <= tr.lo : s.amplitude >= tr.hi);
    rep.result["monotone_bracket"] = monotone;
    rep.table.columns = {"amplitude", "converged", "iterations", "last_ratio"};
    for (const auto& s : tr.steps)
      rep.table.rows.push_back({s.amplitude, s.converged ? 1.0 : 0.0, static_cast<double>(s.iterations), s.last_ratio});
    return rep;
  }
  try {
    const PicardResult r = solve_picard(pc);
    rep.result = trace_json(r.trace);
    rep.table = trace_table(r.trace);
    io::write_atomic(dir / "picard_trace.csv", io::table_csv(rep.table));
    io::write_atomic(dir / "picard_w.bin", io::encode_path(r.w));
    try {
      const Path ref = direct_solve(pc.data, pc.p, pc.grid, pc.substeps, pc.ceiling);
      const double nphi = l2_norm(pc.data);
      const double gap = sup_l2_distance(r.v + r.w, ref);
      rep.result["direct_gap"] = gap;
      rep.result["direct_gap_relative"] = nphi > 0.0 ? gap / nphi : 0.0;
    } catch (const BlowUpError& e) {
      rep.result["direct_gap"] = "blow_up";
    }
    if (!r.trace.converged) {
      rep.status = "not_converged";
      rep.code = kNumerical;
    }
  } catch (const DivergenceError& e) {
    rep.status = "diverged";
    rep.code = kNumerical;
    rep.result = trace_json(e.trace);
    rep.result["message"] = e.what();
    rep.table = trace_table(e.trace);
    io::write_atomic(dir / "picard_trace.csv", io::table_csv(rep.table));
  }
  return rep;
}

Report run_norms(const RunConfig& cfg) {
  Report rep;
  const GridSpec g = make_grid(cfg);
  const Field phi = make_datum(cfg, g);
  const double s = cfg.text("s").empty() ? critical_index(cfg.real("p")).s : std::stod(cfg.text("s"));
  const Band band = make_band(cfg, g);
  const NormReport b = besov_norm(phi, s, band);
  const NormReport h = sobolev_norm(phi, s, band);
  const Path u = free_solution(phi, g);
  const NormReport x = xs_norm(u, s, band);
  auto& r = rep.result;
  r["s"] = s;
  r["band_lo"] = band.lo;
  r["band_hi"] = band.hi;
  r["bands"] = band.size();
  r["l2"] = l2_norm(phi);
  r["besov"] = b.value;
  r["besov_argmax"] = b.argmax;
  r["sobolev"] = h.value;
  r["xs_free"] = x.value;
  r["xs_argmax"] = x.argmax;
  r["v2_kdv_free"] = v2_kdv_norm(u);
  r["out_of_band"] = b.out_of_band;
  rep.table.columns = {"exponent", "lambda", "fraction"};
  for (const auto& row : band_coverage(phi, band)) rep.table.rows.push_back({static_cast<double>(row.exponent), row.lambda, row.fraction});
  return rep;
}

Report run_smallness(const RunConfig& cfg) {
  Report rep;
  const GridSpec g = make_grid(cfg);
  const Field phi = make_datum(cfg, g);
  const SmallnessResult s = verify_l6_smallness(phi, g.horizon(), cfg.real("p"));
  rep.result["sup"] = s.sup;
  rep.result["besov"] = s.besov;
  rep.result["ratio"] = s.ratio;
  rep.result["argmax"] = s.argmax;
  rep.result["gate"] = cfg.real("smallness_gate");
  rep.result["passes_gate"] = s.sup <= cfg.real("smallness_gate");
  return rep;
}

Report run_lipschitz(const RunConfig& cfg) {
  Report rep;
  const PicardConfig pc = make_picard(cfg);
  try {
    const auto levels =
        lipschitz_probe(pc, cfg.real("delta_scale") * pc.data, static_cast<std::size_t>(cfg.integer("levels")));
    double lo = INFINITY, hi = 0.0;
    rep.table.columns = {"perturbation", "difference", "ratio"};
    for (const auto& l : levels) {
      rep.table.rows.push_back({l.perturbation, l.difference, l.ratio});
      lo = std::min(lo, l.ratio);
      hi = std::max(hi, l.ratio);
    }
    rep.result["ratio_min"] = number(lo);
    rep.result["ratio_max"] = number(hi);
    rep.result["stable_within_2"] = hi <= 2.0 * lo || hi == 0.0;
  } catch (const NumericalFailure& e) {
    rep.status = "diverged";
    rep.code = kNumerical;
    rep.result["message"] = e.what();
  }
  return rep;
}

Report run_estimate(const RunConfig& cfg) {
  LabConfig lab = make_lab(cfg);
  const std::string& variant = cfg.text("variant");
  const double p = cfg.real("p");
  const double q = cfg.real("q");
  if (cfg.experiment == "verify-strichartz") {
    if (variant == "bernstein") return estimate_report(verify_bernstein_linfty(lab, p));
    if (variant == "interpolated") return estimate_report(verify_interpolated(lab, q, "linear", p));
    return estimate_report(verify_strichartz(lab, q));
  }
  if (cfg.experiment == "verify-bilinear") {
    if (variant == "interpolated") return estimate_report(verify_interpolated(lab, q, "bilinear", p));
    return estimate_report(verify_bilinear(lab));
  }
  MultilinearConfig mc;
  mc.lab = lab;
  mc.p = p;
  mc.which = cfg.text("case") == "near" ? MultilinearCase::near : MultilinearCase::far;
  mc.lambdas = cfg.list("lambdas");
  mc.epsilon = cfg.real("epsilon");
  mc.delta = cfg.real("delta");
  mc.norm_samples = static_cast<std::size_t>(cfg.integer("norm_samples"));
  return estimate_report(verify_multilinear(mc));
}

}  // namespace

std::string output_directory(const RunConfig& cfg) {
  if (!cfg.text("out_dir").empty()) return cfg.text("out_dir");
  if (const char* env = std::getenv("GKDV_OUT_DIR"); env && *env) return env;
  return "gkdv_out";
}

std::string dry_run_plan(const RunConfig& cfg) {
  std::ostringstream os;
  const std::string& e = cfg.experiment;
  GridSpec g;
  g.length = cfg.real("domain_length");
  g.points = static_cast<std::size_t>(cfg.integer("num_points"));
  g.dealias_factor = cfg.real("dealias_factor");
  const Band band = default_band(g);
  os << "experiment: " << e << "\n";
  os << "grid: L=" << io::format_number(g.length) << " N=" << g.points << " dxi=" << io::format_number(g.dxi())
     << " nyquist=" << io::format_number(g.nyquist()) << "\n";
  os << "bands: " << band.size() << " (exponents " << band.lo << ".." << band.hi << ")\n";
  const double snapshot = static_cast<double>(g.modes()) * 16.0;
  double memory = 0.0;
  std::size_t trials = 0;
  if (e.rfind("verify-", 0) == 0 && e != "verify-smallness") {
    const auto zs = sweep_exponents(cfg.real("sweep_min"), cfg.real("sweep_max"), static_cast<std::size_t>(cfg.integer("sweep_count")));
    trials = zs.size() * static_cast<std::size_t>(cfg.integer("trials"));
    const double per = e == "verify-multilinear" ? snapshot * static_cast<double>(cfg.integer("time_samples") + 8)
                                                 : snapshot * 8.0 * g.dealias_factor;
    memory = per * static_cast<double>(std::max(1, kernels::threads()));
    os << "sweep: " << zs.size() << " frequencies x " << cfg.integer("trials") << " trials = " << trials << " trials\n";
  } else {
    const double steps = std::round(cfg.real("horizon") / cfg.real("dt"));
    const double fine = steps * static_cast<double>(cfg.integer("substeps"));
    memory = (e == "picard" || e == "lipschitz") ? 3.0 * (fine + 1.0) * snapshot : (steps + 1.0) * snapshot * 2.0;
    os << "time: T=" << cfg.text("horizon") << " dt=" << cfg.text("dt") << " steps=" << steps << "\n";
    if (e == "picard" || e == "lipschitz") os << "iterations: <= " << cfg.integer("max_iters") << " per solve\n";
  }
  os << "estimated memory: " << io::format_number(std::ceil(memory / 1048576.0)) << " MiB\n";
  os << "output: " << output_directory(cfg) << "/" << e << "." << cfg.text("format") << "\n";
  return os.str();
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.dry_run) {
    out << dry_run_plan(cfg);
    return kOk;
  }
  kernels::set_threads(static_cast<int>(cfg.integer("threads")));
  const std::filesystem::path dir = output_directory(cfg);
  Report rep;
  try {
    const std::string& e = cfg.experiment;
    if (e == "solve") {
      rep = run_solve(cfg, dir);
    } else if (e == "picard") {
      rep = run_picard(cfg, dir);
    } else if (e == "norms") {
      rep = run_norms(cfg);
    } else if (e == "verify-smallness") {
      rep = run_smallness(cfg);
    } else if (e == "lipschitz") {
      rep = run_lipschitz(cfg);
    } else {
      rep = run_estimate(cfg);
    }
  } catch (const ValidationError& ex) {
    err << "error: " << ex.what() << "\n";
    return kInvalid;
  } catch (const NumericalFailure& ex) {
    rep.status = "numerical_failure";
    rep.code = kNumerical;
    rep.result = json::object();
    rep.result["message"] = ex.what();
  }
  const auto target = dir / (cfg.experiment + "." + cfg.text("format"));
  io::write_atomic(target, render(cfg, rep));
  out << cfg.experiment << ": " << rep.status << " -> " << target.string() << "\n";
  if (rep.code != kOk) err << "numerical failure: " << rep.status << "\n";
  return rep.code;
}

}  // namespace gkdv::cli
