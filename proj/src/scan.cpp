#include <fsfcpt/scan.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <fsfcpt/limits.hpp>
#include <fsfcpt/oracle.hpp>
#include <fsfcpt/parallel.hpp>
#include <fsfcpt/solver.hpp>
#include <fsfcpt/version.hpp>

namespace fsfcpt {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// 12 significant digits, the table contract
std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

// Collects structural issues while pulling typed values out of the JSON
// tree, substituting benign defaults so one mistake reports once.
struct ConfigReader {
  std::vector<std::string> issues;

  void complain(const std::string& what) { issues.push_back(what); }

  void check_keys(const ordered_json& obj, const std::string& prefix,
                  std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
      bool known = false;
      for (const char* k : allowed)
        if (item.key() == k) {
          known = true;
          break;
        }
      if (!known) complain("unknown key '" + prefix + item.key() + "'");
    }
  }

  double number(const ordered_json& obj, const std::string& prefix,
                const char* key, bool required, double fallback) {
    if (!obj.contains(key)) {
      if (required) complain("missing key '" + prefix + key + "'");
      return fallback;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
      complain("'" + prefix + key + "' must be a number");
      return fallback;
    }
    return v.get<double>();
  }

  int integer(const ordered_json& obj, const std::string& prefix,
              const char* key, bool required, int fallback) {
    if (!obj.contains(key)) {
      if (required) complain("missing key '" + prefix + key + "'");
      return fallback;
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
      complain("'" + prefix + key + "' must be an integer");
      return fallback;
    }
    return v.get<int>();
  }

  std::string text(const ordered_json& obj, const std::string& prefix,
                   const char* key, bool required,
                   const std::string& fallback) {
    if (!obj.contains(key)) {
      if (required) complain("missing key '" + prefix + key + "'");
      return fallback;
    }
    const auto& v = obj.at(key);
    if (!v.is_string()) {
      complain("'" + prefix + key + "' must be a string");
      return fallback;
    }
    return v.get<std::string>();
  }

  bool flag(const ordered_json& obj, const std::string& prefix,
            const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) {
      complain("'" + prefix + key + "' must be a boolean");
      return fallback;
    }
    return v.get<bool>();
  }
};

bool parse_engine(const std::string& s, ScanEngine& out) {
  if (s == "full-solver") out = ScanEngine::full_solver;
  else if (s == "narrowband") out = ScanEngine::narrowband;
  else if (s == "broadband") out = ScanEngine::broadband;
  else if (s == "doppler") out = ScanEngine::doppler;
  else if (s == "oracle") out = ScanEngine::oracle;
  else return false;
  return true;
}

bool parse_variable(const std::string& s, ScanVariable& out) {
  if (s == "delta") out = ScanVariable::delta;
  else if (s == "alpha") out = ScanVariable::alpha;
  else if (s == "nu") out = ScanVariable::nu;
  else if (s == "delta1") out = ScanVariable::delta1;
  else return false;
  return true;
}

bool parse_normalize(const std::string& s, NormalizeMode& out) {
  if (s == "none") out = NormalizeMode::none;
  else if (s == "peak") out = NormalizeMode::peak;
  else return false;
  return true;
}

bool parse_format(const std::string& s, TableFormat& out) {
  if (s == "csv") out = TableFormat::csv;
  else if (s == "json") out = TableFormat::json;
  else return false;
  return true;
}

struct PointValue {
  double s{kNaN};
  double bg{kNaN};
};

PointValue eval_point(const ScanConfig& cfg, int m_tilde, double xi) {
  auto sys = cfg.system;
  auto comb = cfg.comb;
  double d = cfg.delta;
  switch (cfg.variable) {
    case ScanVariable::delta: d = xi; break;
    case ScanVariable::alpha: comb.alpha = xi; break;
    case ScanVariable::nu: sys.nu = xi; break;
    case ScanVariable::delta1: sys.delta1 = xi; break;
  }

  PointValue out;
  switch (cfg.engine) {
    case ScanEngine::narrowband:
      out.s = signal_narrowband(sys, comb, m_tilde, d);
      break;
    case ScanEngine::broadband:
      out.s = cfg.variable == ScanVariable::delta1
                  ? light_shift(sys, comb)
                  : signal_broadband(sys, comb, m_tilde, d);
      break;
    case ScanEngine::doppler:
      out.s = signal_doppler(sys, comb, m_tilde, d, cfg.fast_doppler);
      break;
    case ScanEngine::full_solver: {
      const auto tab = ComponentTable<double>::from_spec(comb);
      if (sys.kv0 > 0.0) {
        const auto [pt, info] =
            cpt_signal_refined(sys, tab, m_tilde, d, cfg.nodes);
        out.s = pt.s_cpt;
        out.bg = pt.s_background;
      } else {
        const auto grid = build_velocity_grid(0.0, 1);
        const auto pt = cpt_signal(sys, tab, m_tilde, d, grid);
        out.s = pt.s_cpt;
        out.bg = pt.s_background;
      }
      break;
    }
    case ScanEngine::oracle: {
      OracleOptions<double> opt;
      opt.nodes = cfg.oracle.nodes;
      opt.samples = cfg.oracle.samples;
      const auto pt = time_domain_oracle(sys, comb, m_tilde, d,
                                         cfg.oracle.horizon,
                                         cfg.oracle.average_window, opt);
      out.s = pt.s_cpt;
      out.bg = pt.s_background;
      break;
    }
  }
  return out;
}

void append_parameter_metadata(const ScanConfig& cfg, int m_tilde,
                               SignalCurve& curve) {
  auto& md = curve.metadata;
  md.emplace_back("fsfcpt", version());
  md.emplace_back("engine", to_string(cfg.engine));
  md.emplace_back("variable", to_string(cfg.variable));
  md.emplace_back("start", fmt(cfg.start));
  md.emplace_back("stop", fmt(cfg.stop));
  md.emplace_back("count", std::to_string(cfg.count));
  md.emplace_back("m_tilde", std::to_string(m_tilde) +
                                 (cfg.m_tilde_is_auto ? " (auto)" : ""));
  if (cfg.variable != ScanVariable::delta)
    md.emplace_back("delta", fmt(cfg.delta));
  md.emplace_back("normalize", to_string(cfg.normalize));
  md.emplace_back("comb.rabi1", fmt(cfg.comb.rabi1));
  md.emplace_back("comb.rabi2", fmt(cfg.comb.rabi2));
  md.emplace_back("comb.n0", fmt(cfg.comb.n0));
  md.emplace_back("comb.spacing", fmt(cfg.comb.spacing));
  md.emplace_back("comb.alpha", fmt(cfg.comb.alpha));
  md.emplace_back("comb.beta", fmt(cfg.comb.beta));
  md.emplace_back("comb.phi0", fmt(cfg.comb.phi0));
  md.emplace_back("comb.n_max", std::to_string(cfg.comb.n_max));
  md.emplace_back("atom.omega21", fmt(cfg.system.omega21));
  md.emplace_back("atom.p1", fmt(cfg.system.p1));
  md.emplace_back("atom.p2", fmt(cfg.system.p2));
  md.emplace_back("atom.gamma_prime", fmt(cfg.system.gamma_prime));
  md.emplace_back("atom.gamma_coh", fmt(cfg.system.gamma_coh));
  md.emplace_back("atom.nu", fmt(cfg.system.nu));
  md.emplace_back("atom.kv0", fmt(cfg.system.kv0));
  md.emplace_back("atom.delta1", fmt(cfg.system.delta1));
  switch (cfg.engine) {
    case ScanEngine::full_solver:
      md.emplace_back("nodes", std::to_string(cfg.nodes));
      md.emplace_back("refine_rel_tol", "1e-6");
      break;
    case ScanEngine::doppler:
      md.emplace_back("fast_doppler", cfg.fast_doppler ? "true" : "false");
      break;
    case ScanEngine::oracle:
      md.emplace_back("oracle.horizon", fmt(cfg.oracle.horizon));
      md.emplace_back("oracle.average_window",
                      std::to_string(cfg.oracle.average_window));
      md.emplace_back("oracle.nodes", std::to_string(cfg.oracle.nodes));
      md.emplace_back("oracle.samples", std::to_string(cfg.oracle.samples));
      break;
    default:
      break;
  }
}

}  // namespace

const char* to_string(ScanEngine e) {
  switch (e) {
    case ScanEngine::full_solver: return "full-solver";
    case ScanEngine::narrowband: return "narrowband";
    case ScanEngine::broadband: return "broadband";
    case ScanEngine::doppler: return "doppler";
    case ScanEngine::oracle: return "oracle";
  }
  return "?";
}

const char* to_string(ScanVariable v) {
  switch (v) {
    case ScanVariable::delta: return "delta";
    case ScanVariable::alpha: return "alpha";
    case ScanVariable::nu: return "nu";
    case ScanVariable::delta1: return "delta1";
  }
  return "?";
}

const char* to_string(NormalizeMode n) {
  return n == NormalizeMode::peak ? "peak" : "none";
}

const char* to_string(TableFormat f) {
  return f == TableFormat::json ? "json" : "csv";
}

std::vector<std::string> config_issues(const ScanConfig& cfg) {
  std::vector<std::string> issues;
  auto bad = [&](const std::string& s) { issues.push_back(s); };

  if (cfg.count < 2) bad("scan: grid count >= 2 required");
  if (!(cfg.start < cfg.stop)) bad("scan: start must be < stop");

  if (!(cfg.comb.n0 > 0.0)) bad("comb: n0 must be > 0");
  if (!(cfg.comb.spacing > 0.0)) bad("comb: spacing must be > 0");
  if (cfg.comb.rabi1 < 0.0 || cfg.comb.rabi2 < 0.0)
    bad("comb: Rabi amplitudes must be >= 0");
  if (cfg.comb.n_max < 0) bad("comb: n_max must be >= 0");

  if (!(cfg.system.omega21 > 0.0)) bad("atom: omega21 must be > 0");
  if (cfg.system.p1 < 0.0 || cfg.system.p2 < 0.0)
    bad("atom: populations must be >= 0");
  if (cfg.system.p1 + cfg.system.p2 > 1.0 + 1e-12)
    bad("atom: p1 + p2 must not exceed 1");
  if (!(cfg.system.gamma_prime > 0.0)) bad("atom: gamma_prime must be > 0");
  if (cfg.system.gamma_coh < 0.0) bad("atom: gamma_coh must be >= 0");
  if (cfg.system.nu < 0.0) bad("atom: nu must be >= 0");
  if (cfg.system.kv0 < 0.0) bad("atom: kv0 must be >= 0");

  if (cfg.nodes < 1) bad("nodes: must be >= 1");
  if (!(cfg.oracle.horizon > 0.0)) bad("oracle: horizon must be > 0");
  if (cfg.oracle.average_window < 1) bad("oracle: average_window must be >= 1");
  if (cfg.oracle.nodes < 1) bad("oracle: nodes must be >= 1");
  if (cfg.oracle.samples < 5) bad("oracle: samples must be >= 5");

  if (cfg.engine == ScanEngine::doppler && cfg.system.kv0 == 0.0)
    bad("engine: doppler requires kv0 > 0");
  if (cfg.variable == ScanVariable::nu &&
      (cfg.engine == ScanEngine::narrowband ||
       cfg.engine == ScanEngine::broadband))
    bad("scan: the narrowband and broadband engines do not depend on nu");
  if (cfg.variable == ScanVariable::delta1 &&
      cfg.engine != ScanEngine::broadband)
    bad("scan: delta1 scans the light shift; use the broadband engine");

  for (const auto& o : cfg.outputs) {
    if (o != "zero_shift") {
      bad("outputs: unknown quantity '" + o + "'");
      continue;
    }
    if (cfg.comb.rabi1 * cfg.comb.rabi1 == cfg.comb.rabi2 * cfg.comb.rabi2)
      bad("outputs: zero_shift requested with equal Rabi amplitudes, which "
          "admit no zero-shift detuning");
  }
  return issues;
}

ScanConfig validate_config(const std::string& raw) {
  ordered_json root;
  try {
    root = ordered_json::parse(raw, nullptr, true, /*ignore_comments=*/true);
  } catch (const ordered_json::parse_error& e) {
    throw validation_error({std::string("config is not valid JSON: ") +
                            e.what()});
  }
  ConfigReader r;
  if (!root.is_object())
    throw validation_error({"config must be a JSON object"});

  r.check_keys(root, "",
               {"engine", "scan", "comb", "atom", "m_tilde", "delta", "nodes",
                "normalize", "fast_doppler", "oracle", "outputs", "output"});

  ScanConfig cfg;

  const std::string engine_s = r.text(root, "", "engine", true, "narrowband");
  if (!parse_engine(engine_s, cfg.engine))
    r.complain("engine: unknown engine '" + engine_s + "'");

  if (!root.contains("scan") || !root.at("scan").is_object()) {
    r.complain("missing section 'scan'");
  } else {
    const auto& scan = root.at("scan");
    r.check_keys(scan, "scan.", {"variable", "start", "stop", "count"});
    const std::string var_s = r.text(scan, "scan.", "variable", true, "delta");
    if (!parse_variable(var_s, cfg.variable))
      r.complain("scan: unknown variable '" + var_s + "'");
    cfg.start = r.number(scan, "scan.", "start", true, 0.0);
    cfg.stop = r.number(scan, "scan.", "stop", true, 1.0);
    cfg.count = r.integer(scan, "scan.", "count", true, 2);
  }

  if (!root.contains("comb") || !root.at("comb").is_object()) {
    r.complain("missing section 'comb'");
    cfg.comb = make_comb(1.0, 1.0, 1.0, 1.0, 0.0);
  } else {
    const auto& comb = root.at("comb");
    r.check_keys(comb, "comb.",
                 {"rabi1", "rabi2", "n0", "spacing", "alpha", "beta", "phi0",
                  "n_max"});
    cfg.comb.rabi1 = r.number(comb, "comb.", "rabi1", true, 1.0);
    cfg.comb.rabi2 = r.number(comb, "comb.", "rabi2", true, 1.0);
    cfg.comb.n0 = r.number(comb, "comb.", "n0", true, 1.0);
    cfg.comb.spacing = r.number(comb, "comb.", "spacing", true, 1.0);
    cfg.comb.alpha = r.number(comb, "comb.", "alpha", false, 0.0);
    cfg.comb.beta = r.number(comb, "comb.", "beta", false, 0.0);
    cfg.comb.phi0 = r.number(comb, "comb.", "phi0", false, 0.0);
    const int n_max = r.integer(comb, "comb.", "n_max", false, 0);
    cfg.comb.n_max = n_max > 0 ? n_max
                               : default_component_cutoff(
                                     cfg.comb.n0 > 0.0 ? cfg.comb.n0 : 1.0);
  }

  if (!root.contains("atom") || !root.at("atom").is_object()) {
    r.complain("missing section 'atom'");
  } else {
    const auto& atom = root.at("atom");
    r.check_keys(atom, "atom.",
                 {"omega21", "p1", "p2", "gamma_prime", "gamma_coh", "nu",
                  "kv0", "delta1"});
    cfg.system.omega21 = r.number(atom, "atom.", "omega21", true, 1.0);
    cfg.system.gamma_prime = r.number(atom, "atom.", "gamma_prime", true, 1.0);
    cfg.system.gamma_coh = r.number(atom, "atom.", "gamma_coh", false, 1.0);
    cfg.system.p1 = r.number(atom, "atom.", "p1", false, 0.5);
    cfg.system.p2 = r.number(atom, "atom.", "p2", false, 0.5);
    cfg.system.nu = r.number(atom, "atom.", "nu", false, 0.0);
    cfg.system.kv0 = r.number(atom, "atom.", "kv0", false, 0.0);
    cfg.system.delta1 = r.number(atom, "atom.", "delta1", false, 0.0);
  }

  if (root.contains("m_tilde")) {
    cfg.m_tilde = r.integer(root, "", "m_tilde", false, 0);
    cfg.m_tilde_is_auto = false;
  }
  cfg.delta = r.number(root, "", "delta", false, 0.0);
  cfg.nodes = r.integer(root, "", "nodes", false, 64);
  const std::string norm_s = r.text(root, "", "normalize", false, "none");
  if (!parse_normalize(norm_s, cfg.normalize))
    r.complain("normalize: must be 'none' or 'peak'");
  cfg.fast_doppler = r.flag(root, "", "fast_doppler", false);

  if (root.contains("oracle")) {
    const auto& oracle = root.at("oracle");
    if (!oracle.is_object()) {
      r.complain("'oracle' must be an object");
    } else {
      r.check_keys(oracle, "oracle.",
                   {"horizon", "average_window", "nodes", "samples"});
      cfg.oracle.horizon = r.number(oracle, "oracle.", "horizon", false, 40.0);
      cfg.oracle.average_window =
          r.integer(oracle, "oracle.", "average_window", false, 2);
      cfg.oracle.nodes = r.integer(oracle, "oracle.", "nodes", false, 8);
      cfg.oracle.samples = r.integer(oracle, "oracle.", "samples", false, 2001);
    }
  }

  if (root.contains("outputs")) {
    const auto& outputs = root.at("outputs");
    if (!outputs.is_array()) {
      r.complain("'outputs' must be an array of strings");
    } else {
      for (const auto& o : outputs) {
        if (!o.is_string())
          r.complain("'outputs' must be an array of strings");
        else
          cfg.outputs.push_back(o.get<std::string>());
      }
    }
  }

  if (root.contains("output")) {
    const auto& output = root.at("output");
    if (!output.is_object()) {
      r.complain("'output' must be an object");
    } else {
      r.check_keys(output, "output.", {"path", "format"});
      cfg.out_path = r.text(output, "output.", "path", false, "");
      const std::string fmt_s = r.text(output, "output.", "format", false,
                                       "csv");
      if (!parse_format(fmt_s, cfg.format))
        r.complain("output: format must be 'csv' or 'json'");
    }
  }

  for (const auto& s : config_issues(cfg)) r.complain(s);
  if (!r.issues.empty()) throw validation_error(r.issues);
  return cfg;
}

int resolved_mtilde(const ScanConfig& cfg) {
  return cfg.m_tilde_is_auto
             ? select_mtilde(cfg.system.omega21, cfg.comb.spacing)
             : cfg.m_tilde;
}

SignalCurve run_scan(const ScanConfig& cfg) {
  {
    auto issues = config_issues(cfg);
    if (!issues.empty()) throw validation_error(std::move(issues));
  }
  const int m_tilde = resolved_mtilde(cfg);
  const int n = cfg.count;

  SignalCurve curve;
  curve.variable = to_string(cfg.variable);
  curve.x.resize(n);
  for (int i = 0; i < n; ++i)
    curve.x[i] = cfg.start + (cfg.stop - cfg.start) * i / (n - 1);

  const bool has_bg = cfg.engine == ScanEngine::full_solver ||
                      cfg.engine == ScanEngine::oracle;
  curve.s_cpt.assign(n, kNaN);
  if (has_bg) curve.s_background.assign(n, kNaN);
  std::vector<std::string> errors(n);

  parallel_for(n, [&](std::ptrdiff_t i) {
    try {
      const auto pt = eval_point(cfg, m_tilde, curve.x[i]);
      curve.s_cpt[i] = pt.s;
      if (has_bg) curve.s_background[i] = pt.bg;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  int failed = 0;
  std::string first_error;
  for (int i = 0; i < n; ++i) {
    if (errors[i].empty()) continue;
    ++failed;
    if (first_error.empty()) first_error = errors[i];
  }
  if (10 * failed > n)
    throw numeric_error("scan: " + std::to_string(failed) + " of " +
                        std::to_string(n) +
                        " points failed; first error: " + first_error);

  if (cfg.normalize == NormalizeMode::peak) {
    double peak = 0.0;
    for (double s : curve.s_cpt)
      if (std::isfinite(s)) peak = std::max(peak, std::abs(s));
    if (!(peak > 0.0))
      throw numeric_error("scan: nothing to normalize, no finite nonzero "
                          "signal values");
    for (double& s : curve.s_cpt) s /= peak;
  }

  append_parameter_metadata(cfg, m_tilde, curve);
  for (int i = 0; i < n; ++i)
    if (!errors[i].empty())
      curve.metadata.emplace_back("point_" + std::to_string(i) + "_error",
                                  errors[i]);
  return curve;
}

SignalCurve run_pulse_train(const ScanConfig& cfg) {
  {
    auto issues = config_issues(cfg);
    if (!issues.empty()) throw validation_error(std::move(issues));
  }
  const int n = cfg.count;
  SignalCurve curve;
  curve.variable = "time";
  curve.x.resize(n);
  for (int i = 0; i < n; ++i)
    curve.x[i] = cfg.start + (cfg.stop - cfg.start) * i / (n - 1);

  const Eigen::Map<const Eigen::VectorXd> times(curve.x.data(), n);
  const Eigen::VectorXd intensity = pulse_train_intensity(cfg.comb, times);
  curve.s_cpt.assign(intensity.data(), intensity.data() + n);

  auto& md = curve.metadata;
  md.emplace_back("fsfcpt", version());
  md.emplace_back("engine", "pulse-train");
  md.emplace_back("variable", "time");
  md.emplace_back("start", fmt(cfg.start));
  md.emplace_back("stop", fmt(cfg.stop));
  md.emplace_back("count", std::to_string(n));
  md.emplace_back("comb.rabi1", fmt(cfg.comb.rabi1));
  md.emplace_back("comb.rabi2", fmt(cfg.comb.rabi2));
  md.emplace_back("comb.n0", fmt(cfg.comb.n0));
  md.emplace_back("comb.spacing", fmt(cfg.comb.spacing));
  md.emplace_back("comb.alpha", fmt(cfg.comb.alpha));
  md.emplace_back("comb.beta", fmt(cfg.comb.beta));
  md.emplace_back("comb.phi0", fmt(cfg.comb.phi0));
  md.emplace_back("comb.n_max", std::to_string(cfg.comb.n_max));
  return curve;
}

std::string report_text(const ScanConfig& cfg) {
  {
    auto issues = config_issues(cfg);
    if (!issues.empty()) throw validation_error(std::move(issues));
  }
  const int m_tilde = resolved_mtilde(cfg);
  const auto rep = shift_broadening_report(cfg.system, cfg.comb, m_tilde);
  std::string out;
  out += std::string("# fsfcpt ") + version() + " resonance report\n";
  out += "m_tilde = " + std::to_string(m_tilde) + "\n";
  out += "gamma_b = " + fmt(rep.gamma_b) + "\n";
  out += "delta_f = " + fmt(rep.delta_f) + "\n";
  out += "delta_z = " + (rep.delta_z ? fmt(*rep.delta_z)
                                     : std::string("n/a (equal Rabi "
                                                   "amplitudes)")) +
         "\n";
  out += "delta_s = " + (rep.delta_s ? fmt(*rep.delta_s)
                                     : std::string("n/a (minimum not "
                                                   "localizable)")) +
         "\n";
  return out;
}

std::string emit_table(const SignalCurve& curve, TableFormat format) {
  const bool has_bg = !curve.s_background.empty();
  if (has_bg && curve.s_background.size() != curve.x.size())
    throw domain_error("emit_table: array lengths differ");
  if (curve.s_cpt.size() != curve.x.size())
    throw domain_error("emit_table: array lengths differ");

  if (format == TableFormat::csv) {
    std::string out;
    for (const auto& [k, v] : curve.metadata)
      out += "# " + k + " = " + v + "\n";
    out += curve.variable + ",s_cpt";
    if (has_bg) out += ",s_background";
    out += "\n";
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
      out += fmt(curve.x[i]) + "," + fmt(curve.s_cpt[i]);
      if (has_bg) out += "," + fmt(curve.s_background[i]);
      out += "\n";
    }
    return out;
  }

  ordered_json j;
  ordered_json md = ordered_json::object();
  for (const auto& [k, v] : curve.metadata) md[k] = v;
  j["metadata"] = std::move(md);
  j["variable"] = curve.variable;
  j["x"] = curve.x;
  j["s_cpt"] = curve.s_cpt;
  if (has_bg) j["s_background"] = curve.s_background;
  return j.dump(2) + "\n";
}

SignalCurve parse_table_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw io_error(std::string("parse_table_json: ") + e.what());
  }
  SignalCurve curve;
  try {
    curve.variable = j.at("variable").get<std::string>();
    auto read_array = [&](const char* key, std::vector<double>& out) {
      if (!j.contains(key)) return;
      for (const auto& v : j.at(key))
        out.push_back(v.is_null() ? kNaN : v.get<double>());
    };
    read_array("x", curve.x);
    read_array("s_cpt", curve.s_cpt);
    read_array("s_background", curve.s_background);
    if (j.contains("metadata"))
      for (const auto& item : j.at("metadata").items())
        curve.metadata.emplace_back(item.key(),
                                    item.value().get<std::string>());
  } catch (const ordered_json::exception& e) {
    throw io_error(std::string("parse_table_json: ") + e.what());
  }
  return curve;
}

void write_table(const SignalCurve& curve, const std::string& path,
                 TableFormat format) {
  const std::string bytes = emit_table(curve, format);
  if (path.empty()) {
    std::cout << bytes;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("write_table: cannot open '" + path + "'");
  out << bytes;
  out.flush();
  if (!out) throw io_error("write_table: failed writing '" + path + "'");
}

}  // namespace fsfcpt
