// Command-line front end. Exit codes: 0 success, 1 configuration or
// usage problem, 2 numeric failure during the computation itself.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <fsfcpt/errors.hpp>
#include <fsfcpt/scan.hpp>
#include <fsfcpt/version.hpp>

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fsfcpt::io_error("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fsfcpt::io_error("cannot open '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("fsfcpt ") + fsfcpt::version() +
               ": dark-resonance scans of a three-level atom driven by a "
               "quadratic-phase frequency comb"};
  app.require_subcommand(1);

  std::string config_path, out_path, format_s, engine_s, normalize_s;
  int nodes = 0;

  auto add_common = [&](CLI::App* sub, bool scanning) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_path,
                    "output file (overrides config; default stdout)");
    if (scanning) {
      sub->add_option("--format", format_s, "table format: csv or json");
      sub->add_option("--nodes", nodes,
                      "velocity quadrature nodes for the full solver");
      sub->add_option("--engine", engine_s,
                      "full-solver, narrowband, broadband, doppler or oracle");
      sub->add_option("--normalize", normalize_s, "none or peak");
    }
  };

  auto* spectrum =
      app.add_subcommand("spectrum", "signal versus two-photon detuning");
  auto* alpha_scan = app.add_subcommand(
      "alpha-scan", "signal versus the quadratic phase coefficient");
  auto* nu_scan =
      app.add_subcommand("nu-scan", "signal versus the mixing rate nu");
  auto* shift_scan = app.add_subcommand(
      "shift-scan", "light shift versus one-photon detuning");
  auto* pulse_train = app.add_subcommand(
      "pulse-train", "synthesized field intensity versus time");
  auto* validate =
      app.add_subcommand("validate", "parse and check a config file");
  auto* report = app.add_subcommand(
      "report", "field-induced shift and broadening summary");

  add_common(spectrum, true);
  add_common(alpha_scan, true);
  add_common(nu_scan, true);
  add_common(shift_scan, true);
  add_common(pulse_train, false);
  pulse_train->add_option("--format", format_s, "table format: csv or json");
  validate->add_option("--config", config_path, "JSON config file")
      ->required();
  add_common(report, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    auto cfg = fsfcpt::validate_config(slurp(config_path));

    if (app.got_subcommand(spectrum)) cfg.variable = fsfcpt::ScanVariable::delta;
    if (app.got_subcommand(alpha_scan)) cfg.variable = fsfcpt::ScanVariable::alpha;
    if (app.got_subcommand(nu_scan)) cfg.variable = fsfcpt::ScanVariable::nu;
    if (app.got_subcommand(shift_scan)) {
      cfg.variable = fsfcpt::ScanVariable::delta1;
      cfg.engine = fsfcpt::ScanEngine::broadband;
    }

    std::vector<std::string> flag_issues;
    if (!engine_s.empty()) {
      if (engine_s == "full-solver") cfg.engine = fsfcpt::ScanEngine::full_solver;
      else if (engine_s == "narrowband") cfg.engine = fsfcpt::ScanEngine::narrowband;
      else if (engine_s == "broadband") cfg.engine = fsfcpt::ScanEngine::broadband;
      else if (engine_s == "doppler") cfg.engine = fsfcpt::ScanEngine::doppler;
      else if (engine_s == "oracle") cfg.engine = fsfcpt::ScanEngine::oracle;
      else flag_issues.push_back("--engine: unknown engine '" + engine_s + "'");
    }
    if (!normalize_s.empty()) {
      if (normalize_s == "none") cfg.normalize = fsfcpt::NormalizeMode::none;
      else if (normalize_s == "peak") cfg.normalize = fsfcpt::NormalizeMode::peak;
      else flag_issues.push_back("--normalize: must be 'none' or 'peak'");
    }
    if (!format_s.empty()) {
      if (format_s == "csv") cfg.format = fsfcpt::TableFormat::csv;
      else if (format_s == "json") cfg.format = fsfcpt::TableFormat::json;
      else flag_issues.push_back("--format: must be 'csv' or 'json'");
    }
    if (nodes != 0) cfg.nodes = nodes;
    if (!out_path.empty()) cfg.out_path = out_path;

    for (const auto& s : fsfcpt::config_issues(cfg)) flag_issues.push_back(s);
    if (!flag_issues.empty()) {
      for (const auto& s : flag_issues) std::cerr << "config: " << s << "\n";
      return 1;
    }

    if (app.got_subcommand(validate)) {
      std::cout << "ok\n";
      return 0;
    }
    if (app.got_subcommand(report)) {
      write_text(fsfcpt::report_text(cfg), out_path);
      return 0;
    }

    const fsfcpt::SignalCurve curve = app.got_subcommand(pulse_train)
                                          ? fsfcpt::run_pulse_train(cfg)
                                          : fsfcpt::run_scan(cfg);
    fsfcpt::write_table(curve, cfg.out_path, cfg.format);
    return 0;
  } catch (const fsfcpt::validation_error& e) {
    for (const auto& s : e.issues()) std::cerr << "config: " << s << "\n";
    return 1;
  } catch (const fsfcpt::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fsfcpt::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
