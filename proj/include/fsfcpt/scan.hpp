#pragma once

#include <string>
#include <utility>
#include <vector>

#include <fsfcpt/atom.hpp>
#include <fsfcpt/comb.hpp>
#include <fsfcpt/errors.hpp>

// Declarative parameter scans over the signal engines, a JSON config
// reader that reports every violation at once, and table serialization.
// This layer is double-precision plumbing over the scalar-generic core.

namespace fsfcpt {

enum class ScanEngine { full_solver, narrowband, broadband, doppler, oracle };
enum class ScanVariable { delta, alpha, nu, delta1 };
enum class NormalizeMode { none, peak };
enum class TableFormat { csv, json };

const char* to_string(ScanEngine e);
const char* to_string(ScanVariable v);
const char* to_string(NormalizeMode n);
const char* to_string(TableFormat f);

// Knobs of the time-domain engine; horizon and window sizes are in
// gamma_coh units like everything else.
struct OracleRun {
  double horizon{40.0};
  int average_window{2};
  int nodes{8};
  int samples{2001};
};

struct ScanConfig {
  ScanEngine engine{ScanEngine::full_solver};
  ScanVariable variable{ScanVariable::delta};
  double start{0.0};
  double stop{1.0};
  int count{2};
  LambdaSystem<double> system{};
  CombSpec<double> comb{};
  int m_tilde{0};          // resolved lazily when m_tilde_is_auto
  bool m_tilde_is_auto{true};
  double delta{0.0};       // fixed two-photon detuning for non-delta scans
  int nodes{64};           // velocity quadrature request
  bool fast_doppler{false};
  NormalizeMode normalize{NormalizeMode::none};
  OracleRun oracle{};
  std::vector<std::string> outputs;  // extra report quantities
  std::string out_path;              // empty writes to stdout
  TableFormat format{TableFormat::csv};
};

struct SignalCurve {
  std::string variable;
  std::vector<double> x;
  std::vector<double> s_cpt;
  std::vector<double> s_background;  // empty when the engine has none
  std::vector<std::pair<std::string, std::string>> metadata;
};

// Parses and fully validates a JSON config. Throws validation_error
// carrying every issue found, not just the first.
ScanConfig validate_config(const std::string& raw);

// Semantic re-check of an already-built config (used after CLI overrides).
// Returns every violated rule; empty means valid.
std::vector<std::string> config_issues(const ScanConfig& cfg);

// The harmonic index the scan will use: the configured one, or the
// closest-resonance choice for the configured splitting and spacing.
int resolved_mtilde(const ScanConfig& cfg);

// One engine evaluation per grid point, concurrent over points, output in
// grid order. Failed points carry NaN plus an error note in the metadata;
// the scan itself fails only when more than 10% of the points do.
SignalCurve run_scan(const ScanConfig& cfg);

// Intensity of the synthesized pulse train over the scan grid read as a
// time axis.
SignalCurve run_pulse_train(const ScanConfig& cfg);

// Field-induced resonance distortions at the fixed config parameters,
// one quantity per line.
std::string report_text(const ScanConfig& cfg);

// Serialized table: CSV with '#' metadata lines and 12-significant-digit
// floats, or a JSON object with the metadata and parallel arrays.
// Byte-stable for identical curve and version.
std::string emit_table(const SignalCurve& curve, TableFormat format);

// Reads back a JSON table emitted by emit_table (nulls become NaN).
SignalCurve parse_table_json(const std::string& text);

// Writes the serialized table to the path, or to stdout when it is empty.
void write_table(const SignalCurve& curve, const std::string& path,
                 TableFormat format);

}  // namespace fsfcpt
