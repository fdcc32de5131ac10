#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitIo = 3,
};

enum class Command { WitnessScan, StrengthCurve, EffStrength, Verify, MonteCarlo };
enum class Format { Csv, Json };

/// Parameters for one CLI invocation. Defaults follow the figure captions
/// (omega = 1, gamma0 = 0.1, nbar = 0).
struct RunConfig {
  Command command = Command::WitnessScan;
  double omega = 1.0;
  double gamma0 = 0.1;
  double nbar = 0.0;
  double tau_min = 0.0;
  double tau_max = 40.0;
  int tau_steps = 401;
  std::vector<double> epsilons{0.25, 0.5, 0.75, 1.0};
  /// gamma0 values for eff-strength.
  std::vector<double> gammas{0.0, 0.05, 0.1, 0.2};
  /// Grid size on [0, 1] for strength-curve when no epsilons are given.
  int points = 101;
  bool epsilons_given = false;
  std::string output_path = "-";
  Format format = Format::Csv;
  std::uint64_t seed = 1;
  std::int64_t shots = 100000;
  double tol = 1e-9;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws ConfigError describing the first violated constraint.
void validate(const RunConfig& cfg);

/// tau_steps points from tau_min to tau_max inclusive.
std::vector<double> tau_grid(const RunConfig& cfg);

/// Rectangular result set; an empty optional renders as an empty CSV field
/// (JSON null).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;
};

Table witness_scan_table(const RunConfig& cfg);
Table strength_curve_table(const RunConfig& cfg);
Table eff_strength_table(const RunConfig& cfg);
Table monte_carlo_table(const RunConfig& cfg);

/// 17 significant digits, `.` decimal point regardless of locale.
std::string format_number(double v);
std::string render(const Table& table, Format format);

struct SuiteResult {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Oracle-equivalence and invariant spot checks at the configured params.
std::vector<SuiteResult> run_verification(const RunConfig& cfg);
std::string render_report(const std::vector<SuiteResult>& suites);

/// Writes to `out` when path is "-", otherwise to a temporary sibling that
/// is renamed over `path`. Returns kExitOk or kExitIo.
int write_output(const std::string& text, const std::string& path, std::ostream& out,
                 std::ostream& err);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv and runs; returns the process exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nsit::cli
