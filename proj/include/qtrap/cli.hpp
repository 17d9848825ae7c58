#pragma once

// Command-line driver. Subcommands: zeros, energy, moments, density-r,
// density-t, verify. CSV goes to --out or stdout and is written only after
// the command has fully succeeded.

#include <iosfwd>
#include <string>
#include <vector>

namespace qtrap::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericError = 3, kIoError = 4 };

struct RunConfig {
  std::string command;
  int m = 0;
  int n = 1;
  std::vector<double> alpha_ratio;  // one entry except for density-t
  std::vector<double> xi;           // energy: final xi; density-r: targets
  double t_max = 0.0;               // 0 selects 2 T2
  double eta_obs = 0.0;             // 0 selects x_mn / pi
  int n_max = 100;
  int grid = 0;                     // 0 selects the command default
  std::string out;
  bool negative_control = false;
  // Optional SI scales for the u << c sanity check.
  double phys_radius = 0.0;         // metres
  double phys_mass = 0.0;           // kilograms
};

/// Parses argv into a RunConfig (flags win over --config key=value files),
/// runs the command and returns its exit code. Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs a validated config and returns the CSV or JSON payload.
/// Throws DomainError for config problems and NumericError on tolerance failures.
struct CommandOutput {
  std::string text;
  bool checks_failed = false;  // verify only
};
CommandOutput execute(const RunConfig& config, std::ostream& err);

/// Shortest round-trip decimal form of v.
std::string format_number(double v);

}  // namespace qtrap::cli
