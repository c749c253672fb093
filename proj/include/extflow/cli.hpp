#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "extflow/checks.hpp"
#include "extflow/config.hpp"
#include "extflow/nonlinear.hpp"

namespace extflow::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kInadmissible = 3,
  kNoConvergence = 4,
  kVerificationFailed = 5,
};

struct AdmissibleScan {
  double nu_min = -4.0, nu_max = 2.0;
  double mu_min = 0.0, mu_max = 12.0;
  int steps = 25;
};

/// steps x steps grid of (nu, mu, Re xi_1^-, margin, admissible, critical_mu)
/// rows, plus one row per nu of the bisected threshold next to the closed form.
/// Throws ConfigError for empty ranges.
void run_admissible(const AdmissibleScan& scan, std::ostream& region_csv,
                    std::ostream& boundary_csv);

/// Everything a solve produces, before anything is written.
struct SolveOutcome {
  FlowParameters params;       ///< nu after moving the mean of g_r into it
  double nu_input = 0.0;
  spectral::BoundaryData boundary;  ///< normalized
  Forcing forcing;
  params::AdmissibilityReport admissibility;
  nonlinear::PicardResult picard;
  nonlinear::CurlResidual residual;
  double divergence = 0.0;
  double boundary_error = 0.0;
  double physical_boundary_error = 0.0;
  double conjugate = 0.0;
  std::vector<std::string> warnings;
};

/// Runs admissibility, the Picard loop and the structural checks. Throws
/// InadmissibleParameters when the core is not admissible.
SolveOutcome solve(const config::SolveConfig& cfg);

/// Writes modes.csv, diagnostics.json, field.csv and decay_plot.csv into dir.
void write_outputs(const SolveOutcome& out, const config::SolveConfig& cfg,
                   const std::string& dir);

/// solve + write_outputs; returns an ExitCode and logs a summary.
int run_solve(const config::SolveConfig& cfg, std::ostream& log);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<Check> checks;
  bool pass() const;
};

/// Reloads the files in dir (written for cfg) and re-runs the invariant
/// suite. Throws ConfigError on malformed files.
VerifyReport run_verify(const config::SolveConfig& cfg, const std::string& dir);

/// Command-line entry point.
int run(int argc, char** argv);

}  // namespace extflow::cli
