#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "extflow/mode_field.hpp"
#include "extflow/params.hpp"
#include "extflow/spectral.hpp"

namespace extflow::config {

enum class Component { r, theta };

/// amplitude * r^-decay in mode k (and the conjugate in mode -k).
struct ForcingTerm {
  Component component = Component::theta;
  int k = 0;
  cplx amplitude;
  double decay = 4.0;
};

struct BoundaryTerm {
  Component component = Component::theta;
  int k = 0;
  cplx value;
};

struct SolveConfig {
  double mu = 7.0;
  double nu = 0.0;
  int modes = 32;
  std::size_t nodes = 2000;
  double rmax = 1e4;
  double picard_tol = 1e-10;
  double residual_tol = 1e-5;
  int max_iter = 50;
  double lambda_delta = params::kDefaultLambdaDelta;
  std::vector<ForcingTerm> forcing;
  std::vector<BoundaryTerm> boundary;
  int random_boundary = 0;  ///< extra boundary modes 1..n drawn from seed
  double random_amplitude = 1e-3;
  std::string output = "out";
  std::uint64_t seed = 0;
};

/// Parses a JSON configuration. Throws ConfigError on malformed input or
/// violated constraints (forcing decay must exceed 3, k >= 0, real k = 0 entries).
SolveConfig parse_config(const std::string& json_text);
SolveConfig load_config(const std::string& path);

/// Re-checks the invariants after command-line overrides.
void validate(const SolveConfig& cfg);

/// Forcing modes on the given grid, conjugate-completed.
Forcing build_forcing(const SolveConfig& cfg, const GridPtr& grid);

/// Boundary modes (listed plus seeded random), conjugate-completed and
/// not yet normalized.
spectral::BoundaryData build_boundary(const SolveConfig& cfg);

/// Smallest forcing decay exponent, +inf without forcing.
double min_decay(const SolveConfig& cfg);

}  // namespace extflow::config
