#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disklab/perturbation.hpp"
#include "disklab/spectral.hpp"
#include "disklab/steady.hpp"

namespace disklab {

enum class ExperimentKind {
  BesselTable,
  VerifyIdentities,
  Eigs,
  SteadyCheck,
  BurtonMaximize,
  Evolve,
  StabilitySweep,
  RotateDemo,
  SharpnessDemo,
};

/// Throws ConfigError for names outside the list above.
ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Eigs;
  std::uint64_t seed = 1;
  /// L^p exponent of every distance and norm diagnostic; 1 < p < inf.
  double p = 2.0;
  std::string output = "out";

  Resolution resolution;
  VElement element{0.0, 1.0, 0.0};

  PerturbationKind perturbation_kind = PerturbationKind::SmoothRandom;
  /// delta = relative_amplitude * ||element||_p.
  double relative_amplitude = 1e-3;
  int mode_n = 2;
  int mode_k = 1;

  /// End time in turnover times; t_end > 0 overrides it.
  double turnovers = 20.0;
  double t_end = 0.0;
  double cfl_safety = 0.5;
  int cadence = 10;
  double omega = 0.5;

  int table_order = 3;
  int table_index = 5;
  int random_samples = 100;

  int burton_radial = 128;
  int burton_azimuthal = 256;
  int burton_iterations = 3000;
  int burton_runs = 10;

  int sweep_members = 5;

  int sharpness_n = 50;
  std::vector<double> sharpness_betas;  // empty: pi/4, pi/2, pi
};

/// Parses flat `key = value` lines grouped under `[section]` headers; `#`
/// and `;` start comments. Omitted keys keep their defaults; `kind` is
/// required. Throws ConfigError naming the line for syntax errors and the
/// key for unknown, duplicate or out-of-range entries.
ExperimentConfig parse_config(const std::string& text);

/// As above, with `kind` taken from `fallback_kind` when the document has
/// none. A document kind that disagrees with it is an error.
ExperimentConfig parse_config(const std::string& text, const std::string& fallback_kind);

/// Range checks shared by the parser and programmatic callers.
void validate(const ExperimentConfig& cfg);

/// Canonical `section.key = value` listing of every field, sorted, reals
/// with 17 significant digits.
std::string canonical_text(const ExperimentConfig& cfg);

/// FNV-1a 64 of canonical_text with `output` blanked, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace disklab
