#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "disklab/config.hpp"
#include "disklab/euler.hpp"
#include "disklab/perturbation.hpp"
#include "disklab/variational.hpp"

namespace disklab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitToleranceFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

/// One asserted tolerance: pass is value <= bound unless stated otherwise.
struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

Check check_at_most(std::string name, double value, double bound);
Check check_at_least(std::string name, double value, double bound);

struct ExperimentOutput {
  std::vector<Check> checks;
  /// results.csv body (header included, hash comment excluded).
  std::string results_csv;
  /// fields/<name>.json payloads.
  std::vector<std::pair<std::string, nlohmann::json>> fields;
  /// Further CSV files in the output directory (traces), by file name.
  std::vector<std::pair<std::string, std::string>> extra_csv;
  bool passed() const;
};

/// Runs the configured experiment without touching the file system.
ExperimentOutput execute(const ExperimentConfig& cfg);

/// execute() plus manifest.json, results.csv, fields/*.json and traces under
/// cfg.output. Returns kExitOk, kExitToleranceFailure or kExitRuntimeError.
int run_experiment(const ExperimentConfig& cfg);

/// 0, 0.5, 1, 2, j, 5, 10, 20 followed by `random_count` uniform draws on (0, 20).
std::vector<double> identity_samples(int random_count, std::uint64_t seed);

/// J_1(j r) cos(theta) + J_0(j_{0,1} r) projected onto the basis: built from
/// two different eigenvalues, so it is not steady.
SpectralField mixed_field(const BasisPtr& basis, const GridPtr& grid);

struct PerturbedRun {
  double delta = 0.0;  // ||perturbation||_p
  double turnover = 0.0;
  RunResult run;
};

/// Evolves base + perturbation for `turnovers` turnover times of base, with
/// orbital distances measured against the orbit of base. The perturbation
/// has L^p size spec.amplitude * ||base||_p.
PerturbedRun run_perturbed(const EulerModel& model, const SpectralField& base, PerturbationSpec spec, double p,
                           double turnovers, int cadence = 10, double cfl_safety = 0.5);

struct RotationDemo {
  double omega = 0.0;
  double fitted_omega = 0.0;
  double relative_error = 0.0;
  RunResult run;
};

/// Evolves v + 2 Omega without perturbation over one period 2 pi / |Omega|.
RotationDemo run_rotation_demo(const EulerModel& model, const VElement& v, double omega, double p, int cadence = 10);

struct SharpnessPoint {
  double beta = 0.0;
  double t = 0.0;
  /// -beta* wrapped to [0, 2 pi): angle by which the state has turned.
  double phase = 0.0;
  double phase_relative_error = 0.0;
  double orbital_distance = 0.0;
  /// ||w(t) - v||_p with no rotation.
  double fixed_point_distance = 0.0;
  double initial_fixed_point_distance = 0.0;
};

/// Evolves v + 2/n to t = n beta for each beta; the state should be v
/// rotated by beta.
std::vector<SharpnessPoint> run_sharpness(const EulerModel& model, const VElement& v, int n,
                                          const std::vector<double>& betas, double p);

struct BurtonRun {
  std::uint64_t seed = 0;
  double reference_energy = 0.0;  // E_h of v sampled on the ascent grid
  double reference_norm = 0.0;    // ||v||_2 on the ascent grid
  bool monotone = true;
  std::string failure;            // non-empty if the ascent threw
  BurtonResult result;
};

/// Ascent from a random permutation of v's cell values on an equal-area grid.
BurtonRun run_burton(const VElement& v, std::uint64_t seed, const GridPtr& grid, int max_iters,
                     const BasisPtr& basis);

}  // namespace disklab
