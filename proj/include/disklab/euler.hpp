#pragma once

#include <optional>
#include <string>
#include <vector>

#include "disklab/grid.hpp"
#include "disklab/spectral.hpp"
#include "disklab/steady.hpp"

namespace disklab {

/// Largest (n, k) kept by the tendency projection.
struct DealiasLimits {
  int n_max;
  int k_max;
};

/// floor(2N/3), floor(2K/3).
DealiasLimits two_thirds_limits(const SpectralBasis& basis);

/// Pseudo-spectral right-hand side of the vorticity equation
///   d_t w = -(1/r) (d_theta psi d_r w - d_r psi d_theta w),  psi = G w.
///
/// d_r comes from exact derivatives of the radial basis and (1/r) d_theta
/// from the regular tables R_{n,k}/r, so no 1/r is formed on the grid. The
/// constant part c_0 of w only rotates the field, d_t w = -(c_0/2) d_theta w,
/// and is applied exactly in coefficient space.
class EulerModel {
 public:
  EulerModel(BasisPtr basis, GridPtr grid);
  EulerModel(BasisPtr basis, GridPtr grid, DealiasLimits limits);

  const SpectralBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const GridPtr& grid_ptr() const { return grid_; }
  DealiasLimits limits() const { return limits_; }
  /// Largest wavenumber in the dealiased set; the CFL length scale is its inverse.
  double max_wavenumber() const { return max_wavenumber_; }

  /// Tendency projected onto the dealiased set. If max_speed is given it
  /// receives max |u| over the grid, including the rotation from c_0.
  SpectralField tendency(const SpectralField& w, double* max_speed = nullptr, Exec exec = Exec::Parallel) const;

  double max_speed(const SpectralField& w) const;

 private:
  BasisPtr basis_;
  GridPtr grid_;
  std::shared_ptr<const Transform> transform_;
  DealiasLimits limits_;
  double max_wavenumber_;
};

/// Tendency on the default grid for w's basis.
SpectralField tendency(const SpectralField& w);

struct Diagnostic {
  double t = 0.0;
  double energy = 0.0;
  double l2 = 0.0;
  double lp = 0.0;
  double mean = 0.0;
  double orbital_distance = 0.0;  // NaN without a reference
  double beta_star = 0.0;         // NaN without a reference
};

struct SolverState {
  SpectralField w;
  double t = 0.0;
  long steps = 0;
  std::vector<Diagnostic> trace;
};

enum class DtPolicy { Fixed, Cfl };

struct RunConfig {
  DtPolicy dt_policy = DtPolicy::Cfl;
  /// Used as-is under Fixed.
  double dt = 1e-2;
  /// Under Cfl: dt = safety / (u_max lambda_max) from the initial field,
  /// shrunk so that an integer number of steps reaches T.
  double cfl_safety = 0.5;
  /// step_rk4 rejects dt u_max lambda_max above this.
  double cfl_limit = 1.0;
  double t_end = 1.0;
  int cadence = 10;
  double p = 2.0;
  std::optional<SpectralField> reference;
};

/// Classical RK4 step. Throws CflViolation if dt u_max lambda_max exceeds
/// cfl_limit for the field at the start of the step.
void step_rk4(const EulerModel& model, SolverState& s, double dt, double cfl_limit = 1.0);

/// 2 pi / max|u| of w.
double turnover_time(const EulerModel& model, const SpectralField& w);

struct RunResult {
  SolverState state;
  double dt = 0.0;
  double initial_distance = 0.0;
  double max_distance = 0.0;
  double energy_drift = 0.0;  // max |E(t) - E(0)| / E(0)
  double l2_drift = 0.0;      // relative
  double lp_drift = 0.0;      // relative
  double mean_drift = 0.0;    // absolute
  bool aborted = false;
  std::string abort_reason;
};

/// Evolves w0 to cfg.t_end, recording diagnostics at t = 0, every cadence
/// steps, and at the end. A CflViolation ends the run early with the trace
/// so far and aborted = true.
RunResult run_orbit_experiment(const EulerModel& model, const SpectralField& w0, const RunConfig& cfg);

/// w0 = v + perturbation, distances to the orbit of v.
RunResult run_stability_experiment(const EulerModel& model, const VElement& v, const SpectralField& perturbation,
                                   RunConfig cfg);

/// w0 = v + 2 Omega + perturbation, distances to the orbit of v + 2 Omega.
RunResult run_rotating_orbit_experiment(const EulerModel& model, const VElement& v, double omega,
                                        const SpectralField& perturbation, RunConfig cfg);

/// Least-squares slope of the unwrapped rotation angle -beta*(t).
double fitted_rotation_rate(const std::vector<Diagnostic>& trace);

}  // namespace disklab
