#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "disklab/grid.hpp"
#include "disklab/spectral.hpp"
#include "disklab/steady.hpp"

namespace disklab {

struct EigenOptions {
  int quadrature_nodes = 256;
  int max_iterations = 500;
  double tolerance = 1e-14;
  std::uint64_t seed = 1;
};

struct V1Result {
  /// min of int |grad u|^2 over unit-norm, zero-mean u constant on the boundary.
  double m = 0.0;
  /// Smallest eigenvalue per azimuthal block n = 0..N.
  std::vector<double> block_minima;
  GridField minimizer;
  /// Boundary value of the minimizer (the free constant c).
  double boundary_constant = 0.0;
  int iterations = 0;
};

/// Per azimuthal order n, assembles stiffness and mass matrices by
/// Gauss-Legendre quadrature on the constraint space and takes the smallest
/// generalized eigenvalue by inverse iteration. For n = 0 the space is
/// J_0(j_{0,k} r) - mean plus the lift r^2 - 1/2; for n >= 1 it is the
/// Dirichlet modes. The minimizer combines every block attaining m (to 1e-8
/// relative) with random weights and lives on `grid`.
V1Result solve_v1(const BasisPtr& basis, const GridPtr& grid, const EigenOptions& options = {});

struct PowerOptions {
  int max_iterations = 2000;
  double tolerance = 1e-12;
  /// The quotient settles quadratically faster than the vector, so the
  /// iteration also waits for ||P G P v - M v|| / M to fall below this.
  double residual_tolerance = 1e-9;
  std::uint64_t seed = 1;
};

struct V2Result {
  /// max of <v, G v> over unit-norm, zero-mean v.
  double M = 0.0;
  SpectralField maximizer;
  int iterations = 0;
};

/// Power iteration of P G P (P removes the mean) from a random seed, until
/// successive Rayleigh quotients differ by at most `tolerance` and the
/// eigen-residual is at most `residual_tolerance`. Throws ConvergenceError
/// after max_iterations.
V2Result solve_v2(const BasisPtr& basis, const PowerOptions& options = {});

/// L2 distance from u to its least-squares fit by J_0(j r), J_1(j r) cos,
/// J_1(j r) sin on u's grid.
double v_projection_residual(const GridField& u);

/// int |grad f|^2 by grid quadrature of exact basis derivatives.
double dirichlet_integral(const SpectralField& f, const GridPtr& grid);

struct AscentState {
  GridField iterate;
  double energy = 0.0;
  int iteration = 0;
  DistributionProfile profile;
};

/// Gradient of the discrete energy E_h(v) = E(from_grid(v)) at v: the
/// in-span part of G(from_grid(v)), evaluated on v's grid.
GridField ascent_key(const GridField& v, const BasisPtr& basis);

/// E_h(v).
double grid_energy(const GridField& v, const BasisPtr& basis);

/// Starts an ascent at `seed`, fixing the profile to `target`'s.
AscentState make_ascent_state(const GridField& seed, const DistributionProfile& target, const BasisPtr& basis);

/// Stable-sorts cells by the key descending and assigns the profile's
/// values by cumulative measure (at each cell's centre of mass). On an
/// equal-area grid this is an exact permutation of the profile's cells.
/// Throws TransplantError if the energy drops by more than 1e-12.
AscentState burton_step(const AscentState& s, const DistributionProfile& target, const BasisPtr& basis);

struct BurtonResult {
  GridField final_iterate;
  std::vector<double> energies;
  std::vector<double> distances;  // L2 orbital distance per iteration
  bool converged = false;
  int iterations = 0;
  double final_energy = 0.0;
  double final_distance = 0.0;
  bool profile_preserved = true;
};

inline constexpr double kAscentGainTolerance = 1e-12;
inline constexpr int kAscentStallSteps = 5;

/// Iterates burton_step from `seed` until 5 consecutive gains are at most
/// 1e-12 or max_iters steps ran.
BurtonResult burton_maximize(const VElement& v, const GridField& seed, int max_iters, const BasisPtr& basis);

/// CSV with columns iteration, energy, orbital_distance.
void write_ascent_trace(std::ostream& os, const BurtonResult& r);

}  // namespace disklab
