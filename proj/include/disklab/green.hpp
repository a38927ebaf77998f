#pragma once

#include "disklab/grid.hpp"
#include "disklab/spectral.hpp"

namespace disklab {

/// Inverse of -Laplacian with zero Dirichlet data, diagonal in the basis.
///
/// Dirichlet modes scale by 1/lambda^2. A Neumann radial mode J_0(lambda r)
/// maps to (J_0(lambda r) - J_0(lambda)) / lambda^2, so a constant lands in
/// the mean slot. The constant 1 maps to (1 - r^2) / 4, stored as mean 1/4
/// and lift -1/4.
class GreenOperator {
 public:
  explicit GreenOperator(BasisPtr basis);

  const SpectralBasis& basis() const { return *basis_; }
  /// 1 / lambda_{n,k}^2 for k >= 1.
  double multiplier(int n, int k) const;

  /// Throws std::invalid_argument if w carries an r^2 lift.
  SpectralField apply(const SpectralField& w) const;

 private:
  BasisPtr basis_;
};

SpectralField apply_green(const SpectralField& w);

/// Spectral -Laplacian; exact left inverse of apply_green.
SpectralField negative_laplacian(const SpectralField& psi);

/// <a, G b> in closed form. Both fields must be lift-free.
double green_form(const SpectralField& a, const SpectralField& b);

/// E(w) = 1/2 <w, G w>.
double energy(const SpectralField& w);

/// Direct quadrature of the Dirichlet Green kernel
///   G(x, y) = -ln|x - y| / 2pi + ln| x/|x| - |x| y | / 2pi
/// over all cells. The singular self-cell term is replaced by the exact
/// integral of -ln|y| / 2pi over a disk with the cell's measure, plus the
/// regular part evaluated at y = x. Costs O(N_r^2 N_theta^2).
GridField apply_green_kernel(const GridField& w, Exec exec = Exec::Parallel);

}  // namespace disklab
