#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "disklab/bessel.hpp"
#include "disklab/grid.hpp"

namespace disklab {

using cplx = std::complex<double>;

/// Fourier-Bessel basis on the unit disk.
///
/// A field is sum_{|n|<=N} sum_k c_{n,k} e^{i n theta} R_{n,k}(r) + q r^2 with
/// c_{-n,k} = conj(c_{n,k}). Radial functions:
///   n != 0, k = 1..K : J_|n|(j_{|n|,k} r), zero on the boundary;
///   n  = 0, k = 1..K : J_0(j_{1,k} r), zero mean and zero normal derivative;
///   n  = 0, k = 0    : the constant 1.
/// The last term (the r^2 lift) only appears in stream functions of fields
/// with nonzero mean. The n = 0 family contains J_0(j_{1,1} r) exactly.
class SpectralBasis {
 public:
  SpectralBasis(int n_modes, int k_radial);

  int n_modes() const { return n_modes_; }
  int k_radial() const { return k_radial_; }
  const ZeroTable& zeros() const { return *zeros_; }

  bool valid(int n, int k) const;
  /// lambda with -Laplacian(basis) = lambda^2 basis; 0 for the constant.
  double wavenumber(int n, int k) const;
  /// int_0^1 R_{n,k}(r)^2 r dr.
  double norm_squared(int n, int k) const;

  double radial(int n, int k, double r) const;
  double radial_derivative(int n, int k, double r) const;
  /// R_{n,k}(r) / r for n != 0 (smooth: R ~ r^|n| near 0); 0 for n = 0.
  double radial_over_r(int n, int k, double r) const;

  /// Largest wavenumber among modes with |n| <= n_max, k <= k_max.
  double max_wavenumber(int n_max, int k_max) const;

  std::size_t slot(int n, int k) const { return static_cast<std::size_t>(n) * (k_radial_ + 1) + k; }
  std::size_t slot_count() const { return static_cast<std::size_t>(n_modes_ + 1) * (k_radial_ + 1); }

 private:
  int n_modes_;
  int k_radial_;
  std::shared_ptr<const ZeroTable> zeros_;
  std::vector<double> wavenumber_;
  std::vector<double> norm_;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

/// Cached basis for (N, K).
BasisPtr make_basis(int n_modes, int k_radial);

/// Spectral and collocation resolution used together.
struct Resolution {
  int n_modes = 16;
  int k_radial = 32;
  // 96 Gauss-Legendre nodes integrate products of two K = 32 modes exactly
  // in double precision; 64 leaves round-trip errors near 3e-2.
  int n_radial = 96;
  int n_azimuthal = 128;
};

/// Shared basis and Gauss-Legendre grid at the default Resolution.
BasisPtr default_basis();
GridPtr default_grid();

/// Coefficients of a real field in a SpectralBasis. Only n >= 0 is stored;
/// negative n is the complex conjugate, so the reality constraint holds by
/// construction.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(BasisPtr basis);

  const SpectralBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }

  cplx coeff(int n, int k) const;
  /// Sets c_{n,k} (and implicitly c_{-n,k}); n = 0 keeps the real part only.
  void set(int n, int k, cplx value);
  void add(int n, int k, cplx value);

  double mean_coefficient() const { return coeffs_[0].real(); }
  double lift() const { return lift_; }
  void set_lift(double q) { lift_ = q; }

  std::span<const cplx> raw() const { return coeffs_; }
  std::span<cplx> raw() { return coeffs_; }

  /// f(r, theta + beta): c_{n,k} -> c_{n,k} e^{i n beta}.
  SpectralField rotated(double beta) const;
  /// Zero all modes with |n| > n_max or k > k_max.
  SpectralField truncated(int n_max, int k_max) const;
  /// Copy without the constant mode and the lift.
  SpectralField without_mean() const;
  bool has_angular_content() const;
  /// Largest n and k carrying a nonzero coefficient (0 if none).
  int highest_n() const;
  int highest_k() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

 private:
  BasisPtr basis_;
  std::vector<cplx> coeffs_;
  double lift_ = 0.0;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// L2 inner product on the disk of two spectral fields (lift must be zero).
double spectral_inner_product(const SpectralField& a, const SpectralField& b);
/// ||f||_2 from coefficients (Parseval).
double spectral_l2_norm(const SpectralField& f);
/// sup-norm distance between coefficient vectors.
double coefficient_distance(const SpectralField& a, const SpectralField& b);

enum class Exec { Serial, Parallel };

/// Which radial table a synthesis reads.
enum class RadialPart { Value, Derivative, OverR };

/// Transform tables binding one basis to one grid.
///
/// to_grid evaluates the expansion directly; from_grid does a discrete
/// Fourier analysis per ring followed by the weighted radial projection
/// <g, R_{n,k}> / ||R_{n,k}||^2. Both have a serial reference kernel and an
/// OpenMP kernel that produce bitwise identical results: threads split over
/// rings or modes and every output keeps its serial summation order.
class Transform {
 public:
  /// Throws ResolutionError unless N_theta >= 2N + 2 and N_r >= K + 2.
  Transform(BasisPtr basis, GridPtr grid);

  /// Cached instance for (basis, grid); grids are matched by value and the
  /// 16 most recent pairs are kept alive.
  static std::shared_ptr<const Transform> get(const BasisPtr& basis, const GridPtr& grid);

  const SpectralBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const GridPtr& grid_ptr() const { return grid_; }

  GridField to_grid(const SpectralField& f, Exec exec = Exec::Parallel) const;
  SpectralField from_grid(const GridField& g, Exec exec = Exec::Parallel) const;

  /// Raw synthesis: out = sum over |n| <= n_max, k <= k_max of the chosen
  /// radial table times e^{i n theta}, with c_{n,k} multiplied by i n when
  /// theta_derivative is set. Lift contributes q r^2 (Value) or 2 q r
  /// (Derivative).
  void synthesize(std::span<const cplx> coeffs, double lift, RadialPart part, bool theta_derivative,
                  int n_max, int k_max, std::span<double> out, Exec exec) const;
  /// Raw analysis into coeffs for |n| <= n_max, k <= k_max (others zeroed).
  void analyze(std::span<const double> values, int n_max, int k_max, std::span<cplx> coeffs, Exec exec) const;

 private:
  double table(RadialPart part, int n, int k, int i) const;

  BasisPtr basis_;
  GridPtr grid_;
  int n_r_, n_t_, n_modes_, k_radial_;
  // [part][slot][ring]
  std::vector<double> value_, derivative_, over_r_;
  // [n][m]
  std::vector<double> cos_, sin_;
};

/// Convenience wrappers over the cached Transform.
GridField to_grid(const SpectralField& f, const GridPtr& grid);
SpectralField from_grid(const GridField& g, const BasisPtr& basis);

}  // namespace disklab
