#pragma once

#include <optional>
#include <vector>

#include "disklab/grid.hpp"
#include "disklab/spectral.hpp"

namespace disklab {

/// a J_0(j r) + b J_1(j r) cos(theta + beta) with j = j_{1,1}, b >= 0,
/// beta in [0, 2 pi).
struct VElement {
  double a = 0.0;
  double b = 0.0;
  double beta = 0.0;
};

/// Normal form: negative b flips sign and shifts beta by pi; beta wrapped.
VElement normalize(VElement v);

/// Coefficients of v. J_0(j r) is the radial mode (0, 1) of the basis and
/// the dipole sits on (1, 1) with c = (b/2) e^{i beta}.
SpectralField make_v_element(const VElement& v, const BasisPtr& basis);
SpectralField make_v_element(double a, double b, double beta, const BasisPtr& basis);

/// a J_0(j r) + b J_1(j r) cos(theta + beta), evaluated pointwise.
double v_element_value(const VElement& v, double r, double theta);

struct SteadyReport {
  /// sup over grid of |w - j^2 G w - a J_0(j)|, a = coefficient of J_0(j r).
  double functional_residual = 0.0;
  /// ||tendency(w)||_2 / ||w||_2.
  double tendency_relative = 0.0;
  double tendency_norm = 0.0;
  bool steady(double tolerance = 1e-6) const { return tendency_relative <= tolerance; }
};

SteadyReport verify_steady(const SpectralField& w, const GridPtr& grid);

/// Radial sums of a reference field on a grid, reused across many angle
/// evaluations of the rotated reference.
class OrbitReference {
 public:
  OrbitReference(const SpectralField& ref, GridPtr grid);

  const DiskGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  bool has_angular_content() const { return !active_.empty(); }

  /// ref(r_i, theta_m + beta) at every node.
  void evaluate(double beta, std::span<double> out) const;

  /// Orders n >= 1 present in the reference and their radial sums
  /// sum_k c_{n,k} R_{n,k}(r_i).
  const std::vector<int>& active_orders() const { return active_; }
  cplx radial_sum(std::size_t active_index, int ring) const {
    return radial_[active_index * grid_->n_radial() + ring];
  }

 private:
  GridPtr grid_;
  std::vector<int> active_;            // n >= 1 with a nonzero radial sum
  std::vector<double> radial0_;        // [ring]
  std::vector<cplx> radial_;           // [active index][ring]
  std::vector<double> cos_, sin_;      // [active index][angle]
};

struct OrbitFit {
  double distance = 0.0;
  /// Minimizer of ||w - ref(., . + beta)||_p. For w = ref(., . - Omega t)
  /// this is -Omega t mod 2 pi.
  double beta = 0.0;
};

inline constexpr int kOrbitCoarseSamples = 256;
inline constexpr double kOrbitAngleTolerance = 1e-8;

/// min over beta of ||w - ref(., . + beta)||_p: 256-point scan, then golden
/// section on the bracketing pair of samples down to 1e-8 in beta. The scan
/// is skipped for references without angular content (beta = 0). For p = 2
/// the search runs on the equivalent inner product <w, ref(., . + beta)>.
OrbitFit orbital_distance(const GridField& w, const OrbitReference& ref, double p);
OrbitFit orbital_distance(const SpectralField& w, const SpectralField& ref, double p, const GridPtr& grid);
OrbitFit orbital_distance(const SpectralField& w, const VElement& ref, double p, const GridPtr& grid);

/// p_1 = pi J_0(j)^2, p_2 = p_1 / 2, q_2 = (2 pi / j^2) int_0^j J_1^3, q_1 = 4 q_2 / 3.
struct MomentCoefficients {
  double p1, p2, q1, q2;
};
const MomentCoefficients& moment_coefficients();

struct MomentPair {
  double r1 = 0.0;  // int w^2 / p_2 = 2 a^2 + b^2
  double r2 = 0.0;  // 3 int w^3 / q_2 = 4 a^3 + 3 a b^2
};

MomentPair moments(const GridField& w);

struct MomentSolution {
  double a = 0.0;
  double b = 0.0;
};

/// Solves 2x^2 + y^2 = r1, 4x^3 + 3xy^2 = r2 with y >= 0. Returns nullopt
/// when no solution exists (r1 < 0 or |r2| > sqrt(2) r1^{3/2}); throws
/// InconsistentMoments if the bisection root leaves residual above 1e-6.
std::optional<MomentSolution> solve_moment_system(const MomentPair& m);

struct MomentCoefficientReport {
  double p1_quadrature, p2_quadrature, q1_quadrature, q2_quadrature;
  double p1_closed_form_residual;  // |p1 - pi J_0(j)^2|
  double p2_closed_form_residual;  // |p2 - pi J_0(j)^2 / 2|
  double p_ratio_residual;         // |p1 - 2 p2|
  double q_ratio_residual;         // |q1 - 4 q2 / 3|
  double max_residual() const;
};

/// Evaluates p_1, p_2, q_1, q_2 from their defining integrals by adaptive
/// quadrature and compares against the closed forms.
MomentCoefficientReport verify_moment_coefficients();

}  // namespace disklab
