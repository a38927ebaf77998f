#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <utility>

namespace disklab {

/// Highest Bessel order accepted by the public evaluators.
inline constexpr int kMaxBesselOrder = 64;

/// J_n(s), Bessel function of the first kind.
///
/// Power series for |s| <= series_cutoff(n), Miller backward recurrence
/// normalized by J_0 + 2 sum J_2k beyond it. Absolute error <= 1e-13 on
/// |s| <= 50. Throws UnsupportedOrder for n < 0 or n > kMaxBesselOrder.
double bessel_j(int n, double s);

/// J_n'(s): -J_1 for n = 0, (J_{n-1} - J_{n+1}) / 2 otherwise.
double bessel_j_prime(int n, double s);

/// Largest |s| for which bessel_j uses the series at order n.
double series_cutoff(int n);

struct ZeroScanOptions {
  double step = 0.5;
  /// Search fails once the scan passes start + window.
  double window = 400.0;
  double newton_tolerance = 1e-13;
  int newton_max_iterations = 30;
};

struct BesselZero {
  double value = 0.0;
  /// Half-width of a verified sign-change bracket around value.
  double error_bound = 0.0;
};

/// k-th positive zero j_{n,k} of J_n (k >= 1), accurate to 1e-12.
/// Throws ScanWindowError if the scan leaves its window.
BesselZero bessel_zero(int n, int k, const ZeroScanOptions& options = {});

/// Immutable cache of Bessel zeros j_{n,k} for n <= max_order, k <= max_index.
class ZeroTable {
 public:
  ZeroTable() = default;
  ZeroTable(int max_order, int max_index, const ZeroScanOptions& options = {});

  double zero(int n, int k) const;
  const BesselZero& entry(int n, int k) const;
  bool contains(int n, int k) const;

  int max_order() const { return max_order_; }
  int max_index() const { return max_index_; }
  const std::map<std::pair<int, int>, BesselZero>& entries() const { return entries_; }

  /// CSV with header n,k,zero,error_bound; reals printed with 17 significant digits.
  void write_csv(std::ostream& os) const;

 private:
  int max_order_ = -1;
  int max_index_ = 0;
  std::map<std::pair<int, int>, BesselZero> entries_;
};

/// j = j_{1,1}, the first positive zero of J_1.
double first_dipole_zero();

/// Residuals of the Bessel recurrence, orthogonality and integral identities.
struct IdentityReport {
  double apd1 = 0.0;  // int_0^s J0^2 t dt = s^2 (J0^2 + J1^2) / 2
  double apd2 = 0.0;  // int_0^1 J1^2(j s) s ds = J0^2(j) / 2
  double apd3 = 0.0;  // int_0^s J0^3 t dt = s J0^2 J1 + 2 int_0^s J0 J1^2 t dt
  double apd4 = 0.0;  // int_0^s J0 J1^2 t dt = s J1^3 / 3 + 2/3 int_0^s J1^3 dt
  double j2_equals_minus_j0 = 0.0;  // J2(j) + J0(j)
  double normalization = 0.0;       // int_0^1 J1^2(j s) s ds vs J2^2(j) / 2
  double orthogonality = 0.0;       // max |int_0^1 J_n(a s) J_n(b s) s ds|, a != b
  double derivative_recurrence = 0.0;  // (s J1)' - s J0 by central differences
  double three_term = 0.0;             // s (J_n + J_{n+2}) - 2 (n+1) J_{n+1}

  double max_residual() const;
};

/// Evaluates every identity at each sample point. Integrals use adaptive
/// Gauss-Kronrod with absolute tolerance 1e-11; throws QuadratureError if
/// that tolerance is out of reach.
IdentityReport verify_identity_suite(std::span<const double> s_samples);

}  // namespace disklab
