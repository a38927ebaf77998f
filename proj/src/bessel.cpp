#include "disklab/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include "disklab/error.hpp"
#include "disklab/quadrature.hpp"

namespace disklab {

namespace {

void check_order(int n) {
  if (n < 0 || n > kMaxBesselOrder) {
    std::ostringstream msg;
    msg << "bessel: unsupported order " << n << " (supported 0.." << kMaxBesselOrder << ")";
    throw UnsupportedOrder(msg.str());
  }
}

double series(int n, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= half / i;
  double sum = term;
  const double h2 = half * half;
  for (int k = 1; k < 500; ++k) {
    term *= -h2 / (static_cast<double>(k) * (k + n));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && k > half) break;
  }
  return sum;
}

// Miller's algorithm: recur downward from a high order seed and normalize with
// 1 = J_0 + 2 sum_{k>=1} J_2k. Valid for x > 0.
double miller(int n, double x) {
  const double big = 1e250;
  const int top = static_cast<int>(std::max<double>(n, x)) + 30 +
                  static_cast<int>(std::sqrt(60.0 * std::max<double>(n, x)));
  const int m = 2 * ((top + 1) / 2);
  const double two_over_x = 2.0 / x;
  double j_next = 0.0;  // J_{k+1}
  double j_cur = 1e-300;  // J_k, arbitrary start
  double norm = 2.0 * j_cur;  // m is even
  double result = 0.0;
  for (int k = m; k >= 1; --k) {
    const double j_prev = k * two_over_x * j_cur - j_next;  // J_{k-1}
    j_next = j_cur;
    j_cur = j_prev;
    if (std::abs(j_cur) > big) {
      j_cur /= big;
      j_next /= big;
      norm /= big;
      result /= big;
    }
    if ((k - 1) != 0 && (k - 1) % 2 == 0) norm += 2.0 * j_cur;
    if (k - 1 == n) result = j_cur;
  }
  norm += j_cur;  // J_0
  return result / norm;
}

double bessel_j_unchecked(int n, double s) {
  double sign = 1.0;
  if (s < 0.0) {
    s = -s;
    if (n % 2 == 1) sign = -1.0;
  }
  if (s == 0.0) return n == 0 ? 1.0 : 0.0;
  if (s <= series_cutoff(n)) return sign * series(n, s);
  return sign * miller(n, s);
}

}  // namespace

double series_cutoff(int n) {
  // Largest series term grows like exp(s) / (2 pi s); past this point the
  // alternating sum starts shedding digits below 1e-14.
  return 3.0 + 0.5 * n;
}

double bessel_j(int n, double s) {
  check_order(n);
  return bessel_j_unchecked(n, s);
}

double bessel_j_prime(int n, double s) {
  check_order(n);
  if (n == 0) return -bessel_j_unchecked(1, s);
  return 0.5 * (bessel_j_unchecked(n - 1, s) - bessel_j_unchecked(n + 1, s));
}

BesselZero bessel_zero(int n, int k, const ZeroScanOptions& options) {
  check_order(n);
  if (k < 1) throw std::invalid_argument("bessel_zero: index k must be >= 1");
  const double start = std::max(n, 1);
  const double stop = start + options.window;
  double lo = start;
  double f_lo = bessel_j_unchecked(n, lo);
  int found = 0;
  double hi = lo;
  double f_hi = f_lo;
  while (true) {
    hi = lo + options.step;
    if (hi > stop) {
      std::ostringstream msg;
      msg << "bessel_zero: scan window [" << start << ", " << stop << "] exhausted after " << found
          << " zeros of J_" << n << " (wanted k=" << k << ")";
      throw ScanWindowError(msg.str());
    }
    f_hi = bessel_j_unchecked(n, hi);
    if (f_lo == 0.0 || f_lo * f_hi < 0.0) {
      if (++found == k) break;
    }
    lo = hi;
    f_lo = f_hi;
  }
  if (f_lo == 0.0) return {lo, 0.0};

  // Bisect to a narrow bracket, then polish with Newton inside it.
  double a = lo, b = hi, fa = f_lo;
  while (b - a > 1e-6) {
    const double mid = 0.5 * (a + b);
    const double fm = bessel_j_unchecked(n, mid);
    if (fm == 0.0) {
      a = b = mid;
      break;
    }
    if ((fa < 0.0) == (fm < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  double z = 0.5 * (a + b);
  bool converged = a == b;
  for (int it = 0; it < options.newton_max_iterations && !converged; ++it) {
    const double fz = bessel_j_unchecked(n, z);
    const double dz = fz / bessel_j_prime(n, z);
    const double next = z - dz;
    if (!(next > a && next < b)) break;  // stagnation or escape: fall back
    z = next;
    converged = std::abs(dz) <= options.newton_tolerance;
  }
  if (!converged) {
    while (b - a > 4.0 * std::numeric_limits<double>::epsilon() * b) {
      const double mid = 0.5 * (a + b);
      const double fm = bessel_j_unchecked(n, mid);
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if ((fa < 0.0) == (fm < 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    z = 0.5 * (a + b);
  }
  // Certify with the narrowest sign-change bracket we can confirm.
  double bound = 4.0 * std::numeric_limits<double>::epsilon() * z;
  for (int i = 0; i < 12; ++i) {
    const double fl = bessel_j_unchecked(n, z - bound);
    const double fr = bessel_j_unchecked(n, z + bound);
    if (fl * fr <= 0.0) break;
    bound *= 4.0;
  }
  return {z, bound};
}

ZeroTable::ZeroTable(int max_order, int max_index, const ZeroScanOptions& options)
    : max_order_(max_order), max_index_(max_index) {
  check_order(max_order);
  for (int n = 0; n <= max_order; ++n)
    for (int k = 1; k <= max_index; ++k) entries_.emplace(std::pair{n, k}, bessel_zero(n, k, options));
}

bool ZeroTable::contains(int n, int k) const { return entries_.count({n, k}) != 0; }

const BesselZero& ZeroTable::entry(int n, int k) const {
  auto it = entries_.find({n, k});
  if (it == entries_.end()) {
    std::ostringstream msg;
    msg << "ZeroTable: no entry for (n=" << n << ", k=" << k << ")";
    throw std::out_of_range(msg.str());
  }
  return it->second;
}

double ZeroTable::zero(int n, int k) const { return entry(n, k).value; }

void ZeroTable::write_csv(std::ostream& os) const {
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << "n,k,zero,error_bound\n" << std::setprecision(17);
  for (const auto& [key, z] : entries_) os << key.first << ',' << key.second << ',' << z.value << ',' << z.error_bound << '\n';
  os.flags(flags);
  os.precision(precision);
}

double first_dipole_zero() {
  static const double j = bessel_zero(1, 1).value;
  return j;
}

double IdentityReport::max_residual() const {
  return std::max({apd1, apd2, apd3, apd4, j2_equals_minus_j0, normalization, orthogonality,
                   derivative_recurrence, three_term});
}

IdentityReport verify_identity_suite(std::span<const double> s_samples) {
  const AdaptiveOptions quad{1e-11, 40};
  const double j = first_dipole_zero();
  auto J = [](int n, double t) { return bessel_j(n, t); };
  IdentityReport report;

  for (double s : s_samples) {
    const double j0 = J(0, s), j1 = J(1, s);
    const double lhs1 = integrate([&](double t) { return J(0, t) * J(0, t) * t; }, 0.0, s, quad);
    report.apd1 = std::max(report.apd1, std::abs(lhs1 - 0.5 * s * s * (j0 * j0 + j1 * j1)));

    const double i011 = integrate([&](double t) { return J(0, t) * J(1, t) * J(1, t) * t; }, 0.0, s, quad);
    const double lhs3 = integrate([&](double t) { return J(0, t) * J(0, t) * J(0, t) * t; }, 0.0, s, quad);
    report.apd3 = std::max(report.apd3, std::abs(lhs3 - (s * j0 * j0 * j1 + 2.0 * i011)));

    const double i111 = integrate([&](double t) { return J(1, t) * J(1, t) * J(1, t); }, 0.0, s, quad);
    report.apd4 = std::max(report.apd4, std::abs(i011 - (s * j1 * j1 * j1 / 3.0 + 2.0 * i111 / 3.0)));

    // (s J1)' = s J0 by central differences, step 1e-5. Dividing by the
    // representable spacing hi - lo instead of 2h removes the rounding of s +- h.
    if (s > 1e-4) {
      const double h = 1e-5;
      const double hi = s + h, lo = s - h;
      const double d = (hi * J(1, hi) - lo * J(1, lo)) / (hi - lo);
      report.derivative_recurrence = std::max(report.derivative_recurrence, std::abs(d - s * j0));
    }
    for (int n = 0; n <= 8; ++n) {
      const double r = s * (J(n, s) + J(n + 2, s)) - 2.0 * (n + 1) * J(n + 1, s);
      report.three_term = std::max(report.three_term, std::abs(r));
    }
  }

  const double lhs2 = integrate([&](double t) { return J(1, j * t) * J(1, j * t) * t; }, 0.0, 1.0, quad);
  const double j0j = J(0, j), j2j = J(2, j);
  report.apd2 = std::abs(lhs2 - 0.5 * j0j * j0j);
  report.normalization = std::abs(lhs2 - 0.5 * j2j * j2j);
  report.j2_equals_minus_j0 = std::abs(j2j + j0j);

  for (int n = 0; n <= 2; ++n) {
    for (int k = 1; k <= 4; ++k) {
      for (int l = k + 1; l <= 4; ++l) {
        const double a = bessel_zero(n, k).value, b = bessel_zero(n, l).value;
        const double v = integrate([&](double t) { return J(n, a * t) * J(n, b * t) * t; }, 0.0, 1.0, quad);
        report.orthogonality = std::max(report.orthogonality, std::abs(v));
      }
    }
  }
  return report;
}

}  // namespace disklab
