#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "disklab/spectral.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

/// Direct pointwise evaluation of a spectral field, independent of Transform.
inline double evaluate(const disklab::SpectralField& f, double r, double theta) {
  const auto& b = f.basis();
  double v = f.mean_coefficient() + f.lift() * r * r;
  for (int k = 1; k <= b.k_radial(); ++k) v += f.coeff(0, k).real() * b.radial(0, k, r);
  for (int n = 1; n <= b.n_modes(); ++n)
    for (int k = 1; k <= b.k_radial(); ++k) {
      const std::complex<double> c = f.coeff(n, k);
      if (c == 0.0) continue;
      v += 2.0 * (c * std::polar(1.0, n * theta)).real() * b.radial(n, k, r);
    }
  return v;
}

/// Relative L2 difference of two sampled arrays under the grid measure.
template <class A, class B>
double relative_l2(const A& a, const B& b, const disklab::DiskGrid& g) {
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double d = a[c] - b[c];
    num += d * d * g.cell_measure(c);
    den += b[c] * b[c] * g.cell_measure(c);
  }
  return std::sqrt(num / den);
}

}  // namespace testing
