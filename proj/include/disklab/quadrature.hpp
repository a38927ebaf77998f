#pragma once

#include <functional>
#include <vector>

namespace disklab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to (a, b).
QuadratureRule gauss_legendre(int n, double a = 0.0, double b = 1.0);

struct AdaptiveOptions {
  double absolute_tolerance = 1e-11;
  int max_depth = 30;
};

/// Adaptive Gauss-Kronrod (7/15) integration to an absolute tolerance.
/// Panels are bisected until each panel's error estimate falls below its
/// share of the tolerance. Throws QuadratureError past max_depth.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const AdaptiveOptions& options = {});

}  // namespace disklab
