#include "disklab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "disklab/error.hpp"

namespace disklab {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Ascending order: the i-th root from the top is the largest.
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.nodes[i] = mid - half * x;
    rule.weights[n - 1 - i] = half * w;
    rule.weights[i] = half * w;
  }
  return rule;
}

namespace {

double integrate_panel(const std::function<double(double)>& f, double a, double b,
                       double tolerance, int depth, int max_depth) {
  double error = 0.0;
  const double estimate =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &error);
  if (error <= tolerance || std::abs(b - a) < 1e-15) return estimate;
  if (depth >= max_depth) {
    std::ostringstream msg;
    msg << "integrate: tolerance " << tolerance << " unreachable on [" << a << ", " << b
        << "] at depth " << depth << " (error estimate " << error << ")";
    throw QuadratureError(msg.str());
  }
  const double mid = 0.5 * (a + b);
  return integrate_panel(f, a, mid, 0.5 * tolerance, depth + 1, max_depth) +
         integrate_panel(f, mid, b, 0.5 * tolerance, depth + 1, max_depth);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const AdaptiveOptions& options) {
  if (a == b) return 0.0;
  return integrate_panel(f, a, b, options.absolute_tolerance, 0, options.max_depth);
}

}  // namespace disklab
