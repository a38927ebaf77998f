#include "disklab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "disklab/quadrature.hpp"

namespace disklab {

DiskGrid::DiskGrid(int n_radial, int n_azimuthal, RadialRule rule)
    : n_radial_(n_radial), n_azimuthal_(n_azimuthal), rule_(rule) {
  if (n_radial < 1 || n_azimuthal < 1) throw std::invalid_argument("DiskGrid: resolution must be positive");
  radii_.resize(n_radial);
  weights_.resize(n_radial);
  if (rule == RadialRule::GaussLegendre) {
    auto gl = gauss_legendre(n_radial, 0.0, 1.0);
    radii_ = std::move(gl.nodes);
    weights_ = std::move(gl.weights);
  } else {
    // s = r^2 on uniform midpoints; r dr = ds / 2.
    for (int i = 0; i < n_radial; ++i) {
      const double s = (i + 0.5) / n_radial;
      radii_[i] = std::sqrt(s);
      weights_[i] = 1.0 / (2.0 * n_radial * radii_[i]);
    }
  }
  angles_.resize(n_azimuthal);
  for (int m = 0; m < n_azimuthal; ++m) angles_[m] = 2.0 * std::numbers::pi * m / n_azimuthal;
  ring_measure_.resize(n_radial);
  const double dtheta = 2.0 * std::numbers::pi / n_azimuthal;
  for (int i = 0; i < n_radial; ++i) ring_measure_[i] = radii_[i] * weights_[i] * dtheta;
}

GridPtr make_grid(int n_radial, int n_azimuthal, RadialRule rule) {
  return std::make_shared<const DiskGrid>(n_radial, n_azimuthal, rule);
}

GridField::GridField(GridPtr grid, double fill) : grid_(std::move(grid)), values_(grid_->size(), fill) {}

GridField::GridField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw std::invalid_argument("GridField: value count does not match grid");
}

GridField GridField::shifted(int shift) const {
  GridField out(grid_);
  const int nt = grid_->n_azimuthal();
  const int s = ((shift % nt) + nt) % nt;
  for (int i = 0; i < grid_->n_radial(); ++i)
    for (int m = 0; m < nt; ++m) out(i, m) = (*this)(i, (m + s) % nt);
  return out;
}

namespace {
void require_same_grid(const GridField& a, const GridField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("GridField: grids differ");
}
}  // namespace

GridField& GridField::operator+=(const GridField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridField& GridField::operator+=(double c) {
  for (double& v : values_) v += c;
  return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(double s, GridField a) { return a *= s; }

double abs_pow(double x, double p) {
  const double a = std::abs(x);
  if (p == 2.0) return a * a;
  if (p == 1.0) return a;
  if (p == 1.5) return a * std::sqrt(a);
  if (p == 3.0) return a * a * a;
  if (p == 4.0) return (a * a) * (a * a);
  return std::pow(a, p);
}

double lp_norm(const GridField& g, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const auto& grid = g.grid();
  double total = 0.0;
  for (int i = 0; i < grid.n_radial(); ++i) {
    double ring = 0.0;
    for (int m = 0; m < grid.n_azimuthal(); ++m) ring += abs_pow(g(i, m), p);
    total += ring * grid.ring_cell_measure(i);
  }
  return std::pow(total, 1.0 / p);
}

double inner_product(const GridField& a, const GridField& b) {
  require_same_grid(a, b);
  const auto& grid = a.grid();
  double total = 0.0;
  for (int i = 0; i < grid.n_radial(); ++i) {
    double ring = 0.0;
    for (int m = 0; m < grid.n_azimuthal(); ++m) ring += a(i, m) * b(i, m);
    total += ring * grid.ring_cell_measure(i);
  }
  return total;
}

double mean_value(const GridField& g) {
  const auto& grid = g.grid();
  double total = 0.0;
  for (int i = 0; i < grid.n_radial(); ++i) {
    double ring = 0.0;
    for (int m = 0; m < grid.n_azimuthal(); ++m) ring += g(i, m);
    total += ring * grid.ring_cell_measure(i);
  }
  return total / std::numbers::pi;
}

std::vector<std::size_t> descending_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

DistributionProfile distribution_profile(const GridField& g) {
  const auto order = descending_order(g.values());
  DistributionProfile profile;
  double cumulative = 0.0;
  for (std::size_t idx : order) {
    cumulative += g.grid().cell_measure(idx);
    const double v = g.values()[idx];
    if (!profile.steps.empty() && profile.steps.back().first == v)
      profile.steps.back().second = cumulative;
    else
      profile.steps.emplace_back(v, cumulative);
  }
  return profile;
}

double DistributionProfile::value_at(double m) const {
  auto it = std::lower_bound(steps.begin(), steps.end(), m,
                             [](const std::pair<double, double>& s, double x) { return s.second < x; });
  if (it == steps.end()) return steps.back().first;
  return it->first;
}

double profile_distance(const DistributionProfile& a, const DistributionProfile& b) {
  double worst = 0.0;
  for (int s = 0; s < kProfileSamples; ++s) {
    const double m = (s + 0.5) * std::numbers::pi / kProfileSamples;
    worst = std::max(worst, std::abs(a.value_at(m) - b.value_at(m)));
  }
  return worst;
}

bool equimeasurable(const DistributionProfile& a, const DistributionProfile& b, double relative_tolerance) {
  const double range = a.max_value() - a.min_value();
  const double scale = range > 0.0 ? range : std::max(1.0, std::abs(a.max_value()));
  return profile_distance(a, b) <= relative_tolerance * scale;
}

}  // namespace disklab
