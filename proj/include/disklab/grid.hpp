#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace disklab {

/// How radial nodes are placed on (0, 1).
enum class RadialRule {
  /// Gauss-Legendre abscissae in r; the Jacobian r sits in the cell measure.
  GaussLegendre,
  /// Midpoint rule in r^2: every cell has measure pi / (N_r N_theta). Used
  /// where grid-level rearrangements must be exact permutations.
  EqualArea,
};

/// Polar collocation grid on the unit disk: radial nodes r_i with weights
/// w_i, uniform angles theta_m = 2 pi m / N_theta, cell measures
/// mu_{i,m} = r_i w_i (2 pi / N_theta). Cell measures sum to pi.
class DiskGrid {
 public:
  DiskGrid(int n_radial, int n_azimuthal, RadialRule rule = RadialRule::GaussLegendre);

  int n_radial() const { return n_radial_; }
  int n_azimuthal() const { return n_azimuthal_; }
  std::size_t size() const { return static_cast<std::size_t>(n_radial_) * n_azimuthal_; }
  RadialRule rule() const { return rule_; }

  std::span<const double> radii() const { return radii_; }
  std::span<const double> radial_weights() const { return weights_; }
  std::span<const double> angles() const { return angles_; }

  /// r_i w_i, the radial part of the cell measure.
  double radial_measure(int i) const { return radii_[i] * weights_[i]; }
  /// Measure of any cell on ring i.
  double ring_cell_measure(int i) const { return ring_measure_[i]; }
  double cell_measure(std::size_t flat) const { return ring_measure_[flat / n_azimuthal_]; }

  std::size_t index(int i, int m) const { return static_cast<std::size_t>(i) * n_azimuthal_ + m; }

  bool operator==(const DiskGrid& other) const {
    return n_radial_ == other.n_radial_ && n_azimuthal_ == other.n_azimuthal_ && rule_ == other.rule_;
  }

 private:
  int n_radial_;
  int n_azimuthal_;
  RadialRule rule_;
  std::vector<double> radii_;
  std::vector<double> weights_;
  std::vector<double> angles_;
  std::vector<double> ring_measure_;
};

using GridPtr = std::shared_ptr<const DiskGrid>;

GridPtr make_grid(int n_radial, int n_azimuthal, RadialRule rule = RadialRule::GaussLegendre);

/// Real scalar field sampled at the nodes of a DiskGrid, row-major (ring, angle).
class GridField {
 public:
  GridField() = default;
  explicit GridField(GridPtr grid, double fill = 0.0);
  GridField(GridPtr grid, std::vector<double> values);

  /// Samples f(r, theta) at every node.
  template <class F>
  static GridField sample(GridPtr grid, F&& f) {
    GridField out(grid);
    const auto r = grid->radii();
    const auto t = grid->angles();
    for (int i = 0; i < grid->n_radial(); ++i)
      for (int m = 0; m < grid->n_azimuthal(); ++m) out.values_[grid->index(i, m)] = f(r[i], t[m]);
    return out;
  }

  const DiskGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator()(int i, int m) const { return values_[grid_->index(i, m)]; }
  double& operator()(int i, int m) { return values_[grid_->index(i, m)]; }
  std::size_t size() const { return values_.size(); }

  /// Field rotated by whole azimuthal cells: out(i, m) = in(i, m + shift).
  GridField shifted(int shift) const;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double s);
  GridField& operator+=(double c);

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(double s, GridField a);

/// (sum |v|^p mu)^(1/p). Throws std::invalid_argument for p < 1.
double lp_norm(const GridField& g, double p);

/// sum v mu / pi.
double mean_value(const GridField& g);

/// sum a b mu.
double inner_product(const GridField& a, const GridField& b);

/// |x|^p with fast paths for p in {1, 1.5, 2, 3, 4}.
double abs_pow(double x, double p);

/// Non-increasing values with cumulative measure rising to pi. Equal values
/// are merged into a single step.
struct DistributionProfile {
  std::vector<std::pair<double, double>> steps;  // (value, cumulative measure)

  double max_value() const { return steps.front().first; }
  double min_value() const { return steps.back().first; }
  /// Value at cumulative measure m in [0, pi] (right-continuous step lookup).
  double value_at(double m) const;
};

/// Cells sorted by value descending (stable in flattened cell index).
DistributionProfile distribution_profile(const GridField& g);

/// Flattened cell indices in descending value order, ties by index.
std::vector<std::size_t> descending_order(std::span<const double> values);

inline constexpr int kProfileSamples = 1000;
inline constexpr double kEquimeasurableTolerance = 1e-6;

/// Largest value difference between the two profiles resampled at 1000
/// common cumulative-measure points.
double profile_distance(const DistributionProfile& a, const DistributionProfile& b);

/// profile_distance <= relative_tolerance * (value range of a).
bool equimeasurable(const DistributionProfile& a, const DistributionProfile& b,
                    double relative_tolerance = kEquimeasurableTolerance);

}  // namespace disklab
