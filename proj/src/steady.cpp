#include "disklab/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "disklab/bessel.hpp"
#include "disklab/error.hpp"
#include "disklab/euler.hpp"
#include "disklab/green.hpp"
#include "disklab/quadrature.hpp"

namespace disklab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double beta) {
  beta = std::fmod(beta, kTwoPi);
  if (beta < 0.0) beta += kTwoPi;
  if (beta >= kTwoPi) beta = 0.0;
  return beta;
}
}  // namespace

VElement normalize(VElement v) {
  if (v.b < 0.0) {
    v.b = -v.b;
    v.beta += std::numbers::pi;
  }
  v.beta = wrap_angle(v.beta);
  return v;
}

SpectralField make_v_element(const VElement& v_in, const BasisPtr& basis) {
  const VElement v = normalize(v_in);
  SpectralField f(basis);
  f.set(0, 1, v.a);
  f.set(1, 1, 0.5 * v.b * std::polar(1.0, v.beta));
  return f;
}

SpectralField make_v_element(double a, double b, double beta, const BasisPtr& basis) {
  return make_v_element(VElement{a, b, beta}, basis);
}

double v_element_value(const VElement& v, double r, double theta) {
  const double j = first_dipole_zero();
  return v.a * bessel_j(0, j * r) + v.b * bessel_j(1, j * r) * std::cos(theta + v.beta);
}

SteadyReport verify_steady(const SpectralField& w, const GridPtr& grid) {
  SteadyReport rep;
  const double j = first_dipole_zero();
  const double a = w.coeff(0, 1).real();
  const GridField wg = to_grid(w, grid);
  const GridField pg = to_grid(apply_green(w), grid);
  const double shift = a * bessel_j(0, j);
  for (std::size_t c = 0; c < wg.size(); ++c)
    rep.functional_residual =
        std::max(rep.functional_residual, std::abs(wg.values()[c] - j * j * pg.values()[c] - shift));
  const EulerModel model(w.basis_ptr(), grid);
  rep.tendency_norm = spectral_l2_norm(model.tendency(w));
  const double norm = spectral_l2_norm(w);
  rep.tendency_relative = norm > 0.0 ? rep.tendency_norm / norm : rep.tendency_norm;
  return rep;
}

OrbitReference::OrbitReference(const SpectralField& ref, GridPtr grid) : grid_(std::move(grid)) {
  const auto& basis = ref.basis();
  const auto radii = grid_->radii();
  const int nr = grid_->n_radial();
  radial0_.assign(nr, 0.0);
  for (int i = 0; i < nr; ++i) {
    double v = ref.mean_coefficient() + ref.lift() * radii[i] * radii[i];
    for (int k = 1; k <= basis.k_radial(); ++k) {
      const double c = ref.coeff(0, k).real();
      if (c != 0.0) v += c * basis.radial(0, k, radii[i]);
    }
    radial0_[i] = v;
  }
  for (int n = 1; n <= basis.n_modes(); ++n) {
    std::vector<cplx> row(nr);
    bool any = false;
    for (int k = 1; k <= basis.k_radial(); ++k) {
      const cplx c = ref.coeff(n, k);
      if (c == cplx{}) continue;
      any = true;
      for (int i = 0; i < nr; ++i) row[i] += c * basis.radial(n, k, radii[i]);
    }
    if (!any) continue;
    active_.push_back(n);
    radial_.insert(radial_.end(), row.begin(), row.end());
    for (double t : grid_->angles()) {
      cos_.push_back(std::cos(n * t));
      sin_.push_back(std::sin(n * t));
    }
  }
}

void OrbitReference::evaluate(double beta, std::span<double> out) const {
  const int nr = grid_->n_radial(), nt = grid_->n_azimuthal();
  for (int i = 0; i < nr; ++i)
    for (int m = 0; m < nt; ++m) out[grid_->index(i, m)] = radial0_[i];
  for (std::size_t a = 0; a < active_.size(); ++a) {
    const int n = active_[a];
    const cplx phase = std::polar(1.0, n * beta);
    const double* cs = cos_.data() + a * nt;
    const double* sn = sin_.data() + a * nt;
    for (int i = 0; i < nr; ++i) {
      const cplx c = 2.0 * radial_[a * nr + i] * phase;
      double* row = out.data() + grid_->index(i, 0);
      for (int m = 0; m < nt; ++m) row[m] += c.real() * cs[m] - c.imag() * sn[m];
    }
  }
}

namespace {

class DistanceProbe {
 public:
  DistanceProbe(const GridField& w, const OrbitReference& ref, double p)
      : w_(w), ref_(ref), p_(p), buffer_(w.size()) {}

  double operator()(double beta) {
    ref_.evaluate(beta, buffer_);
    const auto& grid = w_.grid();
    const int nt = grid.n_azimuthal();
    double total = 0.0;
    for (int i = 0; i < grid.n_radial(); ++i) {
      double ring = 0.0;
      const double* wv = w_.values().data() + grid.index(i, 0);
      const double* rv = buffer_.data() + grid.index(i, 0);
      for (int m = 0; m < nt; ++m) ring += abs_pow(wv[m] - rv[m], p_);
      total += ring * grid.ring_cell_measure(i);
    }
    return total;
  }

  double to_norm(double s) const { return std::pow(s, 1.0 / p_); }

 private:
  const GridField& w_;
  const OrbitReference& ref_;
  double p_;
  std::vector<double> buffer_;
};

// For p = 2 the angle search only needs <w, ref(., . + beta)>, which is a
// short trigonometric sum once w's ring Fourier sums are formed. The final
// distance is still evaluated directly on the grid.
class InnerProductProbe {
 public:
  InnerProductProbe(const GridField& w, const OrbitReference& ref) : ref_(ref) {
    const auto& grid = w.grid();
    const int nr = grid.n_radial(), nt = grid.n_azimuthal();
    weights_.resize(ref.active_orders().size());
    for (std::size_t a = 0; a < weights_.size(); ++a) {
      const int n = ref.active_orders()[a];
      cplx total = 0.0;
      for (int i = 0; i < nr; ++i) {
        cplx f = 0.0;
        for (int m = 0; m < nt; ++m) f += w(i, m) * std::polar(1.0, n * grid.angles()[m]);
        total += grid.ring_cell_measure(i) * ref.radial_sum(a, i) * f;
      }
      weights_[a] = total;
    }
  }

  /// -<w, ref(., . + beta)> up to a beta-independent constant.
  double operator()(double beta) const {
    double total = 0.0;
    for (std::size_t a = 0; a < weights_.size(); ++a)
      total -= 2.0 * std::real(weights_[a] * std::polar(1.0, ref_.active_orders()[a] * beta));
    return total;
  }

 private:
  const OrbitReference& ref_;
  std::vector<cplx> weights_;
};

template <class Objective>
double minimize_angle(Objective&& f) {
  const double h = kTwoPi / kOrbitCoarseSamples;
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < kOrbitCoarseSamples; ++s) {
    const double v = f(s * h);
    if (v < best_value) {
      best_value = v;
      best = s;
    }
  }
  // Golden section on [beta_{s-1}, beta_{s+1}].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = (best - 1) * h, hi = (best + 1) * h;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > kOrbitAngleTolerance) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  const double beta = 0.5 * (lo + hi);
  return f(beta) <= best_value ? beta : best * h;
}

}  // namespace

OrbitFit orbital_distance(const GridField& w, const OrbitReference& ref, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("orbital_distance: p must lie in (1, inf)");
  if (!(w.grid() == ref.grid())) throw std::invalid_argument("orbital_distance: grids differ");
  DistanceProbe probe(w, ref, p);
  if (!ref.has_angular_content()) return {probe.to_norm(probe(0.0)), 0.0};
  const double beta = p == 2.0 ? minimize_angle(InnerProductProbe(w, ref)) : minimize_angle(probe);
  return {probe.to_norm(probe(beta)), wrap_angle(beta)};
}


OrbitFit orbital_distance(const SpectralField& w, const SpectralField& ref, double p, const GridPtr& grid) {
  return orbital_distance(to_grid(w, grid), OrbitReference(ref, grid), p);
}

OrbitFit orbital_distance(const SpectralField& w, const VElement& ref, double p, const GridPtr& grid) {
  return orbital_distance(w, make_v_element(ref, w.basis_ptr()), p, grid);
}

const MomentCoefficients& moment_coefficients() {
  static const MomentCoefficients c = [] {
    const double j = first_dipole_zero();
    const double j0 = bessel_j(0, j);
    const double cube = integrate([](double t) {
      const double v = bessel_j(1, t);
      return v * v * v;
    }, 0.0, j, {1e-14, 40});
    MomentCoefficients out;
    out.p1 = std::numbers::pi * j0 * j0;
    out.p2 = 0.5 * out.p1;
    out.q2 = 2.0 * std::numbers::pi / (j * j) * cube;
    out.q1 = 4.0 * out.q2 / 3.0;
    return out;
  }();
  return c;
}

MomentPair moments(const GridField& w) {
  const auto& grid = w.grid();
  double s2 = 0.0, s3 = 0.0;
  for (int i = 0; i < grid.n_radial(); ++i) {
    double r2 = 0.0, r3 = 0.0;
    for (int m = 0; m < grid.n_azimuthal(); ++m) {
      const double v = w(i, m);
      r2 += v * v;
      r3 += v * v * v;
    }
    s2 += r2 * grid.ring_cell_measure(i);
    s3 += r3 * grid.ring_cell_measure(i);
  }
  const auto& c = moment_coefficients();
  return {s2 / c.p2, 3.0 * s3 / c.q2};
}

std::optional<MomentSolution> solve_moment_system(const MomentPair& m) {
  const double r1 = m.r1, r2 = m.r2;
  if (r1 < 0.0) return std::nullopt;
  if (r1 == 0.0) {
    if (r2 == 0.0) return MomentSolution{0.0, 0.0};
    return std::nullopt;
  }
  const double xmax = std::sqrt(0.5 * r1);
  auto f = [&](double x) { return -2.0 * x * x * x + 3.0 * r1 * x - r2; };
  // f increases on [-xmax, xmax] from -sqrt(2) r1^{3/2} - r2 to sqrt(2) r1^{3/2} - r2.
  const double scale = std::max({1.0, std::abs(r2), r1 * xmax});
  if (f(-xmax) > 1e-12 * scale || f(xmax) < -1e-12 * scale) return std::nullopt;
  double lo = -xmax, hi = xmax;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, xmax); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double x = std::clamp(0.5 * (lo + hi), -xmax, xmax);
  const double y = std::sqrt(std::max(0.0, r1 - 2.0 * x * x));
  const double res1 = std::abs(2.0 * x * x + y * y - r1);
  const double res2 = std::abs(4.0 * x * x * x + 3.0 * x * y * y - r2);
  if (std::max(res1, res2) > 1e-6 * std::max(1.0, std::max(r1, std::abs(r2)))) {
    throw InconsistentMoments("solve_moment_system: residual above 1e-6 after bisection");
  }
  return MomentSolution{x, y};
}

double MomentCoefficientReport::max_residual() const {
  return std::max({p1_closed_form_residual, p2_closed_form_residual, p_ratio_residual, q_ratio_residual});
}

MomentCoefficientReport verify_moment_coefficients() {
  const double j = first_dipole_zero();
  const AdaptiveOptions quad{1e-13, 40};
  auto J = [](int n, double t) { return bessel_j(n, t); };
  const double pi = std::numbers::pi;
  MomentCoefficientReport rep{};
  rep.p1_quadrature = 2.0 * pi * integrate([&](double r) { return std::pow(J(0, j * r), 2) * r; }, 0.0, 1.0, quad);
  rep.p2_quadrature = pi * integrate([&](double r) { return std::pow(J(1, j * r), 2) * r; }, 0.0, 1.0, quad);
  rep.q1_quadrature = 2.0 * pi * integrate([&](double r) { return std::pow(J(0, j * r), 3) * r; }, 0.0, 1.0, quad);
  rep.q2_quadrature =
      3.0 * pi * integrate([&](double r) { return J(0, j * r) * std::pow(J(1, j * r), 2) * r; }, 0.0, 1.0, quad);
  const double j0 = J(0, j);
  rep.p1_closed_form_residual = std::abs(rep.p1_quadrature - pi * j0 * j0);
  rep.p2_closed_form_residual = std::abs(rep.p2_quadrature - 0.5 * pi * j0 * j0);
  rep.p_ratio_residual = std::abs(rep.p1_quadrature - 2.0 * rep.p2_quadrature);
  rep.q_ratio_residual = std::abs(rep.q1_quadrature - 4.0 * rep.q2_quadrature / 3.0);
  return rep;
}

}  // namespace disklab
