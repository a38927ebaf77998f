#include "disklab/variational.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "disklab/bessel.hpp"
#include "disklab/error.hpp"
#include "disklab/green.hpp"
#include "disklab/quadrature.hpp"

namespace disklab {

namespace {

// Smallest eigenpair of S x = lambda M x by inverse iteration.
double inverse_iteration(const Eigen::MatrixXd& S, const Eigen::MatrixXd& M, std::mt19937_64& rng,
                         const EigenOptions& options, Eigen::VectorXd& x, int& iterations) {
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  if (ldlt.info() != Eigen::Success) throw ConvergenceError("solve_v1: stiffness factorization failed");
  std::normal_distribution<double> normal;
  x.resize(S.rows());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
  double lambda = x.dot(S * x) / x.dot(M * x);
  for (int it = 1; it <= options.max_iterations; ++it) {
    x = ldlt.solve(M * x);
    x /= std::sqrt(x.dot(M * x));
    const double next = x.dot(S * x);
    iterations = std::max(iterations, it);
    if (std::abs(next - lambda) <= options.tolerance * std::abs(next)) return next;
    lambda = next;
  }
  std::ostringstream msg;
  msg << "solve_v1: inverse iteration did not converge in " << options.max_iterations << " iterations";
  throw ConvergenceError(msg.str());
}

}  // namespace

V1Result solve_v1(const BasisPtr& basis, const GridPtr& grid, const EigenOptions& options) {
  const int K = basis->k_radial();
  const int N = basis->n_modes();
  const auto& zeros = basis->zeros();
  const QuadratureRule gl = gauss_legendre(options.quadrature_nodes, 0.0, 1.0);
  const int q = static_cast<int>(gl.nodes.size());
  std::mt19937_64 rng(options.seed);

  V1Result res;
  res.block_minima.assign(N + 1, 0.0);
  std::vector<Eigen::VectorXd> vectors(N + 1);

  // Radial functions for block n, as (value, derivative, value / r) at r.
  auto radial_fn = [&](int n, int idx, double r, double& v, double& d, double& vr) {
    if (n == 0) {
      if (idx < K) {
        const double lam = zeros.zero(0, idx + 1);
        const double mean = 2.0 * bessel_j(1, lam) / lam;
        v = bessel_j(0, lam * r) - mean;
        d = -lam * bessel_j(1, lam * r);
      } else {
        v = r * r - 0.5;
        d = 2.0 * r;
      }
      vr = 0.0;
    } else {
      v = basis->radial(n, idx + 1, r);
      d = basis->radial_derivative(n, idx + 1, r);
      vr = basis->radial_over_r(n, idx + 1, r);
    }
  };

  for (int n = 0; n <= N; ++n) {
    const int dim = n == 0 ? K + 1 : K;
    Eigen::MatrixXd V(q, dim), D(q, dim), R(q, dim);
    for (int a = 0; a < q; ++a)
      for (int c = 0; c < dim; ++c) radial_fn(n, c, gl.nodes[a], V(a, c), D(a, c), R(a, c));
    Eigen::VectorXd w(q);
    for (int a = 0; a < q; ++a) w[a] = gl.weights[a] * gl.nodes[a];
    const Eigen::MatrixXd S = D.transpose() * w.asDiagonal() * D + (n * n) * (R.transpose() * w.asDiagonal() * R);
    const Eigen::MatrixXd M = V.transpose() * w.asDiagonal() * V;
    res.block_minima[n] = inverse_iteration(S, M, rng, options, vectors[n], res.iterations);
  }
  res.m = *std::min_element(res.block_minima.begin(), res.block_minima.end());

  // Random combination of every block attaining m.
  std::normal_distribution<double> normal;
  std::vector<double> weight(N + 1, 0.0), phase(N + 1, 0.0);
  for (int n = 0; n <= N; ++n) {
    if (res.block_minima[n] <= res.m * (1.0 + 1e-8)) {
      weight[n] = 1.0 + std::abs(normal(rng));
      phase[n] = 2.0 * std::numbers::pi * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }
  }
  auto radial_sum = [&](int n, double r) {
    double total = 0.0, v, d, vr;
    for (Eigen::Index c = 0; c < vectors[n].size(); ++c) {
      radial_fn(n, static_cast<int>(c), r, v, d, vr);
      total += vectors[n][c] * v;
    }
    return total;
  };
  res.minimizer = GridField(grid);
  double boundary = 0.0;
  for (int n = 0; n <= N; ++n) {
    if (weight[n] == 0.0) continue;
    for (int i = 0; i < grid->n_radial(); ++i) {
      const double rad = weight[n] * radial_sum(n, grid->radii()[i]);
      for (int m = 0; m < grid->n_azimuthal(); ++m)
        res.minimizer(i, m) += n == 0 ? rad : rad * std::cos(n * grid->angles()[m] + phase[n]);
    }
    if (n == 0) boundary += weight[0] * radial_sum(0, 1.0);
  }
  const double norm = lp_norm(res.minimizer, 2.0);
  res.minimizer *= 1.0 / norm;
  res.boundary_constant = boundary / norm;
  return res;
}

V2Result solve_v2(const BasisPtr& basis, const PowerOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  SpectralField v(basis);
  for (int n = 0; n <= basis->n_modes(); ++n)
    for (int k = 1; k <= basis->k_radial(); ++k) v.set(n, k, {normal(rng), n == 0 ? 0.0 : normal(rng)});
  const GreenOperator green(basis);
  auto project = [](SpectralField f) {
    f.set(0, 0, 0.0);
    f.set_lift(0.0);
    return f;
  };
  v = project(v);
  v *= 1.0 / spectral_l2_norm(v);
  V2Result res;
  double rayleigh = green_form(v, v);
  for (int it = 1; it <= options.max_iterations; ++it) {
    SpectralField next = project(green.apply(v));
    next *= 1.0 / spectral_l2_norm(next);
    const SpectralField gv = project(green.apply(next));
    const double q = spectral_inner_product(next, gv);
    const double residual = spectral_l2_norm(gv - q * next) / q;
    v = std::move(next);
    res.iterations = it;
    if (std::abs(q - rayleigh) <= options.tolerance && residual <= options.residual_tolerance) {
      res.M = q;
      res.maximizer = v;
      return res;
    }
    rayleigh = q;
  }
  std::ostringstream msg;
  msg << "solve_v2: power iteration did not converge in " << options.max_iterations << " iterations";
  throw ConvergenceError(msg.str());
}

double v_projection_residual(const GridField& u) {
  const auto& grid = u.grid();
  const double j = first_dipole_zero();
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> phi(grid.size());
  for (int i = 0; i < grid.n_radial(); ++i) {
    const double r = grid.radii()[i];
    const double j0 = bessel_j(0, j * r), j1 = bessel_j(1, j * r);
    for (int m = 0; m < grid.n_azimuthal(); ++m) {
      const double t = grid.angles()[m];
      const Eigen::Vector3d f(j0, j1 * std::cos(t), j1 * std::sin(t));
      const double mu = grid.ring_cell_measure(i);
      A += mu * f * f.transpose();
      rhs += mu * u(i, m) * f;
      phi[grid.index(i, m)] = f;
    }
  }
  const Eigen::Vector3d c = A.ldlt().solve(rhs);
  double total = 0.0;
  for (int i = 0; i < grid.n_radial(); ++i) {
    for (int m = 0; m < grid.n_azimuthal(); ++m) {
      const double e = u(i, m) - c.dot(phi[grid.index(i, m)]);
      total += e * e * grid.ring_cell_measure(i);
    }
  }
  return std::sqrt(total);
}

double dirichlet_integral(const SpectralField& f, const GridPtr& grid) {
  const auto tr = Transform::get(f.basis_ptr(), grid);
  std::vector<double> fr(grid->size()), ft(grid->size());
  const int nm = f.basis().n_modes(), kr = f.basis().k_radial();
  tr->synthesize(f.raw(), f.lift(), RadialPart::Derivative, false, nm, kr, fr, Exec::Parallel);
  tr->synthesize(f.raw(), f.lift(), RadialPart::OverR, true, nm, kr, ft, Exec::Parallel);
  double total = 0.0;
  for (int i = 0; i < grid->n_radial(); ++i) {
    double ring = 0.0;
    for (int m = 0; m < grid->n_azimuthal(); ++m) {
      const std::size_t c = grid->index(i, m);
      ring += fr[c] * fr[c] + ft[c] * ft[c];
    }
    total += ring * grid->ring_cell_measure(i);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Burton ascent

namespace {

// Projection of r^2 onto the span: 1/2 + sum_k 4 / (lambda_k^2 J_0(lambda_k)) J_0(lambda_k r).
void replace_lift(SpectralField& psi) {
  const double q = psi.lift();
  if (q == 0.0) return;
  const auto& basis = psi.basis();
  psi.add(0, 0, 0.5 * q);
  for (int k = 1; k <= basis.k_radial(); ++k) {
    const double lam = basis.wavenumber(0, k);
    psi.add(0, k, q * 4.0 / (lam * lam * bessel_j(0, lam)));
  }
  psi.set_lift(0.0);
}

}  // namespace

GridField ascent_key(const GridField& v, const BasisPtr& basis) {
  const auto tr = Transform::get(basis, v.grid_ptr());
  SpectralField psi = apply_green(tr->from_grid(v));
  replace_lift(psi);
  return tr->to_grid(psi);
}

double grid_energy(const GridField& v, const BasisPtr& basis) {
  return energy(Transform::get(basis, v.grid_ptr())->from_grid(v));
}

AscentState make_ascent_state(const GridField& seed, const DistributionProfile& target, const BasisPtr& basis) {
  AscentState s;
  s.iterate = seed;
  s.energy = grid_energy(seed, basis);
  s.iteration = 0;
  s.profile = target;
  return s;
}

AscentState burton_step(const AscentState& s, const DistributionProfile& target, const BasisPtr& basis) {
  const GridField key = ascent_key(s.iterate, basis);
  const auto order = descending_order(key.values());
  const auto& grid = s.iterate.grid();
  AscentState next;
  next.iterate = GridField(s.iterate.grid_ptr());
  double cumulative = 0.0;
  for (std::size_t idx : order) {
    const double mu = grid.cell_measure(idx);
    next.iterate.values()[idx] = target.value_at(cumulative + 0.5 * mu);
    cumulative += mu;
  }
  next.energy = grid_energy(next.iterate, basis);
  next.iteration = s.iteration + 1;
  next.profile = target;
  if (next.energy < s.energy - kAscentGainTolerance) {
    std::ostringstream msg;
    msg << "burton_step: energy fell from " << s.energy << " to " << next.energy << " at iteration "
        << next.iteration;
    throw TransplantError(msg.str());
  }
  return next;
}

BurtonResult burton_maximize(const VElement& v, const GridField& seed, int max_iters, const BasisPtr& basis) {
  const GridPtr grid = seed.grid_ptr();
  const DistributionProfile target =
      distribution_profile(GridField::sample(grid, [&](double r, double t) { return v_element_value(v, r, t); }));
  const OrbitReference ref(make_v_element(v, basis), grid);

  BurtonResult res;
  AscentState state = make_ascent_state(seed, target, basis);
  res.energies.push_back(state.energy);
  res.distances.push_back(orbital_distance(state.iterate, ref, 2.0).distance);
  int stall = 0;
  while (state.iteration < max_iters) {
    AscentState next = burton_step(state, target, basis);
    const double gain = next.energy - state.energy;
    state = std::move(next);
    res.energies.push_back(state.energy);
    res.distances.push_back(orbital_distance(state.iterate, ref, 2.0).distance);
    if (!equimeasurable(distribution_profile(state.iterate), target)) res.profile_preserved = false;
    stall = gain <= kAscentGainTolerance ? stall + 1 : 0;
    if (stall >= kAscentStallSteps) {
      res.converged = true;
      break;
    }
  }
  res.iterations = state.iteration;
  res.final_energy = state.energy;
  res.final_distance = res.distances.back();
  res.final_iterate = std::move(state.iterate);
  return res;
}

void write_ascent_trace(std::ostream& os, const BurtonResult& r) {
  const auto precision = os.precision();
  os << "iteration,energy,orbital_distance\n";
  os.precision(17);
  for (std::size_t i = 0; i < r.energies.size(); ++i) os << i << ',' << r.energies[i] << ',' << r.distances[i] << '\n';
  os.precision(precision);
}

}  // namespace disklab
