#include "disklab/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "disklab/error.hpp"

namespace disklab {

PerturbationKind parse_perturbation_kind(const std::string& name) {
  if (name == "random-shuffle") return PerturbationKind::RandomShuffle;
  if (name == "mode-injection") return PerturbationKind::ModeInjection;
  if (name == "smooth-random") return PerturbationKind::SmoothRandom;
  throw ConfigError("unknown perturbation kind '" + name + "'");
}

std::string to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::RandomShuffle:
      return "random-shuffle";
    case PerturbationKind::ModeInjection:
      return "mode-injection";
    case PerturbationKind::SmoothRandom:
      return "smooth-random";
  }
  return "?";
}

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kTwistHarmonics = 4;

// base(r_i, theta_m + eps f(r_i)) projected back onto the truncated basis.
SpectralField twisted(const SpectralField& base, const std::vector<double>& profile, double eps,
                      const std::shared_ptr<const Transform>& tr, DealiasLimits limits) {
  const DiskGrid& g = *tr->grid_ptr();
  GridField out(tr->grid_ptr());
  for (int i = 0; i < g.n_radial(); ++i) {
    const GridField ring = tr->to_grid(base.rotated(eps * profile[i]));
    for (int m = 0; m < g.n_azimuthal(); ++m) out(i, m) = ring(i, m);
  }
  return tr->from_grid(out).truncated(limits.n_max, limits.k_max);
}

double grid_lp(const SpectralField& f, const std::shared_ptr<const Transform>& tr, double p) {
  return lp_norm(tr->to_grid(f), p);
}

}  // namespace

SpectralField make_perturbation(const PerturbationSpec& spec, const SpectralField& base, double p,
                                const GridPtr& grid, DealiasLimits limits) {
  if (!(spec.amplitude >= 0.0)) throw std::invalid_argument("perturbation amplitude must be non-negative");
  const BasisPtr& basis = base.basis_ptr();
  SpectralField pert(basis);
  if (spec.amplitude == 0.0) return pert;
  const auto tr = Transform::get(basis, grid);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  switch (spec.kind) {
    case PerturbationKind::RandomShuffle: {
      if (!base.has_angular_content())
        throw std::invalid_argument("random-shuffle needs a base field with angular structure");
      double g[kTwistHarmonics];
      for (double& x : g) x = normal(rng);
      std::vector<double> profile(grid->n_radial());
      for (int i = 0; i < grid->n_radial(); ++i) {
        const double s = grid->radii()[i] * grid->radii()[i];
        double f = 0.0;
        for (int l = 0; l < kTwistHarmonics; ++l) f += g[l] * std::cos((l + 1) * kPi * s);
        profile[i] = f;
      }
      const SpectralField ref = base.truncated(limits.n_max, limits.k_max);
      // The L^p size is close to linear in eps; two secant corrections suffice.
      double eps = 1e-3;
      for (int it = 0; it < 3; ++it) {
        pert = twisted(base, profile, eps, tr, limits) - ref;
        const double size = grid_lp(pert, tr, p);
        if (size == 0.0) throw std::invalid_argument("twist left the base field unchanged");
        if (it < 2) eps *= spec.amplitude / size;
      }
      return pert;
    }
    case PerturbationKind::ModeInjection: {
      if (spec.mode_n < 0 || spec.mode_n > limits.n_max || spec.mode_k < 1 || spec.mode_k > limits.k_max)
        throw std::invalid_argument("injected mode outside the dealiased set");
      pert.set(spec.mode_n, spec.mode_k, 1.0);
      break;
    }
    case PerturbationKind::SmoothRandom: {
      const int n_hi = std::min(spec.smooth_n, limits.n_max);
      const int k_hi = std::min(spec.smooth_k, limits.k_max);
      for (int n = 0; n <= n_hi; ++n)
        for (int k = 1; k <= k_hi; ++k) {
          const double re = normal(rng), im = normal(rng);
          pert.set(n, k, cplx(re, im) / double(1 + n + k));
        }
      break;
    }
  }
  pert *= spec.amplitude / grid_lp(pert, tr, p);
  return pert;
}

GridField shuffled(const GridField& g, std::uint64_t seed) {
  std::vector<double> v(g.values().begin(), g.values().end());
  std::mt19937_64 rng(seed);
  std::shuffle(v.begin(), v.end(), rng);
  return GridField(g.grid_ptr(), std::move(v));
}

}  // namespace disklab
