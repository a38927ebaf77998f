#include <doctest.h>

#include <cmath>
#include <random>

#include "disklab/bessel.hpp"
#include "disklab/error.hpp"
#include "disklab/experiment.hpp"
#include "disklab/steady.hpp"
#include "support.hpp"

using namespace disklab;
using testing::kPi;

namespace {

VElement random_element(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5), w(0.0, 2 * kPi);
  return normalize({u(rng), u(rng), w(rng)});
}

}  // namespace

TEST_SUITE("steady") {
  TEST_CASE("normal form") {
    const VElement v = normalize({0.3, -2.0, 0.5});
    CHECK(v.b == 2.0);
    CHECK(v.beta == doctest::Approx(0.5 + kPi));
    CHECK(normalize({0, 1, -0.1}).beta == doctest::Approx(2 * kPi - 0.1));
  }

  TEST_CASE("make_v_element matches pointwise values") {
    const BasisPtr b = default_basis();
    const GridPtr g = default_grid();
    const double j = first_dipole_zero();
    const SpectralField dip = make_v_element(0, 1, 0, b);
    CHECK(std::abs(dip.coeff(1, 1) - 0.5) == 0.0);
    const SpectralField rad = make_v_element(1, 0, 2.2, b);
    CHECK_FALSE(rad.has_angular_content());
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
      const VElement v = random_element(rng);
      const GridField f = to_grid(make_v_element(v, b), g);
      double worst = 0.0;
      for (int i = 0; i < g->n_radial(); ++i)
        for (int m = 0; m < g->n_azimuthal(); ++m) {
          const double r = g->radii()[i], t = g->angles()[m];
          const double direct = v.a * bessel_j(0, j * r) + v.b * bessel_j(1, j * r) * std::cos(t + v.beta);
          worst = std::max(worst, std::abs(f(i, m) - direct));
          CHECK(v_element_value(v, r, t) == doctest::Approx(direct).epsilon(1e-14));
        }
      CHECK(worst <= 1e-8);
    }
  }

  TEST_CASE("verify_steady") {
    const BasisPtr b = default_basis();
    const GridPtr g = default_grid();
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
      const SteadyReport r = verify_steady(make_v_element(random_element(rng), b), g);
      CHECK(r.functional_residual <= 1e-8);
      CHECK(r.steady());
    }
    const double j01 = bessel_zero(0, 1).value;
    const SpectralField radial =
        from_grid(GridField::sample(g, [&](double r, double) { return bessel_j(0, j01 * r); }), b);
    CHECK(verify_steady(radial, g).tendency_norm <= 1e-12);
    CHECK(verify_steady(mixed_field(b, g), g).tendency_relative > 1e-2);
  }

  TEST_CASE("orbital distance") {
    const BasisPtr b = default_basis();
    const GridPtr g = default_grid();
    const VElement v{0.4, 1.0, 0.7};
    const SpectralField bar = make_v_element(v, b);
    const double norm = lp_norm(to_grid(bar, g), 3.0);
    for (double p : {1.5, 2.0, 3.0}) {
      // An angle error of kOrbitAngleTolerance costs about that times ||d_theta v||_p.
      const double h = 1e-4;
      const double slope = lp_norm(to_grid(bar.rotated(h) - bar.rotated(-h), g), p) / (2 * h);
      const double floor = 2 * kOrbitAngleTolerance * slope;
      const OrbitFit same = orbital_distance(bar, v, p, g);
      CHECK(same.distance <= 1e-8 * norm);
      CHECK(std::min(same.beta, 2 * kPi - same.beta) <= 1e-7);
      // w(r, theta) = bar(r, theta - 1.3)
      const OrbitFit rot = orbital_distance(bar.rotated(-1.3), v, p, g);
      CHECK(rot.distance <= floor);
      CHECK(rot.beta == doctest::Approx(2 * kPi - 1.3).epsilon(1e-7));
    }
    CHECK_THROWS_AS(orbital_distance(bar, v, 1.0, g), std::invalid_argument);
    CHECK_THROWS_AS(orbital_distance(bar, v, std::numeric_limits<double>::infinity(), g), std::invalid_argument);

    const SpectralField rad = make_v_element(1.0, 0.0, 0.0, b);
    CHECK(orbital_distance(rad, VElement{1.0, 0.0, 0.0}, 2.0, g).beta == 0.0);
  }

  TEST_CASE("orbital distance of a mode (2, 1) perturbation") {
    const BasisPtr b = default_basis();
    const GridPtr g = default_grid();
    const VElement v{0.0, 1.0, 0.0};
    const SpectralField bar = make_v_element(v, b);
    const OrbitReference ref(bar, g);
    for (double p : {1.5, 2.0, 4.0}) {
      SpectralField bump(b);
      bump.set(2, 1, 1.0);
      const double delta = 1e-3 * lp_norm(to_grid(bar, g), p);
      bump *= delta / lp_norm(to_grid(bump, g), p);
      const GridField w = to_grid(bar + bump, g);
      const double d = orbital_distance(w, ref, p).distance;
      CHECK(d <= delta * (1 + 1e-9));
      CHECK(d >= 0.5 * delta);
      // Brute-force scan on a fine angle lattice.
      double brute = 1e300;
      std::vector<double> rotated(g->size());
      for (int s = 0; s < 4096; ++s) {
        ref.evaluate(2 * kPi * s / 4096, rotated);
        GridField diff = w;
        for (std::size_t c = 0; c < diff.size(); ++c) diff.values()[c] -= rotated[c];
        brute = std::min(brute, lp_norm(diff, p));
      }
      CHECK(d <= brute * (1 + 1e-9));
      CHECK(d >= brute * (1 - 1e-3));
    }
  }

  TEST_CASE("orbital distance invariances") {
    const BasisPtr b = default_basis();
    const GridPtr g = default_grid();
    const VElement v{0.3, 0.8, 1.1};
    const SpectralField bar = make_v_element(v, b);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    auto noise = [&] {
      SpectralField f(b);
      for (int n = 0; n <= 4; ++n)
        for (int k = 1; k <= 5; ++k) f.set(n, k, 0.05 * cplx(nd(rng), nd(rng)));
      return f;
    };
    for (int trial = 0; trial < 3; ++trial) {
      const SpectralField w1 = bar + noise(), w2 = bar + noise();
      const double p = 2.5;
      const double d1 = orbital_distance(w1, v, p, g).distance;
      const double d2 = orbital_distance(w2, v, p, g).distance;
      const double gap = lp_norm(to_grid(w1 - w2, g), p);
      CHECK(std::abs(d1 - d2) <= gap * (1 + 1e-9));
      const double shift = 2 * kPi * 9 / g->n_azimuthal();
      const double both = orbital_distance(w1.rotated(shift), bar.rotated(shift), p, g).distance;
      CHECK(both == doctest::Approx(d1).epsilon(1e-9));
    }
  }

  TEST_CASE("moment coefficients") {
    const MomentCoefficientReport r = verify_moment_coefficients();
    CHECK(r.max_residual() <= 1e-8);
    const auto& c = moment_coefficients();
    CHECK(c.p1 / c.p2 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c.q1 / c.q2 == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    const double j0 = bessel_j(0, first_dipole_zero());
    CHECK(std::abs(c.p1 - kPi * j0 * j0) <= 1e-8);
  }

  TEST_CASE("moments") {
    const GridPtr g = make_grid(160, 128);
    const BasisPtr b = default_basis();
    const MomentPair zero = moments(GridField(g));
    CHECK(zero.r1 == 0.0);
    CHECK(zero.r2 == 0.0);
    const MomentPair m = moments(to_grid(make_v_element(1, 1, 0, b), g));
    CHECK(m.r1 == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(m.r2 == doctest::Approx(7.0).epsilon(1e-9));
    // Direct quadrature of int w^2, int w^3 against the coefficient forms.
    const GridField w = GridField::sample(g, [](double r, double t) { return v_element_value({1, 1, 0}, r, t); });
    double w2 = 0, w3 = 0;
    for (std::size_t c = 0; c < w.size(); ++c) {
      const double x = w.values()[c];
      w2 += x * x * g->cell_measure(c);
      w3 += x * x * x * g->cell_measure(c);
    }
    const auto& c = moment_coefficients();
    CHECK(w2 == doctest::Approx(3.0 * c.p2).epsilon(1e-9));
    CHECK(w3 == doctest::Approx(7.0 * c.q2 / 3.0).epsilon(1e-9));
    const MomentPair rotated = moments(to_grid(make_v_element(1, 1, 0, b).rotated(2 * kPi * 5 / 128), g));
    CHECK(rotated.r1 == doctest::Approx(m.r1).epsilon(1e-13));
    CHECK(rotated.r2 == doctest::Approx(m.r2).epsilon(1e-13));
  }

  TEST_CASE("moment system") {
    auto s = solve_moment_system({0.0, 0.0});
    REQUIRE(s);
    CHECK(s->a == 0.0);
    CHECK(s->b == 0.0);
    s = solve_moment_system({2.0, 0.0});
    REQUIRE(s);
    CHECK(std::abs(s->a) <= 1e-12);
    CHECK(s->b == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    s = solve_moment_system({3.0, 7.0});
    REQUIRE(s);
    CHECK(s->a == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s->b == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(solve_moment_system({-1.0, 0.0}));
    CHECK_FALSE(solve_moment_system({1.0, 2.0}));  // |r2| > sqrt(2) r1^{3/2}
  }

  TEST_CASE("orbit identification from moments") {
    const BasisPtr b = default_basis();
    const GridPtr g = make_grid(160, 128);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const VElement v = random_element(rng);
      const auto s = solve_moment_system(moments(to_grid(make_v_element(v, b), g)));
      REQUIRE(s);
      CHECK(std::abs(s->a - v.a) <= 1e-6);
      CHECK(std::abs(s->b - v.b) <= 1e-6);
    }
  }
}
