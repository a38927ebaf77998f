// Acceptance run: one line per criterion, tolerances fixed below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "disklab/bessel.hpp"
#include "disklab/euler.hpp"
#include "disklab/experiment.hpp"
#include "disklab/green.hpp"
#include "disklab/perturbation.hpp"
#include "disklab/spectral.hpp"
#include "disklab/steady.hpp"
#include "disklab/variational.hpp"

using namespace disklab;

namespace {

constexpr double kPi = std::numbers::pi;

namespace tol {
constexpr double j11 = 1e-6;
constexpr double identity = 1e-9;
constexpr double kernel_l2 = 5e-3;
constexpr double kernel_order = 1.5;
constexpr double eigen = 1e-6;
constexpr double eigen_projection = 1e-5;
constexpr double moment_relation = 1e-8;
constexpr double moment_recovery = 1e-6;
constexpr double burton_energy = 1e-6;
constexpr double burton_distance = 1e-3;
constexpr double burton_fraction = 0.9;
constexpr double steady = 1e-6;
constexpr double rotation = 1e-2;
constexpr double distance_factor = 50.0;
constexpr double energy_drift = 1e-6;
constexpr double l2_drift = 1e-4;
constexpr double control_growth = 10.0;
constexpr double phase = 2e-2;
constexpr double fixed_point_floor = 0.1;  // times ||v||_p
}  // namespace tol

struct Criterion {
  int id;
  std::string title;
  std::vector<Check> checks;
  std::string note;
  bool pass() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Prints the worst check of each name class plus every failing check.
void report(const Criterion& c, double seconds) {
  std::cout << "criterion " << c.id << " " << c.title << ": " << (c.pass() ? "PASS" : "FAIL") << " (" << fmt(seconds)
            << " s)";
  for (const Check& k : c.checks)
    std::cout << "  " << k.name << "=" << fmt(k.value) << (k.pass ? "" : "!") << "[" << fmt(k.bound) << "]";
  if (!c.note.empty()) std::cout << "  " << c.note;
  std::cout << std::endl;
}

Check worst_at_most(const std::string& name, const std::vector<double>& values, double bound) {
  return check_at_most(name, values.empty() ? std::nan("") : *std::max_element(values.begin(), values.end()), bound);
}

VElement random_element(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5), w(0.0, 2 * kPi);
  return normalize({u(rng), u(rng), w(rng)});
}

double l2_relative(const GridField& a, const GridField& b) { return lp_norm(a - b, 2.0) / lp_norm(b, 2.0); }

// ---------------------------------------------------------------------------

Criterion bessel_fidelity() {
  Criterion c{1, "bessel", {}, {}};
  const double j = first_dipole_zero();
  c.checks.push_back(check_at_most("j11_error", std::abs(j - 3.831706), tol::j11));
  c.checks.push_back(check_at_most("J1(j)", std::abs(bessel_j(1, j)), tol::j11));
  const IdentityReport r = verify_identity_suite(identity_samples(100, 1));
  c.checks.push_back(check_at_most("apd1", r.apd1, tol::identity));
  c.checks.push_back(check_at_most("apd2", r.apd2, tol::identity));
  c.checks.push_back(check_at_most("apd3", r.apd3, tol::identity));
  c.checks.push_back(check_at_most("apd4", r.apd4, tol::identity));
  c.checks.push_back(check_at_most("normalization", r.normalization, tol::identity));
  c.checks.push_back(check_at_most("orthogonality", r.orthogonality, tol::identity));
  c.checks.push_back(check_at_most("J2+J0", r.j2_equals_minus_j0, tol::identity));
  c.checks.push_back(check_at_most("three_term", r.three_term, tol::identity));
  c.checks.push_back(check_at_most("derivative_recurrence", r.derivative_recurrence, tol::identity));
  return c;
}

Criterion green_cross_validation() {
  Criterion c{2, "green-kernel", {}, {}};
  const BasisPtr b = default_basis();
  const double j = first_dipole_zero();
  const double j22 = b->zeros().zero(2, 2);
  using Fn = double (*)(double, double, double, double);
  const Fn fields[] = {
      [](double r, double t, double j, double) { return bessel_j(1, j * r) * std::cos(t); },
      [](double, double, double, double) { return 1.0; },
      [](double r, double t, double j, double j22) {
        return 0.6 * bessel_j(0, j * r) + bessel_j(2, j22 * r) * std::sin(2 * t) + r * r * std::cos(t);
      },
  };
  const char* names[] = {"dipole", "constant", "mixed"};
  auto error_at = [&](int nr, int nt, int f) {
    const GridPtr g = make_grid(nr, nt);
    const GridField w = GridField::sample(g, [&](double r, double t) { return fields[f](r, t, j, j22); });
    const GridField spectral = to_grid(apply_green(from_grid(w, b)), g);
    return l2_relative(apply_green_kernel(w), spectral);
  };
  const GridPtr dg = default_grid();
  for (int f = 0; f < 3; ++f) {
    const double fine = error_at(dg->n_radial(), dg->n_azimuthal(), f);
    const double coarse = error_at(dg->n_radial() / 2, dg->n_azimuthal() / 2, f);
    c.checks.push_back(check_at_most(std::string(names[f]) + "_l2", fine, tol::kernel_l2));
    c.checks.push_back(check_at_least(std::string(names[f]) + "_order", std::log2(coarse / fine), tol::kernel_order));
  }
  return c;
}

Criterion eigenvalues() {
  Criterion c{3, "eigenvalues", {}, {}};
  const BasisPtr b = default_basis();
  const GridPtr g = default_grid();
  const double j = first_dipole_zero();
  const V1Result v1 = solve_v1(b, g);
  const V2Result v2 = solve_v2(b);
  c.checks.push_back(check_at_most("m/j^2-1", std::abs(v1.m / (j * j) - 1), tol::eigen));
  c.checks.push_back(check_at_most("M*j^2-1", std::abs(v2.M * j * j - 1), tol::eigen));
  c.checks.push_back(check_at_most("m*M-1", std::abs(v1.m * v2.M - 1), tol::eigen));
  const SpectralField pg = apply_green(v2.maximizer).without_mean();
  c.checks.push_back(
      check_at_most("maximizer_relation", spectral_l2_norm(v2.maximizer - (1.0 / v2.M) * pg), tol::eigen));
  c.checks.push_back(
      check_at_most("maximizer_projection", v_projection_residual(to_grid(v2.maximizer, g)), tol::eigen_projection));
  c.checks.push_back(check_at_most("minimizer_projection", v_projection_residual(v1.minimizer), tol::eigen_projection));
  return c;
}

Criterion moment_machinery() {
  Criterion c{4, "moments", {}, {}};
  const MomentCoefficientReport rep = verify_moment_coefficients();
  const auto& k = moment_coefficients();
  c.checks.push_back(check_at_most("coefficient_quadrature", rep.max_residual(), tol::moment_relation));
  c.checks.push_back(check_at_most("p1-2p2", std::abs(k.p1 - 2 * k.p2), tol::moment_relation));
  c.checks.push_back(check_at_most("q1-4q2/3", std::abs(k.q1 - 4 * k.q2 / 3), tol::moment_relation));

  const BasisPtr b = default_basis();
  const GridPtr g = make_grid(160, 128);
  std::mt19937_64 rng(2024);
  std::vector<double> errors;
  int unsolved = 0;
  for (int i = 0; i < 100; ++i) {
    const VElement v = random_element(rng);
    const auto s = solve_moment_system(moments(to_grid(make_v_element(v, b), g)));
    if (!s) {
      ++unsolved;
      continue;
    }
    errors.push_back(std::max(std::abs(s->a - v.a), std::abs(s->b - v.b)));
  }
  c.checks.push_back(worst_at_most("recovery_error", errors, tol::moment_recovery));
  c.checks.push_back(check_at_most("unsolved", unsolved, 0));

  // Lattice scan of [-2, 2] x [0, 2]. A cell over which both equations
  // change sign may hold a root; all such cells must sit at the solver's root.
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int nx = 2000, ny = 1000;
  const double hx = 4.0 / nx, hy = 2.0 / ny;
  int bad_pairs = 0;
  for (int pair = 0; pair < 10; ++pair) {
    const double r1 = 0.5 + 2.5 * u01(rng);
    const double r2 = (2 * u01(rng) - 1) * 0.95 * std::sqrt(2.0) * std::pow(r1, 1.5);
    const auto s = solve_moment_system({r1, r2});
    if (!s) {
      ++bad_pairs;
      continue;
    }
    auto f1 = [&](int ix, int iy) {
      const double x = -2.0 + ix * hx, y = iy * hy;
      return 2 * x * x + y * y - r1;
    };
    auto f2 = [&](int ix, int iy) {
      const double x = -2.0 + ix * hx, y = iy * hy;
      return 4 * x * x * x + 3 * x * y * y - r2;
    };
    auto straddles = [](double a, double b, double c, double d) {
      return std::min({a, b, c, d}) <= 0.0 && std::max({a, b, c, d}) >= 0.0;
    };
    std::vector<char> mark(static_cast<std::size_t>(nx) * ny, 0);
    for (int ix = 0; ix < nx; ++ix)
      for (int iy = 0; iy < ny; ++iy)
        mark[ix * ny + iy] = straddles(f1(ix, iy), f1(ix + 1, iy), f1(ix, iy + 1), f1(ix + 1, iy + 1)) &&
                             straddles(f2(ix, iy), f2(ix + 1, iy), f2(ix, iy + 1), f2(ix + 1, iy + 1));
    // Nearly tangent crossings leave a sliver of candidate cells about
    // h * cond(J) long, so every candidate must lie within that of the root.
    const double x0 = s->a, y0 = s->b;
    const double j11 = 4 * x0, j12 = 2 * y0, j21 = 12 * x0 * x0 + 3 * y0 * y0, j22 = 6 * x0 * y0;
    const double fro2 = j11 * j11 + j12 * j12 + j21 * j21 + j22 * j22, det = std::abs(j11 * j22 - j12 * j21);
    const double disc = std::sqrt(fro2 * fro2 - 4 * det * det);
    const double cond = std::sqrt((fro2 + disc) / (fro2 - disc));
    const double radius = 2 * (hx + hy) * cond;
    int candidates = 0;
    double spread = 0.0;
    for (int ix = 0; ix < nx; ++ix)
      for (int iy = 0; iy < ny; ++iy) {
        if (!mark[ix * ny + iy]) continue;
        ++candidates;
        spread = std::max(spread, std::hypot(-2.0 + (ix + 0.5) * hx - x0, (iy + 0.5) * hy - y0));
      }
    if (candidates == 0 || spread > radius) ++bad_pairs;
  }
  c.checks.push_back(check_at_most("scan_pairs_not_unique", bad_pairs, 0));
  return c;
}

Criterion burton_characterization() {
  Criterion c{5, "burton", {}, {}};
  const BasisPtr b = default_basis();
  const GridPtr g = make_grid(128, 256, RadialRule::EqualArea);
  const VElement elements[] = {{0.0, 1.0, 0.0}, {1.0, 0.5, 0.3}, {-0.6, 1.2, 2.0}};
  bool monotone = true;
  for (int e = 0; e < 3; ++e) {
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const BurtonRun run = run_burton(elements[e], seed, g, 3000, b);
      monotone = monotone && run.monotone;
      const double gap = (run.reference_energy - run.result.final_energy) / run.reference_energy;
      const double dist = run.result.final_distance / run.reference_norm;
      ok += run.failure.empty() && gap <= tol::burton_energy && dist <= tol::burton_distance;
    }
    c.checks.push_back(check_at_least("element" + std::to_string(e) + "_fraction", ok / 10.0, tol::burton_fraction));
  }
  c.checks.push_back(check_at_least("monotone", monotone ? 1.0 : 0.0, 1.0));
  return c;
}

Criterion steadiness_rotation() {
  Criterion c{6, "steady-rotation", {}, {}};
  const BasisPtr b = default_basis();
  const GridPtr g = default_grid();
  std::mt19937_64 rng(6);
  std::vector<VElement> vs = {{1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {-2, 0.1, 4.0}, {0.05, 3, 1.0}};
  for (int i = 0; i < 45; ++i) vs.push_back(random_element(rng));
  std::vector<double> rel;
  for (const VElement& v : vs) rel.push_back(verify_steady(make_v_element(v, b), g).tendency_relative);
  c.checks.push_back(worst_at_most("tendency_relative", rel, tol::steady));

  const EulerModel model(b, g);
  for (double omega : {0.5, -0.3}) {
    const RotationDemo d = run_rotation_demo(model, {0.3, 1.0, 0.5}, omega, 2.0);
    c.checks.push_back(check_at_most("omega" + fmt(omega) + "_error", d.relative_error, tol::rotation));
  }
  return c;
}

Criterion orbital_stability() {
  Criterion c{7, "stability", {}, {}};
  const BasisPtr b = default_basis();
  const GridPtr g = default_grid();
  const EulerModel model(b, g);
  const SpectralField base = make_v_element(VElement{0.0, 1.0, 0.0}, b);
  const PerturbationKind kinds[] = {PerturbationKind::RandomShuffle, PerturbationKind::ModeInjection,
                                    PerturbationKind::SmoothRandom};
  std::uint64_t seed = 11;
  for (double p : {1.5, 2.0, 4.0}) {
    double ratio = 0.0, energy = 0.0, l2 = 0.0;
    bool aborted = false;
    for (PerturbationKind kind : kinds) {
      PerturbationSpec spec;
      spec.kind = kind;
      spec.amplitude = 1e-3;
      spec.seed = seed++;
      const PerturbedRun pr = run_perturbed(model, base, spec, p, 20.0);
      ratio = std::max(ratio, pr.run.max_distance / pr.delta);
      energy = std::max(energy, pr.run.energy_drift);
      l2 = std::max(l2, pr.run.l2_drift);
      aborted = aborted || pr.run.aborted;
      std::cerr << "  stability p=" << p << " " << to_string(kind) << ": max/delta=" << fmt(pr.run.max_distance / pr.delta)
                << " energy_drift=" << fmt(pr.run.energy_drift) << " l2_drift=" << fmt(pr.run.l2_drift)
                << " lp_drift=" << fmt(pr.run.lp_drift) << std::endl;
    }
    const std::string tag = "p" + fmt(p) + "_";
    c.checks.push_back(check_at_most(tag + "max/delta", ratio, tol::distance_factor));
    c.checks.push_back(check_at_most(tag + "energy_drift", energy, tol::energy_drift));
    c.checks.push_back(check_at_most(tag + "l2_drift", l2, tol::l2_drift));
    c.checks.push_back(check_at_most(tag + "aborted", aborted ? 1.0 : 0.0, 0.0));
  }

  // Control: the non-steady mixed field, measured against its own initial orbit.
  PerturbationSpec spec;
  spec.kind = PerturbationKind::SmoothRandom;
  spec.amplitude = 1e-3;
  spec.seed = 99;
  const PerturbedRun control = run_perturbed(model, mixed_field(b, g), spec, 2.0, 20.0);
  c.checks.push_back(
      check_at_least("control_growth", control.run.max_distance / control.run.initial_distance, tol::control_growth));
  return c;
}

Criterion sharpness() {
  Criterion c{8, "sharpness", {}, {}};
  const BasisPtr b = default_basis();
  const GridPtr g = default_grid();
  const EulerModel model(b, g);
  const VElement v{0.0, 1.0, 0.0};
  const double p = 2.0;
  const double scale = lp_norm(to_grid(make_v_element(v, b), g), p);
  const auto points = run_sharpness(model, v, 50, {kPi / 4, kPi / 2, kPi}, p);
  const char* names[] = {"pi/4", "pi/2", "pi"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    c.checks.push_back(check_at_most(std::string(names[i]) + "_phase_error", points[i].phase_relative_error, tol::phase));
    c.checks.push_back(check_at_least(std::string(names[i]) + "_fixed_point_distance",
                                      points[i].fixed_point_distance / scale, tol::fixed_point_floor));
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-8"};
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run (default: all)")->check(CLI::Range(1, 8))->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected = only.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7, 8} : std::set<int>(only.begin(), only.end());

  using Runner = Criterion (*)();
  const Runner runners[] = {bessel_fidelity,         green_cross_validation, eigenvalues,       moment_machinery,
                            burton_characterization, steadiness_rotation,    orbital_stability, sharpness};
  int failed = 0;
  for (int id : selected) {
    const auto start = std::chrono::steady_clock::now();
    Criterion c;
    try {
      c = runners[id - 1]();
    } catch (const std::exception& e) {
      c = Criterion{id, "error", {}, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(c, seconds);
    failed += !c.pass();
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}
