#include "disklab/euler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "disklab/error.hpp"
#include "disklab/green.hpp"

namespace disklab {

DealiasLimits two_thirds_limits(const SpectralBasis& basis) {
  return {(2 * basis.n_modes()) / 3, (2 * basis.k_radial()) / 3};
}

EulerModel::EulerModel(BasisPtr basis, GridPtr grid) : EulerModel(basis, grid, two_thirds_limits(*basis)) {}

EulerModel::EulerModel(BasisPtr basis, GridPtr grid, DealiasLimits limits)
    : basis_(std::move(basis)),
      grid_(std::move(grid)),
      transform_(Transform::get(basis_, grid_)),
      limits_(limits),
      max_wavenumber_(basis_->max_wavenumber(limits.n_max, limits.k_max)) {}

namespace {

struct Workspace {
  std::vector<double> wr, wt, pr, pt, prod;
  explicit Workspace(std::size_t n) : wr(n), wt(n), pr(n), pt(n), prod(n) {}
};

}  // namespace

SpectralField EulerModel::tendency(const SpectralField& w, double* max_speed, Exec exec) const {
  const auto& grid = *grid_;
  Workspace ws(grid.size());
  const SpectralField psi = apply_green(w.without_mean());
  const int n_hi = std::max(w.highest_n(), 0);
  const int k_hi = std::max(w.highest_k(), 0);
  const Transform& tr = *transform_;
  tr.synthesize(w.raw(), 0.0, RadialPart::Derivative, false, n_hi, k_hi, ws.wr, exec);
  tr.synthesize(w.raw(), 0.0, RadialPart::OverR, true, n_hi, k_hi, ws.wt, exec);
  tr.synthesize(psi.raw(), 0.0, RadialPart::Derivative, false, n_hi, k_hi, ws.pr, exec);
  tr.synthesize(psi.raw(), 0.0, RadialPart::OverR, true, n_hi, k_hi, ws.pt, exec);
  for (std::size_t c = 0; c < ws.prod.size(); ++c) ws.prod[c] = ws.pr[c] * ws.wt[c] - ws.pt[c] * ws.wr[c];

  SpectralField out(basis_);
  tr.analyze(ws.prod, limits_.n_max, limits_.k_max, out.raw(), exec);
  out.set(0, 0, 0.0);

  const double c0 = w.mean_coefficient();
  if (c0 != 0.0) {
    for (int n = 1; n <= basis_->n_modes(); ++n)
      for (int k = 1; k <= basis_->k_radial(); ++k)
        out.add(n, k, w.coeff(n, k) * cplx(0.0, -0.5 * c0 * n));
  }

  if (max_speed) {
    const auto radii = grid.radii();
    const int nt = grid.n_azimuthal();
    double best = 0.0;
    for (int i = 0; i < grid.n_radial(); ++i) {
      const double swirl = -0.5 * c0 * radii[i];
      for (int m = 0; m < nt; ++m) {
        const std::size_t c = grid.index(i, m);
        const double ur = ws.pr[c] + swirl;
        best = std::max(best, ur * ur + ws.pt[c] * ws.pt[c]);
      }
    }
    *max_speed = std::sqrt(best);
  }
  return out;
}

double EulerModel::max_speed(const SpectralField& w) const {
  double u = 0.0;
  tendency(w, &u);
  return u;
}

SpectralField tendency(const SpectralField& w) {
  const EulerModel model(w.basis_ptr(), default_grid());
  return model.tendency(w);
}

double turnover_time(const EulerModel& model, const SpectralField& w) {
  return 2.0 * std::numbers::pi / model.max_speed(w);
}

void step_rk4(const EulerModel& model, SolverState& s, double dt, double cfl_limit) {
  double u = 0.0;
  const SpectralField k1 = model.tendency(s.w, &u);
  const double cfl = dt * u * model.max_wavenumber();
  if (cfl > cfl_limit) {
    std::ostringstream msg;
    msg << "step_rk4: CFL number " << cfl << " exceeds " << cfl_limit << " at t = " << s.t << " (dt = " << dt
        << ", max speed " << u << ")";
    throw CflViolation(msg.str());
  }
  const SpectralField k2 = model.tendency(s.w + (0.5 * dt) * k1);
  const SpectralField k3 = model.tendency(s.w + (0.5 * dt) * k2);
  const SpectralField k4 = model.tendency(s.w + dt * k3);
  SpectralField incr = k1;
  incr += 2.0 * k2;
  incr += 2.0 * k3;
  incr += k4;
  incr *= dt / 6.0;
  s.w += incr;
  s.t += dt;
  ++s.steps;
}

namespace {

Diagnostic diagnose(const SolverState& s, const Transform& tr, const OrbitReference* ref, double p) {
  Diagnostic d;
  d.t = s.t;
  d.energy = energy(s.w);
  d.l2 = spectral_l2_norm(s.w);
  d.mean = s.w.mean_coefficient();
  const GridField g = tr.to_grid(s.w);
  d.lp = lp_norm(g, p);
  if (ref) {
    const OrbitFit fit = orbital_distance(g, *ref, p);
    d.orbital_distance = fit.distance;
    d.beta_star = fit.beta;
  } else {
    d.orbital_distance = std::numeric_limits<double>::quiet_NaN();
    d.beta_star = std::numeric_limits<double>::quiet_NaN();
  }
  return d;
}

}  // namespace

RunResult run_orbit_experiment(const EulerModel& model, const SpectralField& w0, const RunConfig& cfg) {
  if (!(cfg.t_end > 0.0)) throw std::invalid_argument("run: T must be positive");
  if (cfg.cadence < 1) throw std::invalid_argument("run: cadence must be >= 1");
  RunResult res;
  res.state.w = w0;
  const auto tr = Transform::get(model.basis_ptr(), model.grid_ptr());
  std::optional<OrbitReference> ref;
  if (cfg.reference) ref.emplace(*cfg.reference, model.grid_ptr());
  const OrbitReference* rp = ref ? &*ref : nullptr;

  long n_steps;
  if (cfg.dt_policy == DtPolicy::Fixed) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
    n_steps = std::max(1L, static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
    res.dt = cfg.t_end / n_steps;
  } else {
    const double u = model.max_speed(w0);
    const double dt0 = u > 0.0 ? cfg.cfl_safety / (u * model.max_wavenumber()) : cfg.t_end;
    n_steps = std::max(1L, static_cast<long>(std::ceil(cfg.t_end / dt0)));
    res.dt = cfg.t_end / n_steps;
  }

  const Diagnostic d0 = diagnose(res.state, *tr, rp, cfg.p);
  res.state.trace.push_back(d0);
  res.initial_distance = d0.orbital_distance;
  res.max_distance = rp ? d0.orbital_distance : 0.0;
  auto record = [&](const Diagnostic& d) {
    res.state.trace.push_back(d);
    if (rp) res.max_distance = std::max(res.max_distance, d.orbital_distance);
    res.energy_drift = std::max(res.energy_drift, std::abs(d.energy - d0.energy) / std::abs(d0.energy));
    res.l2_drift = std::max(res.l2_drift, std::abs(d.l2 - d0.l2) / d0.l2);
    res.lp_drift = std::max(res.lp_drift, std::abs(d.lp - d0.lp) / d0.lp);
    res.mean_drift = std::max(res.mean_drift, std::abs(d.mean - d0.mean));
  };

  try {
    for (long step = 1; step <= n_steps; ++step) {
      step_rk4(model, res.state, res.dt, cfg.cfl_limit);
      if (step % cfg.cadence == 0 || step == n_steps) record(diagnose(res.state, *tr, rp, cfg.p));
    }
  } catch (const CflViolation& e) {
    res.aborted = true;
    res.abort_reason = e.what();
  }
  return res;
}

RunResult run_stability_experiment(const EulerModel& model, const VElement& v, const SpectralField& perturbation,
                                   RunConfig cfg) {
  const SpectralField ref = make_v_element(v, model.basis_ptr());
  cfg.reference = ref;
  return run_orbit_experiment(model, ref + perturbation, cfg);
}

RunResult run_rotating_orbit_experiment(const EulerModel& model, const VElement& v, double omega,
                                        const SpectralField& perturbation, RunConfig cfg) {
  SpectralField ref = make_v_element(v, model.basis_ptr());
  ref.add(0, 0, 2.0 * omega);
  cfg.reference = ref;
  return run_orbit_experiment(model, ref + perturbation, cfg);
}

double fitted_rotation_rate(const std::vector<Diagnostic>& trace) {
  if (trace.size() < 2) return 0.0;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> angle(trace.size());
  angle[0] = -trace[0].beta_star;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    double step = -(trace[i].beta_star - trace[i - 1].beta_star);
    step -= two_pi * std::round(step / two_pi);
    angle[i] = angle[i - 1] + step;
  }
  double st = 0, sa = 0, stt = 0, sta = 0;
  const double n = static_cast<double>(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    st += trace[i].t;
    sa += angle[i];
    stt += trace[i].t * trace[i].t;
    sta += trace[i].t * angle[i];
  }
  return (n * sta - st * sa) / (n * stt - st * st);
}

}  // namespace disklab
