#include "disklab/green.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "disklab/bessel.hpp"

namespace disklab {

GreenOperator::GreenOperator(BasisPtr basis) : basis_(std::move(basis)) {}

double GreenOperator::multiplier(int n, int k) const {
  const double lam = basis_->wavenumber(n, k);
  return 1.0 / (lam * lam);
}

SpectralField GreenOperator::apply(const SpectralField& w) const {
  if (w.lift() != 0.0) throw std::invalid_argument("apply_green: input carries an r^2 lift");
  SpectralField psi(w.basis_ptr());
  const int nm = basis_->n_modes(), kr = basis_->k_radial();
  const double c0 = w.mean_coefficient();
  double mean = 0.25 * c0;
  for (int k = 1; k <= kr; ++k) {
    const double a = w.coeff(0, k).real();
    const double lam = basis_->wavenumber(0, k);
    psi.set(0, k, a / (lam * lam));
    mean -= a * bessel_j(0, lam) / (lam * lam);
  }
  psi.set(0, 0, mean);
  psi.set_lift(-0.25 * c0);
  for (int n = 1; n <= nm; ++n)
    for (int k = 1; k <= kr; ++k) psi.set(n, k, w.coeff(n, k) * multiplier(n, k));
  return psi;
}

SpectralField apply_green(const SpectralField& w) { return GreenOperator(w.basis_ptr()).apply(w); }

SpectralField negative_laplacian(const SpectralField& psi) {
  const auto& basis = psi.basis();
  SpectralField out(psi.basis_ptr());
  for (int n = 0; n <= basis.n_modes(); ++n) {
    for (int k = 1; k <= basis.k_radial(); ++k) {
      const double lam = basis.wavenumber(n, k);
      out.set(n, k, psi.coeff(n, k) * (lam * lam));
    }
  }
  // -Laplacian(r^2) = -4.
  out.set(0, 0, -4.0 * psi.lift());
  return out;
}

double green_form(const SpectralField& a, const SpectralField& b) {
  if (a.lift() != 0.0 || b.lift() != 0.0) throw std::invalid_argument("green_form: lifted input");
  const auto& basis = a.basis();
  const double pi = std::numbers::pi;
  const double ca = a.mean_coefficient(), cb = b.mean_coefficient();
  // <1, (1 - r^2)/4> = pi/8 and <J_0(lambda r), r^2> = 4 pi J_0(lambda) / lambda^2.
  double total = ca * cb * pi / 8.0;
  for (int k = 1; k <= basis.k_radial(); ++k) {
    const double lam = basis.wavenumber(0, k);
    const double l2 = lam * lam;
    const double j0 = bessel_j(0, lam);
    const double ak = a.coeff(0, k).real(), bk = b.coeff(0, k).real();
    total -= pi * (ca * bk + cb * ak) * j0 / l2;
    total += 2.0 * pi * basis.norm_squared(0, k) * ak * bk / l2;
  }
  for (int n = 1; n <= basis.n_modes(); ++n) {
    for (int k = 1; k <= basis.k_radial(); ++k) {
      const double lam = basis.wavenumber(n, k);
      total += 4.0 * pi * basis.norm_squared(n, k) * std::real(a.coeff(n, k) * std::conj(b.coeff(n, k))) / (lam * lam);
    }
  }
  return total;
}

double energy(const SpectralField& w) { return 0.5 * green_form(w, w); }

GridField apply_green_kernel(const GridField& w, Exec exec) {
  const auto& grid = w.grid();
  const int nr = grid.n_radial(), nt = grid.n_azimuthal();
  const auto radii = grid.radii();
  const double inv4pi = 0.25 / std::numbers::pi;
  std::vector<double> cos_d(nt);
  for (int d = 0; d < nt; ++d) cos_d[d] = std::cos(2.0 * std::numbers::pi * d / nt);
  GridField out(w.grid_ptr());

  auto ring = [&](int i, std::vector<double>& table) {
    const double r = radii[i];
    for (int ip = 0; ip < nr; ++ip) {
      const double rho = radii[ip];
      const double mu = grid.ring_cell_measure(ip);
      for (int d = 0; d < nt; ++d) {
        const double c = 2.0 * r * rho * cos_d[d];
        const double image = 1.0 + r * r * rho * rho - c;
        double g;
        if (ip == i && d == 0) {
          // disk of radius a with pi a^2 = mu, centred on the node
          const double a2 = mu / std::numbers::pi;
          g = (0.25 * a2 - 0.25 * a2 * std::log(a2)) + inv4pi * std::log(image) * mu;
        } else {
          g = inv4pi * (std::log(image) - std::log(r * r + rho * rho - c)) * mu;
        }
        table[static_cast<std::size_t>(ip) * nt + d] = g;
      }
    }
    for (int m = 0; m < nt; ++m) {
      double acc = 0.0;
      for (int ip = 0; ip < nr; ++ip) {
        const double* t = table.data() + static_cast<std::size_t>(ip) * nt;
        double part = 0.0;
        for (int d = 0; d < nt; ++d) {
          int mm = m + d;
          if (mm >= nt) mm -= nt;
          part += t[d] * w(ip, mm);
        }
        acc += part;
      }
      out(i, m) = acc;
    }
  };

  if (exec == Exec::Serial) {
    std::vector<double> table(static_cast<std::size_t>(nr) * nt);
    for (int i = 0; i < nr; ++i) ring(i, table);
  } else {
#pragma omp parallel
    {
      std::vector<double> table(static_cast<std::size_t>(nr) * nt);
#pragma omp for schedule(dynamic)
      for (int i = 0; i < nr; ++i) ring(i, table);
    }
  }
  return out;
}

}  // namespace disklab
