#include "disklab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <tuple>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "disklab/error.hpp"

namespace disklab {

namespace {

std::shared_ptr<const ZeroTable> cached_zero_table(int max_order, int max_index) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const ZeroTable>> cache;
  std::lock_guard lock(mutex);
  // Any cached table that covers the request will do.
  for (const auto& [key, table] : cache)
    if (key.first >= max_order && key.second >= max_index) return table;
  auto table = std::make_shared<const ZeroTable>(max_order, max_index);
  cache.emplace(std::pair{max_order, max_index}, table);
  return table;
}

}  // namespace

SpectralBasis::SpectralBasis(int n_modes, int k_radial) : n_modes_(n_modes), k_radial_(k_radial) {
  if (n_modes < 0 || k_radial < 1) throw std::invalid_argument("SpectralBasis: need N >= 0 and K >= 1");
  if (n_modes >= kMaxBesselOrder) throw UnsupportedOrder("SpectralBasis: azimuthal order too high");
  zeros_ = cached_zero_table(std::max(n_modes, 1), k_radial);
  wavenumber_.assign(slot_count(), 0.0);
  norm_.assign(slot_count(), 0.0);
  norm_[slot(0, 0)] = 0.5;
  for (int k = 1; k <= k_radial; ++k) {
    const double lam = zeros_->zero(1, k);
    const double j0 = bessel_j(0, lam);
    wavenumber_[slot(0, k)] = lam;
    norm_[slot(0, k)] = 0.5 * j0 * j0;
  }
  for (int n = 1; n <= n_modes; ++n) {
    for (int k = 1; k <= k_radial; ++k) {
      const double lam = zeros_->zero(n, k);
      const double jn1 = bessel_j(n + 1, lam);
      wavenumber_[slot(n, k)] = lam;
      norm_[slot(n, k)] = 0.5 * jn1 * jn1;
    }
  }
}

bool SpectralBasis::valid(int n, int k) const {
  const int a = std::abs(n);
  if (a > n_modes_ || k < 0 || k > k_radial_) return false;
  return k >= 1 || a == 0;
}

double SpectralBasis::wavenumber(int n, int k) const { return wavenumber_[slot(std::abs(n), k)]; }

double SpectralBasis::norm_squared(int n, int k) const { return norm_[slot(std::abs(n), k)]; }

double SpectralBasis::radial(int n, int k, double r) const {
  const int a = std::abs(n);
  if (a == 0 && k == 0) return 1.0;
  return bessel_j(a, wavenumber(a, k) * r);
}

double SpectralBasis::radial_derivative(int n, int k, double r) const {
  const int a = std::abs(n);
  if (a == 0 && k == 0) return 0.0;
  const double lam = wavenumber(a, k);
  return lam * bessel_j_prime(a, lam * r);
}

double SpectralBasis::radial_over_r(int n, int k, double r) const {
  const int a = std::abs(n);
  if (a == 0) return 0.0;
  const double lam = wavenumber(a, k);
  const double x = lam * r;
  // J_n(x) / r = lam (J_{n-1}(x) + J_{n+1}(x)) / (2 n) avoids dividing by a small r.
  return lam * (bessel_j(a - 1, x) + bessel_j(a + 1, x)) / (2.0 * a);
}

double SpectralBasis::max_wavenumber(int n_max, int k_max) const {
  double best = 0.0;
  for (int n = 0; n <= std::min(n_max, n_modes_); ++n)
    for (int k = 1; k <= std::min(k_max, k_radial_); ++k) best = std::max(best, wavenumber(n, k));
  return best;
}

BasisPtr make_basis(int n_modes, int k_radial) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, BasisPtr> cache;
  std::lock_guard lock(mutex);
  auto& entry = cache[{n_modes, k_radial}];
  if (!entry) entry = std::make_shared<const SpectralBasis>(n_modes, k_radial);
  return entry;
}

BasisPtr default_basis() {
  const Resolution res;
  return make_basis(res.n_modes, res.k_radial);
}

GridPtr default_grid() {
  static const GridPtr grid = [] {
    const Resolution res;
    return make_grid(res.n_radial, res.n_azimuthal);
  }();
  return grid;
}

SpectralField::SpectralField(BasisPtr basis) : basis_(std::move(basis)), coeffs_(basis_->slot_count()) {}

cplx SpectralField::coeff(int n, int k) const {
  if (!basis_->valid(n, k)) return {};
  const cplx c = coeffs_[basis_->slot(std::abs(n), k)];
  return n < 0 ? std::conj(c) : c;
}

void SpectralField::set(int n, int k, cplx value) {
  if (!basis_->valid(n, k)) {
    std::ostringstream msg;
    msg << "SpectralField::set: mode (" << n << ", " << k << ") outside basis";
    throw std::out_of_range(msg.str());
  }
  if (n == 0) value = {value.real(), 0.0};
  coeffs_[basis_->slot(std::abs(n), k)] = n < 0 ? std::conj(value) : value;
}

void SpectralField::add(int n, int k, cplx value) { set(n, k, coeff(n, k) + value); }

SpectralField SpectralField::rotated(double beta) const {
  SpectralField out = *this;
  const int nm = basis_->n_modes(), kr = basis_->k_radial();
  for (int n = 1; n <= nm; ++n) {
    const cplx phase = std::polar(1.0, n * beta);
    for (int k = 1; k <= kr; ++k) out.coeffs_[basis_->slot(n, k)] *= phase;
  }
  return out;
}

SpectralField SpectralField::truncated(int n_max, int k_max) const {
  SpectralField out = *this;
  const int nm = basis_->n_modes(), kr = basis_->k_radial();
  for (int n = 0; n <= nm; ++n)
    for (int k = 1; k <= kr; ++k)
      if (n > n_max || k > k_max) out.coeffs_[basis_->slot(n, k)] = 0.0;
  return out;
}

SpectralField SpectralField::without_mean() const {
  SpectralField out = *this;
  out.coeffs_[0] = 0.0;
  out.lift_ = 0.0;
  return out;
}

bool SpectralField::has_angular_content() const {
  for (int n = 1; n <= basis_->n_modes(); ++n)
    for (int k = 1; k <= basis_->k_radial(); ++k)
      if (coeffs_[basis_->slot(n, k)] != cplx{}) return true;
  return false;
}

int SpectralField::highest_n() const {
  for (int n = basis_->n_modes(); n >= 1; --n)
    for (int k = 1; k <= basis_->k_radial(); ++k)
      if (coeffs_[basis_->slot(n, k)] != cplx{}) return n;
  return 0;
}

int SpectralField::highest_k() const {
  for (int k = basis_->k_radial(); k >= 1; --k)
    for (int n = 0; n <= basis_->n_modes(); ++n)
      if (coeffs_[basis_->slot(n, k)] != cplx{}) return k;
  return 0;
}

namespace {
void require_same_basis(const SpectralField& a, const SpectralField& b) {
  if (a.basis_ptr() != b.basis_ptr() &&
      (a.basis().n_modes() != b.basis().n_modes() || a.basis().k_radial() != b.basis().k_radial()))
    throw std::invalid_argument("SpectralField: bases differ");
}
}  // namespace

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_basis(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  lift_ += other.lift_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_basis(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  lift_ -= other.lift_;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  lift_ *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double spectral_inner_product(const SpectralField& a, const SpectralField& b) {
  require_same_basis(a, b);
  if (a.lift() != 0.0 || b.lift() != 0.0)
    throw std::invalid_argument("spectral_inner_product: fields with an r^2 lift are not supported");
  const auto& basis = a.basis();
  double total = 0.0;
  for (int k = 0; k <= basis.k_radial(); ++k)
    total += a.coeff(0, k).real() * b.coeff(0, k).real() * basis.norm_squared(0, k);
  for (int n = 1; n <= basis.n_modes(); ++n)
    for (int k = 1; k <= basis.k_radial(); ++k)
      total += 2.0 * std::real(a.coeff(n, k) * std::conj(b.coeff(n, k))) * basis.norm_squared(n, k);
  return 2.0 * std::numbers::pi * total;
}

double spectral_l2_norm(const SpectralField& f) { return std::sqrt(std::max(0.0, spectral_inner_product(f, f))); }

double coefficient_distance(const SpectralField& a, const SpectralField& b) {
  require_same_basis(a, b);
  double worst = std::abs(a.lift() - b.lift());
  for (std::size_t i = 0; i < a.raw().size(); ++i) worst = std::max(worst, std::abs(a.raw()[i] - b.raw()[i]));
  return worst;
}

// ---------------------------------------------------------------------------
// Transform

Transform::Transform(BasisPtr basis, GridPtr grid)
    : basis_(std::move(basis)),
      grid_(std::move(grid)),
      n_r_(grid_->n_radial()),
      n_t_(grid_->n_azimuthal()),
      n_modes_(basis_->n_modes()),
      k_radial_(basis_->k_radial()) {
  if (n_t_ < 2 * n_modes_ + 2 || n_r_ < k_radial_ + 2) {
    std::ostringstream msg;
    msg << "Transform: grid " << n_r_ << "x" << n_t_ << " under-resolves basis N=" << n_modes_
        << " K=" << k_radial_ << " (need N_theta >= " << 2 * n_modes_ + 2 << ", N_r >= " << k_radial_ + 2 << ")";
    throw ResolutionError(msg.str());
  }
  const std::size_t slots = basis_->slot_count();
  value_.assign(slots * n_r_, 0.0);
  derivative_.assign(slots * n_r_, 0.0);
  over_r_.assign(slots * n_r_, 0.0);
  const auto radii = grid_->radii();
  for (int n = 0; n <= n_modes_; ++n) {
    for (int k = 0; k <= k_radial_; ++k) {
      if (!basis_->valid(n, k)) continue;
      const std::size_t base = basis_->slot(n, k) * n_r_;
      for (int i = 0; i < n_r_; ++i) {
        value_[base + i] = basis_->radial(n, k, radii[i]);
        derivative_[base + i] = basis_->radial_derivative(n, k, radii[i]);
        over_r_[base + i] = basis_->radial_over_r(n, k, radii[i]);
      }
    }
  }
  cos_.assign(static_cast<std::size_t>(n_modes_ + 1) * n_t_, 0.0);
  sin_.assign(cos_.size(), 0.0);
  for (int n = 0; n <= n_modes_; ++n) {
    for (int m = 0; m < n_t_; ++m) {
      // Reduce n m mod N_theta before forming the angle so tables are exact multiples.
      const double angle = 2.0 * std::numbers::pi * ((static_cast<long>(n) * m) % n_t_) / n_t_;
      cos_[static_cast<std::size_t>(n) * n_t_ + m] = std::cos(angle);
      sin_[static_cast<std::size_t>(n) * n_t_ + m] = std::sin(angle);
    }
  }
}

std::shared_ptr<const Transform> Transform::get(const BasisPtr& basis, const GridPtr& grid) {
  // Keyed by grid contents so equal grids built separately share tables.
  using Key = std::tuple<const SpectralBasis*, int, int, RadialRule>;
  constexpr std::size_t kCapacity = 16;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const Transform>> cache;
  static std::deque<Key> order;
  std::lock_guard lock(mutex);
  const Key key{basis.get(), grid->n_radial(), grid->n_azimuthal(), grid->rule()};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto t = std::make_shared<const Transform>(basis, grid);
  if (cache.size() >= kCapacity) {
    cache.erase(order.front());
    order.pop_front();
  }
  cache.emplace(key, t);
  order.push_back(key);
  return t;
}

double Transform::table(RadialPart part, int n, int k, int i) const {
  const std::size_t at = basis_->slot(n, k) * n_r_ + i;
  switch (part) {
    case RadialPart::Value: return value_[at];
    case RadialPart::Derivative: return derivative_[at];
    case RadialPart::OverR: return over_r_[at];
  }
  return 0.0;
}

namespace {

// One ring of synthesis: radial sums per n, then the real Fourier series.
// Shared by both kernels so serial and OpenMP agree to the last bit.
struct SynthesisRing {
  const double* table;  // [slot][ring]
  const double* cos_t;
  const double* sin_t;
  int n_r, n_t, k_stride, n_max, k_max;

  void operator()(std::span<const cplx> coeffs, bool dtheta, double lift_term, int i, double* out,
                  std::vector<cplx>& radial) const {
    for (int n = 0; n <= n_max; ++n) {
      cplx acc = 0.0;
      const int k0 = n == 0 ? 0 : 1;
      for (int k = k0; k <= k_max; ++k) {
        const std::size_t s = static_cast<std::size_t>(n) * k_stride + k;
        acc += coeffs[s] * table[s * n_r + i];
      }
      radial[n] = dtheta ? acc * cplx(0.0, n) : acc;
    }
    for (int m = 0; m < n_t; ++m) {
      double v = radial[0].real() + lift_term;
      for (int n = 1; n <= n_max; ++n) {
        const std::size_t t = static_cast<std::size_t>(n) * n_t + m;
        v += 2.0 * (radial[n].real() * cos_t[t] - radial[n].imag() * sin_t[t]);
      }
      out[static_cast<std::size_t>(i) * n_t + m] = v;
    }
  }
};

}  // namespace

void Transform::synthesize(std::span<const cplx> coeffs, double lift, RadialPart part, bool theta_derivative,
                           int n_max, int k_max, std::span<double> out, Exec exec) const {
  n_max = std::min(n_max, n_modes_);
  k_max = std::min(k_max, k_radial_);
  const double* tab = part == RadialPart::Value ? value_.data()
                      : part == RadialPart::Derivative ? derivative_.data()
                                                       : over_r_.data();
  const SynthesisRing ring{tab, cos_.data(), sin_.data(), n_r_, n_t_, k_radial_ + 1, n_max, k_max};
  const auto radii = grid_->radii();
  auto lift_term = [&](int i) {
    if (theta_derivative || lift == 0.0) return 0.0;
    if (part == RadialPart::Value) return lift * radii[i] * radii[i];
    if (part == RadialPart::Derivative) return 2.0 * lift * radii[i];
    return 0.0;
  };
  if (exec == Exec::Serial) {
    std::vector<cplx> radial(n_max + 1);
    for (int i = 0; i < n_r_; ++i) ring(coeffs, theta_derivative, lift_term(i), i, out.data(), radial);
  } else {
#pragma omp parallel
    {
      std::vector<cplx> radial(n_max + 1);
#pragma omp for schedule(static)
      for (int i = 0; i < n_r_; ++i) ring(coeffs, theta_derivative, lift_term(i), i, out.data(), radial);
    }
  }
}

void Transform::analyze(std::span<const double> values, int n_max, int k_max, std::span<cplx> coeffs,
                        Exec exec) const {
  n_max = std::min(n_max, n_modes_);
  k_max = std::min(k_max, k_radial_);
  std::vector<cplx> fourier(static_cast<std::size_t>(n_r_) * (n_max + 1));
  auto ring = [&](int i) {
    const double* row = values.data() + static_cast<std::size_t>(i) * n_t_;
    for (int n = 0; n <= n_max; ++n) {
      double re = 0.0, im = 0.0;
      const double* c = cos_.data() + static_cast<std::size_t>(n) * n_t_;
      const double* s = sin_.data() + static_cast<std::size_t>(n) * n_t_;
      for (int m = 0; m < n_t_; ++m) {
        re += row[m] * c[m];
        im -= row[m] * s[m];
      }
      fourier[static_cast<std::size_t>(i) * (n_max + 1) + n] = cplx(re, im) / static_cast<double>(n_t_);
    }
  };
  const int stride = k_radial_ + 1;
  auto mode = [&](int n) {
    for (int k = 0; k <= k_radial_; ++k) {
      const std::size_t s = static_cast<std::size_t>(n) * stride + k;
      if (k > k_max || !basis_->valid(n, k)) {
        coeffs[s] = 0.0;
        continue;
      }
      cplx acc = 0.0;
      const double* tab = value_.data() + s * n_r_;
      for (int i = 0; i < n_r_; ++i)
        acc += fourier[static_cast<std::size_t>(i) * (n_max + 1) + n] * (grid_->radial_measure(i) * tab[i]);
      coeffs[s] = acc / basis_->norm_squared(n, k);
    }
    if (n == 0)
      for (int k = 0; k <= k_radial_; ++k) coeffs[k] = coeffs[k].real();
  };
  if (exec == Exec::Serial) {
    for (int i = 0; i < n_r_; ++i) ring(i);
    for (int n = 0; n <= n_max; ++n) mode(n);
  } else {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_r_; ++i) ring(i);
#pragma omp parallel for schedule(static)
    for (int n = 0; n <= n_max; ++n) mode(n);
  }
  for (int n = n_max + 1; n <= n_modes_; ++n)
    for (int k = 0; k <= k_radial_; ++k) coeffs[static_cast<std::size_t>(n) * stride + k] = 0.0;
}

GridField Transform::to_grid(const SpectralField& f, Exec exec) const {
  GridField out(grid_);
  synthesize(f.raw(), f.lift(), RadialPart::Value, false, n_modes_, k_radial_, out.values(), exec);
  return out;
}

SpectralField Transform::from_grid(const GridField& g, Exec exec) const {
  if (!(g.grid() == *grid_)) throw ResolutionError("from_grid: field lives on a different grid");
  SpectralField out(basis_);
  analyze(g.values(), n_modes_, k_radial_, out.raw(), exec);
  return out;
}

GridField to_grid(const SpectralField& f, const GridPtr& grid) {
  return Transform::get(f.basis_ptr(), grid)->to_grid(f);
}

SpectralField from_grid(const GridField& g, const BasisPtr& basis) {
  return Transform::get(basis, g.grid_ptr())->from_grid(g);
}

}  // namespace disklab
