#include "disklab/io.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace disklab {

namespace {

const char* rule_name(RadialRule rule) {
  return rule == RadialRule::EqualArea ? "equal-area" : "gauss-legendre";
}

RadialRule parse_rule(const std::string& s) {
  if (s == "equal-area") return RadialRule::EqualArea;
  if (s == "gauss-legendre") return RadialRule::GaussLegendre;
  throw std::invalid_argument("field json: unknown radial rule '" + s + "'");
}

void expect_kind(const nlohmann::json& j, const char* kind) {
  if (!j.is_object() || !j.contains("kind") || j.at("kind") != kind)
    throw std::invalid_argument(std::string("field json: expected kind '") + kind + "'");
  if (!j.contains("shape") || !j.contains("data"))
    throw std::invalid_argument("field json: missing shape or data");
}

}  // namespace

nlohmann::json to_json(const GridField& g) {
  nlohmann::json j;
  j["kind"] = "grid";
  j["shape"] = {g.grid().n_radial(), g.grid().n_azimuthal()};
  j["rule"] = rule_name(g.grid().rule());
  j["data"] = std::vector<double>(g.values().begin(), g.values().end());
  return j;
}

nlohmann::json to_json(const SpectralField& f) {
  const SpectralBasis& b = f.basis();
  std::vector<double> data;
  data.reserve(2 * b.slot_count());
  for (const cplx& c : f.raw()) {
    data.push_back(c.real());
    data.push_back(c.imag());
  }
  nlohmann::json j;
  j["kind"] = "spectral";
  j["shape"] = {b.n_modes() + 1, b.k_radial() + 1, 2};
  j["lift"] = f.lift();
  j["data"] = std::move(data);
  return j;
}

GridField grid_field_from_json(const nlohmann::json& j) {
  expect_kind(j, "grid");
  const auto shape = j.at("shape").get<std::vector<int>>();
  if (shape.size() != 2) throw std::invalid_argument("field json: grid shape must have 2 entries");
  const RadialRule rule = j.contains("rule") ? parse_rule(j.at("rule").get<std::string>()) : RadialRule::GaussLegendre;
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != static_cast<std::size_t>(shape[0]) * shape[1])
    throw std::invalid_argument("field json: data length does not match shape");
  return GridField(make_grid(shape[0], shape[1], rule), std::move(data));
}

SpectralField spectral_field_from_json(const nlohmann::json& j) {
  expect_kind(j, "spectral");
  const auto shape = j.at("shape").get<std::vector<int>>();
  if (shape.size() != 3 || shape[2] != 2 || shape[0] < 1 || shape[1] < 1)
    throw std::invalid_argument("field json: spectral shape must be [N + 1, K + 1, 2]");
  const auto data = j.at("data").get<std::vector<double>>();
  const std::size_t slots = static_cast<std::size_t>(shape[0]) * shape[1];
  if (data.size() != 2 * slots) throw std::invalid_argument("field json: data length does not match shape");
  SpectralField f(make_basis(shape[0] - 1, shape[1] - 1));
  for (int n = 0; n < shape[0]; ++n)
    for (int k = 0; k < shape[1]; ++k) {
      const std::size_t s = f.basis().slot(n, k);
      if (n != 0 && k == 0) continue;
      f.set(n, k, cplx(data[2 * s], data[2 * s + 1]));
    }
  if (j.contains("lift")) f.set_lift(j.at("lift").get<double>());
  return f;
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trace_csv(std::ostream& os, const std::vector<Diagnostic>& trace) {
  os << "t,energy,l2,lp,mean,orbital_distance,beta_star\n";
  for (const Diagnostic& d : trace)
    os << format_real(d.t) << ',' << format_real(d.energy) << ',' << format_real(d.l2) << ',' << format_real(d.lp)
       << ',' << format_real(d.mean) << ',' << format_real(d.orbital_distance) << ',' << format_real(d.beta_star)
       << '\n';
}

}  // namespace disklab
