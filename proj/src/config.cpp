#include "disklab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "disklab/bessel.hpp"
#include "disklab/error.hpp"

namespace disklab {

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ExperimentKind::BesselTable, "bessel-table"},       {ExperimentKind::VerifyIdentities, "verify-identities"},
    {ExperimentKind::Eigs, "eigs"},                      {ExperimentKind::SteadyCheck, "steady-check"},
    {ExperimentKind::BurtonMaximize, "burton-maximize"}, {ExperimentKind::Evolve, "evolve"},
    {ExperimentKind::StabilitySweep, "stability-sweep"}, {ExperimentKind::RotateDemo, "rotate-demo"},
    {ExperimentKind::SharpnessDemo, "sharpness-demo"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string real_text(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("config: " + key + ": expected a finite real, got '" + v + "'");
  return x;
}

long long parse_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("config: " + key + ": expected an integer, got '" + v + "'");
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  const long long x = parse_integer(key, v);
  if (x < -1000000000LL || x > 1000000000LL) throw ConfigError("config: " + key + ": integer out of range");
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("config: " + key + ": expected an unsigned 64-bit integer, got '" + v + "'");
  return x;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

struct Entry {
  std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)> parse;
  std::function<std::string(const ExperimentConfig&)> print;
};

template <class T>
Entry real_entry(T ExperimentConfig::*field) {
  return {[field](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*field = parse_real(k, v); },
          [field](const ExperimentConfig& c) { return real_text(c.*field); }};
}

Entry int_entry(int ExperimentConfig::*field) {
  return {[field](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*field = parse_int(k, v); },
          [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> table = [] {
    std::map<std::string, Entry> t;
    t["kind"] = {[](ExperimentConfig& c, const std::string&, const std::string& v) {
                   c.kind = parse_experiment_kind(unquote(v));
                 },
                 [](const ExperimentConfig& c) { return to_string(c.kind); }};
    t["seed"] = {[](ExperimentConfig& c, const std::string& k, const std::string& v) { c.seed = parse_u64(k, v); },
                 [](const ExperimentConfig& c) { return std::to_string(c.seed); }};
    t["p"] = real_entry(&ExperimentConfig::p);
    t["output"] = {[](ExperimentConfig& c, const std::string&, const std::string& v) { c.output = unquote(v); },
                   [](const ExperimentConfig& c) { return c.output; }};

    t["resolution.n_modes"] = {
        [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.resolution.n_modes = parse_int(k, v); },
        [](const ExperimentConfig& c) { return std::to_string(c.resolution.n_modes); }};
    t["resolution.k_radial"] = {
        [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.resolution.k_radial = parse_int(k, v); },
        [](const ExperimentConfig& c) { return std::to_string(c.resolution.k_radial); }};
    t["resolution.n_radial"] = {
        [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.resolution.n_radial = parse_int(k, v); },
        [](const ExperimentConfig& c) { return std::to_string(c.resolution.n_radial); }};
    t["resolution.n_azimuthal"] = {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                                     c.resolution.n_azimuthal = parse_int(k, v);
                                   },
                                   [](const ExperimentConfig& c) { return std::to_string(c.resolution.n_azimuthal); }};

    t["element.a"] = {
        [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.element.a = parse_real(k, v); },
        [](const ExperimentConfig& c) { return real_text(c.element.a); }};
    t["element.b"] = {
        [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.element.b = parse_real(k, v); },
        [](const ExperimentConfig& c) { return real_text(c.element.b); }};
    t["element.beta"] = {
        [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.element.beta = parse_real(k, v); },
        [](const ExperimentConfig& c) { return real_text(c.element.beta); }};

    t["perturbation.kind"] = {[](ExperimentConfig& c, const std::string&, const std::string& v) {
                                c.perturbation_kind = parse_perturbation_kind(unquote(v));
                              },
                              [](const ExperimentConfig& c) { return to_string(c.perturbation_kind); }};
    t["perturbation.amplitude"] = real_entry(&ExperimentConfig::relative_amplitude);
    t["perturbation.mode_n"] = int_entry(&ExperimentConfig::mode_n);
    t["perturbation.mode_k"] = int_entry(&ExperimentConfig::mode_k);

    t["run.turnovers"] = real_entry(&ExperimentConfig::turnovers);
    t["run.t_end"] = real_entry(&ExperimentConfig::t_end);
    t["run.cfl_safety"] = real_entry(&ExperimentConfig::cfl_safety);
    t["run.cadence"] = int_entry(&ExperimentConfig::cadence);
    t["run.omega"] = real_entry(&ExperimentConfig::omega);

    t["bessel.max_order"] = int_entry(&ExperimentConfig::table_order);
    t["bessel.max_index"] = int_entry(&ExperimentConfig::table_index);
    t["bessel.random_samples"] = int_entry(&ExperimentConfig::random_samples);

    t["burton.n_radial"] = int_entry(&ExperimentConfig::burton_radial);
    t["burton.n_azimuthal"] = int_entry(&ExperimentConfig::burton_azimuthal);
    t["burton.max_iters"] = int_entry(&ExperimentConfig::burton_iterations);
    t["burton.runs"] = int_entry(&ExperimentConfig::burton_runs);

    t["sweep.members"] = int_entry(&ExperimentConfig::sweep_members);

    t["sharpness.n"] = int_entry(&ExperimentConfig::sharpness_n);
    t["sharpness.betas"] = {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                              c.sharpness_betas.clear();
                              std::stringstream ss(v);
                              std::string item;
                              while (std::getline(ss, item, ',')) c.sharpness_betas.push_back(parse_real(k, trim(item)));
                              if (c.sharpness_betas.empty()) throw ConfigError("config: " + k + ": empty list");
                            },
                            [](const ExperimentConfig& c) {
                              const double pi = std::numbers::pi;
                              const std::vector<double> betas =
                                  c.sharpness_betas.empty() ? std::vector<double>{pi / 4, pi / 2, pi} : c.sharpness_betas;
                              std::string s;
                              for (std::size_t i = 0; i < betas.size(); ++i) s += (i ? ", " : "") + real_text(betas[i]);
                              return s;
                            }};
    return t;
  }();
  return table;
}

void require(bool ok, const std::string& key, const std::string& why) {
  if (!ok) throw ConfigError("config: " + key + " out of range: " + why);
}

ExperimentConfig parse_impl(const std::string& text, const std::string* fallback_kind) {
  ExperimentConfig cfg;
  const auto& reg = registry();
  std::set<std::string> seen;
  std::set<std::string> sections;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw ConfigError(where + "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& [name, _] : reg)
        if (name.rfind(section + ".", 0) == 0) known = true;
      if (!known) throw ConfigError(where + "unknown section [" + section + "]");
      if (!sections.insert(section).second) throw ConfigError(where + "duplicate section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = reg.find(full);
    if (it == reg.end()) throw ConfigError(where + "unknown key '" + full + "'");
    if (!seen.insert(full).second) throw ConfigError(where + "duplicate key '" + full + "'");
    try {
      it->second.parse(cfg, full, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  if (!seen.count("kind")) {
    if (!fallback_kind) throw ConfigError("config: kind is required");
    cfg.kind = parse_experiment_kind(*fallback_kind);
  } else if (fallback_kind && parse_experiment_kind(*fallback_kind) != cfg.kind) {
    throw ConfigError("config: kind '" + to_string(cfg.kind) + "' contradicts the requested experiment '" +
                      *fallback_kind + "'");
  }
  validate(cfg);
  return cfg;
}

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& k : kKindNames)
    if (name == k.name) return k.kind;
  throw ConfigError("config: kind: unknown experiment '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  for (const auto& k : kKindNames)
    if (kind == k.kind) return k.name;
  return "?";
}

ExperimentConfig parse_config(const std::string& text) { return parse_impl(text, nullptr); }

ExperimentConfig parse_config(const std::string& text, const std::string& fallback_kind) {
  return parse_impl(text, &fallback_kind);
}

void validate(const ExperimentConfig& c) {
  require(c.p > 1.0, "p", "p must exceed 1");
  require(!c.output.empty(), "output", "must be non-empty");

  const Resolution& r = c.resolution;
  require(r.n_modes >= 1 && r.n_modes < kMaxBesselOrder, "resolution.n_modes",
          "must lie in [1, " + std::to_string(kMaxBesselOrder - 1) + "]");
  require(r.k_radial >= 2 && r.k_radial <= 256, "resolution.k_radial", "must lie in [2, 256]");
  require(r.n_radial >= r.k_radial + 2, "resolution.n_radial", "must be at least k_radial + 2");
  require(r.n_azimuthal >= 2 * r.n_modes + 2, "resolution.n_azimuthal", "must be at least 2 n_modes + 2");

  require(c.element.a != 0.0 || c.element.b != 0.0, "element", "a and b cannot both vanish");

  require(c.relative_amplitude >= 0.0 && c.relative_amplitude < 1.0, "perturbation.amplitude", "must lie in [0, 1)");
  const int n_max = (2 * r.n_modes) / 3;
  const int k_max = (2 * r.k_radial) / 3;
  require(c.mode_n >= 0 && c.mode_n <= n_max, "perturbation.mode_n",
          "must lie in the dealiased range [0, " + std::to_string(n_max) + "]");
  require(c.mode_k >= 1 && c.mode_k <= k_max, "perturbation.mode_k",
          "must lie in the dealiased range [1, " + std::to_string(k_max) + "]");

  require(c.turnovers > 0.0, "run.turnovers", "must be positive");
  require(c.t_end >= 0.0, "run.t_end", "must be non-negative (0 selects run.turnovers)");
  require(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0, "run.cfl_safety", "must lie in (0, 1]");
  require(c.cadence >= 1, "run.cadence", "must be at least 1");
  require(c.kind != ExperimentKind::RotateDemo || c.omega != 0.0, "run.omega", "rotate-demo needs omega != 0");

  require(c.table_order >= 0 && c.table_order <= kMaxBesselOrder, "bessel.max_order",
          "must lie in [0, " + std::to_string(kMaxBesselOrder) + "]");
  require(c.table_index >= 1 && c.table_index <= 1000, "bessel.max_index", "must lie in [1, 1000]");
  require(c.random_samples >= 0 && c.random_samples <= 100000, "bessel.random_samples", "must lie in [0, 100000]");

  require(c.burton_radial >= 8, "burton.n_radial", "must be at least 8");
  require(c.burton_azimuthal >= 2 * r.n_modes + 2, "burton.n_azimuthal", "must be at least 2 n_modes + 2");
  require(c.burton_iterations >= 1, "burton.max_iters", "must be at least 1");
  require(c.burton_runs >= 1, "burton.runs", "must be at least 1");

  require(c.sweep_members >= 1, "sweep.members", "must be at least 1");

  require(c.sharpness_n >= 1, "sharpness.n", "must be at least 1");
  for (double b : c.sharpness_betas)
    require(b > 0.0 && b < 2.0 * std::numbers::pi, "sharpness.betas", "every angle must lie in (0, 2 pi)");
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [name, entry] : registry()) out += name + " = " + entry.print(cfg) + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // The output location does not change results and stays out of the hash.
  ExperimentConfig c = cfg;
  c.output.clear();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : canonical_text(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace disklab
