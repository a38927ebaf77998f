#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "disklab/config.hpp"
#include "disklab/error.hpp"
#include "disklab/experiment.hpp"
#include "disklab/io.hpp"
#include "disklab/perturbation.hpp"
#include "support.hpp"

using namespace disklab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("disklab_test_" + name);
  fs::remove_all(p);
  return p;
}

const char* kSmallEvolve = R"(kind = evolve
seed = 7
[resolution]
n_modes = 8
k_radial = 12
n_radial = 40
n_azimuthal = 48
[perturbation]
kind = random-shuffle
amplitude = 1e-3
[run]
t_end = 0.5
)";

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("kind is required") {
    CHECK(error_of("") == "config: kind is required");
    CHECK(error_of("# only a comment\n\n") == "config: kind is required");
  }

  TEST_CASE("defaults") {
    const ExperimentConfig c = parse_config("kind = eigs\n");
    CHECK(c.kind == ExperimentKind::Eigs);
    CHECK(c.p == 2.0);
    CHECK(c.resolution.n_modes == 16);
    CHECK(c.resolution.k_radial == 32);
    CHECK(c.resolution.n_radial == 96);
    CHECK(c.resolution.n_azimuthal == 128);
    CHECK(c.seed == 1);
  }

  TEST_CASE("p must exceed 1") {
    const std::string e = error_of("kind = eigs\np = 0.5\n");
    CHECK(e.find("p must exceed 1") != std::string::npos);
    CHECK(error_of("kind = eigs\np = 1\n").find("p must exceed 1") != std::string::npos);
    CHECK(parse_config("kind = eigs\np = 1.5\n").p == 1.5);
  }

  TEST_CASE("errors name the line and the key") {
    CHECK(error_of("kind = eigs\n[run]\nturnover = 3\n").find("config line 3: unknown key 'run.turnover'") !=
          std::string::npos);
    CHECK(error_of("kind = eigs\nthis is not a pair\n").find("config line 2:") != std::string::npos);
    CHECK(error_of("kind = eigs\nseed = 1\nseed = 2\n").find("duplicate key 'seed'") != std::string::npos);
    CHECK(error_of("kind = eigs\n[nowhere]\n").find("unknown section") != std::string::npos);
    CHECK(error_of("kind = eigs\nseed = -3\n").find("seed") != std::string::npos);
    CHECK(error_of("kind = eigs\n[resolution]\nn_modes = 2.5\n").find("resolution.n_modes") != std::string::npos);
    CHECK(error_of("kind = nothing\n").find("unknown experiment 'nothing'") != std::string::npos);
    CHECK(error_of("kind = eigs\n[resolution]\nn_radial = 20\n").find("resolution.n_radial") != std::string::npos);
    CHECK(error_of("kind = eigs\n[perturbation]\nkind = wobble\n").find("wobble") != std::string::npos);
  }

  TEST_CASE("comments, sections and lists") {
    const ExperimentConfig c = parse_config(
        "kind = sharpness-demo  # trailing\n"
        "; full-line comment\n"
        "[element]\na = 0.5\nb = 1\nbeta = 2\n"
        "[sharpness]\nn = 20\nbetas = 0.5, 1.5\n");
    CHECK(c.element.a == 0.5);
    CHECK(c.element.beta == 2.0);
    CHECK(c.sharpness_n == 20);
    CHECK(c.sharpness_betas == std::vector<double>{0.5, 1.5});
  }

  TEST_CASE("fallback kind") {
    CHECK(parse_config("seed = 3\n", "evolve").kind == ExperimentKind::Evolve);
    CHECK_THROWS_AS(parse_config("kind = eigs\n", "evolve"), ConfigError);
    CHECK(parse_config("kind = eigs\n", "eigs").kind == ExperimentKind::Eigs);
  }

  TEST_CASE("canonical text and hash") {
    const ExperimentConfig a = parse_config("kind = eigs\nseed = 4\n");
    const ExperimentConfig b = parse_config("seed = 4\nkind = eigs\noutput = elsewhere\n");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    CHECK(config_hash(a) != config_hash(parse_config("kind = eigs\nseed = 5\n")));
    CHECK(canonical_text(a).find("seed = 4") != std::string::npos);
    // The canonical listing parses back to the same configuration.
    const ExperimentConfig c = parse_config(canonical_text(parse_config(kSmallEvolve)));
    CHECK(config_hash(c) == config_hash(parse_config(kSmallEvolve)));
  }
}

TEST_SUITE("io") {
  TEST_CASE("format_real round-trips") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23}) CHECK(std::stod(format_real(x)) == x);
  }

  TEST_CASE("field json round trip") {
    const BasisPtr b = make_basis(4, 6);
    SpectralField f(b);
    f.set(0, 0, 0.25);
    f.set(2, 3, {1.5, -0.5});
    f.set_lift(0.125);
    const nlohmann::json j = to_json(f);
    CHECK(j["kind"] == "spectral");
    CHECK(j["shape"] == nlohmann::json::array({5, 7, 2}));
    const SpectralField back = spectral_field_from_json(j);
    CHECK(std::equal(back.raw().begin(), back.raw().end(), f.raw().begin()));
    CHECK(back.lift() == 0.125);

    const GridPtr g = make_grid(5, 8, RadialRule::EqualArea);
    const GridField v = GridField::sample(g, [](double r, double t) { return r * std::cos(t); });
    const GridField gv = grid_field_from_json(nlohmann::json::parse(to_json(v).dump()));
    CHECK(gv.grid() == *g);
    CHECK(std::equal(gv.values().begin(), gv.values().end(), v.values().begin()));
    CHECK_THROWS_AS(grid_field_from_json(j), std::invalid_argument);
  }

  TEST_CASE("trace csv header") {
    std::ostringstream os;
    write_trace_csv(os, {});
    CHECK(os.str() == "t,energy,l2,lp,mean,orbital_distance,beta_star\n");
  }
}

TEST_SUITE("perturbation") {
  TEST_CASE("amplitude and truncation") {
    const BasisPtr b = default_basis();
    const GridPtr g = default_grid();
    const DealiasLimits lim = two_thirds_limits(*b);
    const SpectralField bar = make_v_element(0.3, 1.0, 0.4, b);
    for (auto kind : {PerturbationKind::RandomShuffle, PerturbationKind::ModeInjection, PerturbationKind::SmoothRandom})
      for (double p : {1.5, 2.0, 4.0}) {
        PerturbationSpec s;
        s.kind = kind;
        s.amplitude = 2e-3;
        s.seed = 9;
        const SpectralField d = make_perturbation(s, bar, p, g, lim);
        INFO(to_string(kind) << " p = " << p);
        CHECK(lp_norm(to_grid(d, g), p) == doctest::Approx(2e-3).epsilon(1e-9));
        CHECK(d.highest_n() <= lim.n_max);
        CHECK(d.highest_k() <= lim.k_max);
        s.amplitude = 0.0;
        CHECK(spectral_l2_norm(make_perturbation(s, bar, p, g, lim)) == 0.0);
      }
  }

  TEST_CASE("mode injection") {
    const BasisPtr b = default_basis();
    const GridPtr g = default_grid();
    PerturbationSpec s;
    s.kind = PerturbationKind::ModeInjection;
    s.amplitude = 1e-3;
    s.mode_n = 3;
    s.mode_k = 2;
    const SpectralField d = make_perturbation(s, make_v_element(0, 1, 0, b), 2.0, g, two_thirds_limits(*b));
    CHECK(d.highest_n() == 3);
    CHECK(d.highest_k() == 2);
    s.mode_n = 15;
    CHECK_THROWS_AS(make_perturbation(s, make_v_element(0, 1, 0, b), 2.0, g, two_thirds_limits(*b)), std::invalid_argument);
  }

  TEST_CASE("twist is close to a rearrangement") {
    // The twist itself is measure preserving; what is left after projection
    // is the band-limiting error, small against the perturbation.
    const BasisPtr b = default_basis();
    const GridPtr g = default_grid();
    const SpectralField bar = make_v_element(0.0, 1.0, 0.0, b);
    PerturbationSpec s;
    s.kind = PerturbationKind::RandomShuffle;
    s.amplitude = 1e-2;
    const SpectralField d = make_perturbation(s, bar, 2.0, g, two_thirds_limits(*b));
    const GridField w = to_grid(bar + d, g), v = to_grid(bar, g);
    const double l2w = lp_norm(w, 2.0), l2v = lp_norm(v, 2.0);
    CHECK(std::abs(l2w - l2v) <= 1e-2 * 1e-2 * l2v);
    CHECK(std::abs(mean_value(w) - mean_value(v)) <= 1e-12);
  }

  TEST_CASE("shuffle is a permutation and reproducible") {
    const GridPtr g = make_grid(8, 16, RadialRule::EqualArea);
    const GridField f = GridField::sample(g, [](double r, double t) { return r + std::sin(t); });
    const GridField a = shuffled(f, 3), c = shuffled(f, 3), d = shuffled(f, 4);
    CHECK(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
    CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), d.values().begin()));
    std::vector<double> x(f.values().begin(), f.values().end()), y(a.values().begin(), a.values().end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    CHECK(x == y);
  }

  TEST_CASE("kind names") {
    CHECK(parse_perturbation_kind("random-shuffle") == PerturbationKind::RandomShuffle);
    CHECK(to_string(PerturbationKind::SmoothRandom) == "smooth-random");
    CHECK_THROWS_AS(parse_perturbation_kind("shuffle"), ConfigError);
  }
}

TEST_SUITE("harness") {
  TEST_CASE("bessel-table output files") {
    ExperimentConfig cfg = parse_config("kind = bessel-table\n");
    cfg.output = scratch("table").string();
    REQUIRE(run_experiment(cfg) == kExitOk);
    const std::string csv = slurp(fs::path(cfg.output) / "results.csv");
    CHECK(csv.rfind("# config_hash=" + config_hash(cfg) + " seed=1\n", 0) == 0);
    CHECK(csv.find("3.8317059702075") != std::string::npos);
    const auto manifest = nlohmann::json::parse(slurp(fs::path(cfg.output) / "manifest.json"));
    CHECK(manifest["config_hash"] == config_hash(cfg));
    CHECK(manifest["status"] == "pass");
    CHECK(manifest["exit_code"] == 0);
    CHECK(manifest["seed"] == 1);
    CHECK(manifest.contains("wall_time_seconds"));
  }

  TEST_CASE("same config and seed give byte-identical results") {
    ExperimentConfig cfg = parse_config(kSmallEvolve);
    cfg.output = scratch("evolve_a").string();
    const int first = run_experiment(cfg);
    CHECK(first == kExitOk);
    const std::string a = slurp(fs::path(cfg.output) / "results.csv");
    const std::string fa = slurp(fs::path(cfg.output) / "fields" / "final.json");
    cfg.output = scratch("evolve_b").string();
    CHECK(run_experiment(cfg) == first);
    CHECK(a == slurp(fs::path(cfg.output) / "results.csv"));
    CHECK(fa == slurp(fs::path(cfg.output) / "fields" / "final.json"));
    const auto field = nlohmann::json::parse(fa);
    CHECK(field["config_hash"] == config_hash(cfg));
    CHECK(field["seed"] == 7);
  }

  TEST_CASE("zero perturbation evolve is steady") {
    ExperimentConfig cfg = parse_config(kSmallEvolve);
    cfg.relative_amplitude = 0.0;
    const ExperimentOutput out = execute(cfg);
    CHECK(out.passed());
  }

  TEST_CASE("programmatic configs are validated") {
    ExperimentConfig cfg = parse_config(kSmallEvolve);
    cfg.cfl_safety = 50.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    ExperimentOutput out;
    out.checks.push_back(check_at_most("a", 0.5, 1.0));
    CHECK(out.passed());
    out.checks.push_back(check_at_most("b", 2.0, 1.0));
    CHECK_FALSE(out.passed());
  }

  TEST_CASE("check helpers") {
    CHECK(check_at_most("x", 1.0, 1.0).pass);
    CHECK_FALSE(check_at_most("x", std::nan(""), 1.0).pass);
    CHECK(check_at_least("x", 2.0, 1.0).pass);
    CHECK_FALSE(check_at_least("x", 0.5, 1.0).pass);
  }
}
