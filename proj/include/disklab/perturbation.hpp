#pragma once

#include <cstdint>
#include <string>

#include "disklab/euler.hpp"
#include "disklab/grid.hpp"
#include "disklab/spectral.hpp"

namespace disklab {

enum class PerturbationKind {
  /// Measure-preserving twist theta -> theta + eps f(r) of the base field
  /// with a random smooth f. Stays in the rearrangement class up to the
  /// band-limiting projection.
  RandomShuffle,
  /// A single spectral mode.
  ModeInjection,
  /// Band-limited zero-mean random field.
  SmoothRandom,
};

PerturbationKind parse_perturbation_kind(const std::string& name);
std::string to_string(PerturbationKind kind);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::SmoothRandom;
  /// Target ||perturbation||_p.
  double amplitude = 0.0;
  std::uint64_t seed = 1;
  int mode_n = 2;
  int mode_k = 1;
  /// Bandwidth of smooth-random noise.
  int smooth_n = 4;
  int smooth_k = 6;
};

/// Perturbation of `base` with L^p size `spec.amplitude` on `grid`,
/// truncated to `limits`. Zero amplitude gives the zero field.
SpectralField make_perturbation(const PerturbationSpec& spec, const SpectralField& base, double p,
                                const GridPtr& grid, DealiasLimits limits);

/// Random permutation of the cell values of g.
GridField shuffled(const GridField& g, std::uint64_t seed);

}  // namespace disklab
