#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "disklab/euler.hpp"
#include "disklab/grid.hpp"
#include "disklab/spectral.hpp"

namespace disklab {

/// {"kind": "grid", "shape": [N_r, N_theta], "rule": ..., "data": [...]},
/// data row-major over (ring, angle).
nlohmann::json to_json(const GridField& g);

/// {"kind": "spectral", "shape": [N + 1, K + 1, 2], "lift": q, "data": [...]},
/// data row-major over (n, k, re/im) for n >= 0.
nlohmann::json to_json(const SpectralField& f);

/// Inverse of to_json. Throws std::invalid_argument on schema violations.
GridField grid_field_from_json(const nlohmann::json& j);
SpectralField spectral_field_from_json(const nlohmann::json& j);

/// %.17g, the shortest fixed format that round-trips every double.
std::string format_real(double x);

/// CSV with header t,energy,l2,lp,mean,orbital_distance,beta_star.
void write_trace_csv(std::ostream& os, const std::vector<Diagnostic>& trace);

}  // namespace disklab
