#pragma once

// JSON request handlers behind the singular, maslov and integrate commands.

#include "report.hpp"

#include <string>

namespace toda {

/// {"n", "targets": ["even:2", "odd:1,odd:3", ...], optional "seed": {q, p},
/// "seed_perturbation", "max_iter", "degeneracy_tol", "rank_tol"}.
/// Each targets entry is a joint set and yields one refined point.
Json run_singular_request(const Json& request);

struct MaslovOutcome {
    Json report;
    std::string trace_csv;
};

/// Curve specs:
///   {"type": "samples", "samples": [{q, p}, ...]}
///   {"type": "circle", "center": {"point": {q, p}} | {"omega": {n, q0, p0}}
///        | {"singular_file": path, "index": i} | {"singular": {...}, "index": i},
///    "pair": "odd:1", "radius": r, "samples": m}
/// Optional "degeneracy_tol".
MaslovOutcome run_maslov_request(const Json& curve);

struct IntegrateOutcome {
    Json summary;
    std::string csv;
};

/// {"q", "p", "coeffs", "t_final", "samples", "method": "rk45" | "verlet",
///  "rtol", "atol", "step"}.
IntegrateOutcome run_integrate_request(const Json& request);

/// Parses text as a JSON request; parse errors become ConfigError with the byte offset.
Json parse_request(const std::string& text);

} // namespace toda
