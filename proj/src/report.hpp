#pragma once

// JSON encoding of results. Every float is written as a "%.17g" string so
// that reports round-trip exactly and compare byte-for-byte.

#include "maslov.hpp"

#include "json.hpp"

#include <string>

namespace toda {

using Json = nlohmann::ordered_json;

std::string format_double(double x);

Json to_json(double x);
Json to_json(const Vector& v);
/// Row-major nested arrays.
Json to_json(const Matrix& m);
Json to_json(const PhasePoint& z);
Json to_json(const CorankReport& r);
Json to_json(const FrequencyReport& f);
Json to_json(const SingularPoint& sp);
Json to_json(const HolonomyResult& h);
Json to_json(const MaslovResult& m, bool with_trace);

/// Reads {"q": [...], "p": [...]}; numbers or decimal strings are accepted.
PhasePoint point_from_json(const Json& j);
double number_from_json(const Json& j, const std::string& what);
Vector vector_from_json(const Json& j, const std::string& what);

/// CSV with header t,phase.
std::string winding_trace_csv(const MaslovResult& m);

} // namespace toda
