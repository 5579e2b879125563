#pragma once

// Verification suites over ranges of n, driven by a JSON config.

#include "report.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace toda {

struct Tolerances {
    double degeneracy_tol = kDefaultDegeneracyTol;
    double rank_tol = kDefaultRankTol;
    double bracket_tol = 1e-7;
    double ode_rtol = 1e-10;
};

struct RunConfig {
    int n_min = 2;
    int n_max = 5;
    std::uint64_t seed = 42;
    int random_points = 200;
    /// Empty means every suite.
    std::vector<std::string> suites;
    Tolerances tol;
    double flow_t_final = 10.0;
    int threads = 1;
    bool timings = false;

    /// Unknown keys, wrong types and non-positive tolerances throw ConfigError.
    static RunConfig from_json_text(const std::string& text);
    void apply(const std::string& key, const std::string& value);
    void validate() const;
    Json to_json() const;
};

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"structure", "dynamics", "spectral", "singularity", "maslov"};
    return names;
}

enum class CheckStatus { pass, fail, inconclusive };

const char* to_string(CheckStatus s) noexcept;

struct CheckRecord {
    std::string id;
    std::string suite;
    int n = 0;
    std::string reference;
    double residual = 0.0;
    double tolerance = 0.0;
    CheckStatus status = CheckStatus::pass;
    std::string detail;
    double wall_ms = 0.0;
};

struct VerificationReport {
    RunConfig config;
    std::vector<CheckRecord> checks;

    int count(CheckStatus s) const;
    Json to_json() const;
};

/// Worker count from TODA_LAX_THREADS (unset: hardware concurrency).
int threads_from_environment();

VerificationReport run_verification(const RunConfig& config);

} // namespace toda
