#include "toda/toda.h"

#include "dynamics.hpp"
#include "errors.hpp"
#include "requests.hpp"
#include "verify.hpp"

#include <cmath>
#include <new>
#include <string>

struct toda_point {
    toda::PhasePoint z;
};

struct toda_context {
    toda::RunConfig config;
};

struct toda_text {
    std::string data;
};

namespace {

thread_local std::string last_error;

template <class F>
toda_status guarded(F&& f)
{
    try {
        f();
        last_error.clear();
        return TODA_OK;
    } catch (const toda::ArgumentError& e) {
        last_error = e.what();
        return TODA_ERR_INVALID_ARGUMENT;
    } catch (const toda::DomainError& e) {
        last_error = e.what();
        return TODA_ERR_DOMAIN;
    } catch (const toda::ConfigError& e) {
        last_error = e.what();
        return TODA_ERR_CONFIG;
    } catch (const toda::NumericalError& e) {
        last_error = e.what();
        return TODA_ERR_NUMERICAL;
    } catch (const toda::ConvergenceError& e) {
        last_error = e.what();
        return TODA_ERR_NO_CONVERGENCE;
    } catch (const toda::IoError& e) {
        last_error = e.what();
        return TODA_ERR_IO;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return TODA_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return TODA_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return TODA_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what)
{
    if (!ok)
        throw toda::ArgumentError(what);
}

toda::LaxClass lax_class(toda_lax_class c)
{
    require(c == TODA_EVEN || c == TODA_ODD, "unknown Lax class");
    return c == TODA_EVEN ? toda::LaxClass::even : toda::LaxClass::odd;
}

void write_matrix(const toda::Matrix& m, double* out)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out[r * m.cols() + c] = m(r, c);
}

toda_text* make_text(std::string s) { return new toda_text{std::move(s)}; }

} // namespace

extern "C" {

const char* toda_version(void) { return "1.0.0"; }

const char* toda_status_name(toda_status status)
{
    switch (status) {
    case TODA_OK:
        return "ok";
    case TODA_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case TODA_ERR_DOMAIN:
        return "domain error";
    case TODA_ERR_CONFIG:
        return "config error";
    case TODA_ERR_NUMERICAL:
        return "numerical error";
    case TODA_ERR_NO_CONVERGENCE:
        return "no convergence";
    case TODA_ERR_IO:
        return "io error";
    case TODA_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

const char* toda_last_error(void) { return last_error.c_str(); }

toda_status toda_point_create(int n, const double* q, const double* p, toda_point** out)
{
    return guarded([&] {
        require(out && q && p, "null pointer");
        require(n >= 2, "n must be at least 2");
        *out = nullptr;
        toda::Vector qv = Eigen::Map<const toda::Vector>(q, n);
        toda::Vector pv = Eigen::Map<const toda::Vector>(p, n);
        *out = new toda_point{toda::PhasePoint(qv, pv)};
    });
}

toda_status toda_point_create_omega(int n, double q0, double p0, toda_point** out)
{
    return guarded([&] {
        require(out, "null pointer");
        require(n >= 2, "n must be at least 2");
        *out = nullptr;
        *out = new toda_point{toda::omega_point(n, q0, p0).z};
    });
}

void toda_point_destroy(toda_point* point) { delete point; }

int toda_point_size(const toda_point* point) { return point ? point->z.n() : 0; }

toda_status toda_lax_matrix(const toda_point* point, toda_lax_class c, double* out)
{
    return guarded([&] {
        require(point && out, "null pointer");
        write_matrix(toda::build_lax(point->z, lax_class(c)).entries, out);
    });
}

toda_status toda_generator_matrix(const toda_point* point, int j, toda_lax_class c, double* out)
{
    return guarded([&] {
        require(point && out, "null pointer");
        write_matrix(toda::build_generator(point->z, j, lax_class(c)).entries, out);
    });
}

toda_status toda_integrals(const toda_point* point, double* out)
{
    return guarded([&] {
        require(point && out, "null pointer");
        const toda::Vector f = toda::integrals(point->z);
        std::copy(f.data(), f.data() + f.size(), out);
    });
}

toda_status toda_eigenvalues(const toda_point* point, toda_lax_class c, double* out)
{
    return guarded([&] {
        require(point && out, "null pointer");
        const toda::Vector v = toda::decompose(toda::build_lax(point->z, lax_class(c)), 0.0).values;
        std::copy(v.data(), v.data() + v.size(), out);
    });
}

toda_status toda_poisson_integrals(const toda_point* point, double* out)
{
    return guarded([&] {
        require(point && out, "null pointer");
        write_matrix(toda::involution_matrix(point->z), out);
    });
}

toda_status toda_corank(const toda_point* point, double rank_tol, double degeneracy_tol, int* corank, int* nu,
                        int* nubar, int* inconclusive)
{
    return guarded([&] {
        require(point && corank, "null pointer");
        require(rank_tol >= 0 && degeneracy_tol >= 0, "tolerances must be non-negative");
        const toda::CorankReport r =
            toda::corank(point->z, rank_tol > 0 ? rank_tol : toda::kDefaultRankTol,
                         degeneracy_tol > 0 ? degeneracy_tol : toda::kDefaultDegeneracyTol);
        *corank = r.corank;
        if (nu)
            *nu = r.nu;
        if (nubar)
            *nubar = r.nubar;
        if (inconclusive)
            *inconclusive = r.inconclusive ? 1 : 0;
    });
}

toda_status toda_context_create(const char* config_json, toda_context** out)
{
    return guarded([&] {
        require(out, "null pointer");
        *out = nullptr;
        toda::RunConfig cfg = config_json ? toda::RunConfig::from_json_text(config_json) : toda::RunConfig{};
        cfg.threads = toda::threads_from_environment();
        *out = new toda_context{cfg};
    });
}

toda_status toda_context_set(toda_context* ctx, const char* key, const char* value)
{
    return guarded([&] {
        require(ctx && key && value, "null pointer");
        const std::string k = key;
        const std::string v = value;
        toda::RunConfig next = ctx->config;
        if (k == "threads") {
            try {
                std::size_t used = 0;
                next.threads = std::stoi(v, &used);
                if (used != v.size() || next.threads < 1)
                    throw std::invalid_argument("threads");
            } catch (const std::logic_error&) {
                throw toda::ConfigError("threads expects a positive integer, got '" + v + "'");
            }
        } else if (k == "timings") {
            if (v != "0" && v != "1" && v != "true" && v != "false")
                throw toda::ConfigError("timings expects true or false");
            next.timings = v == "1" || v == "true";
        } else {
            next.apply(k, v);
        }
        next.validate();
        ctx->config = next;
    });
}

void toda_context_destroy(toda_context* ctx) { delete ctx; }

toda_status toda_run_verify(toda_context* ctx, toda_text** report_json, int* failures, int* inconclusive)
{
    return guarded([&] {
        require(ctx && report_json, "null pointer");
        *report_json = nullptr;
        const toda::VerificationReport r = toda::run_verification(ctx->config);
        if (failures)
            *failures = r.count(toda::CheckStatus::fail);
        if (inconclusive)
            *inconclusive = r.count(toda::CheckStatus::inconclusive);
        *report_json = make_text(r.to_json().dump(2) + "\n");
    });
}

toda_status toda_run_singular(const char* request_json, toda_text** result_json)
{
    return guarded([&] {
        require(request_json && result_json, "null pointer");
        *result_json = nullptr;
        const toda::Json out = toda::run_singular_request(toda::parse_request(request_json));
        *result_json = make_text(out.dump(2) + "\n");
    });
}

toda_status toda_run_maslov(const char* curve_json, toda_text** result_json, toda_text** trace_csv)
{
    return guarded([&] {
        require(curve_json && result_json, "null pointer");
        *result_json = nullptr;
        if (trace_csv)
            *trace_csv = nullptr;
        toda::MaslovOutcome out = toda::run_maslov_request(toda::parse_request(curve_json));
        *result_json = make_text(out.report.dump(2) + "\n");
        if (trace_csv)
            *trace_csv = make_text(std::move(out.trace_csv));
    });
}

toda_status toda_run_integrate(const char* request_json, toda_text** trajectory_csv, toda_text** summary_json)
{
    return guarded([&] {
        require(request_json && trajectory_csv, "null pointer");
        *trajectory_csv = nullptr;
        if (summary_json)
            *summary_json = nullptr;
        toda::IntegrateOutcome out = toda::run_integrate_request(toda::parse_request(request_json));
        *trajectory_csv = make_text(std::move(out.csv));
        if (summary_json)
            *summary_json = make_text(out.summary.dump(2) + "\n");
    });
}

const char* toda_text_data(const toda_text* text) { return text ? text->data.c_str() : ""; }

size_t toda_text_size(const toda_text* text) { return text ? text->data.size() : 0; }

void toda_text_destroy(toda_text* text) { delete text; }

} // extern "C"
