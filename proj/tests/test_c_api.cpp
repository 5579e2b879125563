// Exercises the shared library through its C header only.

#include "doctest.h"

#include "toda/toda.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

namespace {

std::string take(toda_text* t)
{
    std::string s(toda_text_data(t), toda_text_size(t));
    toda_text_destroy(t);
    return s;
}

} // namespace

TEST_CASE("points and matrices")
{
    const double q[3] = {2.0, 0.0, 0.0};
    const double p[3] = {1.0, 2.0, 3.0};
    toda_point* z = nullptr;
    REQUIRE(toda_point_create(3, q, p, &z) == TODA_OK);
    CHECK(toda_point_size(z) == 3);
    double l[9];
    REQUIRE(toda_lax_matrix(z, TODA_EVEN, l) == TODA_OK);
    CHECK(l[0] == 1.0);
    CHECK(l[4] == 2.0);
    CHECK(l[1] == doctest::Approx(std::exp(1.0)));
    CHECK(l[2] == doctest::Approx(std::exp(-1.0)));
    REQUIRE(toda_lax_matrix(z, TODA_ODD, l) == TODA_OK);
    CHECK(l[2] == doctest::Approx(-std::exp(-1.0)));
    double f[3];
    REQUIRE(toda_integrals(z, f) == TODA_OK);
    CHECK(f[0] == doctest::Approx(6.0));
    double pb[9];
    REQUIRE(toda_poisson_integrals(z, pb) == TODA_OK);
    for (double x : pb)
        CHECK(std::abs(x) < 1e-9);
    toda_point_destroy(z);
}

TEST_CASE("relative equilibrium through the C interface")
{
    toda_point* z = nullptr;
    REQUIRE(toda_point_create_omega(3, 0.0, 0.0, &z) == TODA_OK);
    double m[9];
    REQUIRE(toda_generator_matrix(z, 2, TODA_EVEN, m) == TODA_OK);
    CHECK(m[1] == doctest::Approx(0.5));
    CHECK(m[2] == doctest::Approx(-0.5));
    double ev[3];
    REQUIRE(toda_eigenvalues(z, TODA_ODD, ev) == TODA_OK);
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[2] == doctest::Approx(-2.0));
    int corank = -1;
    int nu = -1;
    int nubar = -1;
    int inconclusive = -1;
    REQUIRE(toda_corank(z, 0.0, 0.0, &corank, &nu, &nubar, &inconclusive) == TODA_OK);
    CHECK(corank == 2);
    CHECK(nu == 1);
    CHECK(nubar == 1);
    CHECK(inconclusive == 0);
    toda_point_destroy(z);
}

TEST_CASE("errors map to status codes")
{
    const double q[2] = {0.0, 700.0};
    const double p[2] = {0.0, 0.0};
    toda_point* z = nullptr;
    CHECK(toda_point_create(2, q, p, &z) == TODA_ERR_DOMAIN);
    CHECK(z == nullptr);
    CHECK(std::strlen(toda_last_error()) > 0);
    CHECK(toda_point_create(1, q, p, &z) == TODA_ERR_INVALID_ARGUMENT);
    CHECK(toda_point_create(2, nullptr, p, &z) == TODA_ERR_INVALID_ARGUMENT);
    REQUIRE(toda_point_create_omega(2, 0.0, 0.0, &z) == TODA_OK);
    CHECK(std::strlen(toda_last_error()) == 0);
    double m[4];
    CHECK(toda_generator_matrix(z, 5, TODA_EVEN, m) == TODA_ERR_INVALID_ARGUMENT);
    CHECK(toda_lax_matrix(z, static_cast<toda_lax_class>(7), m) == TODA_ERR_INVALID_ARGUMENT);
    toda_point_destroy(z);
    CHECK(std::string(toda_status_name(TODA_ERR_NO_CONVERGENCE)) == "no convergence");
    toda_point_destroy(nullptr);
    toda_text_destroy(nullptr);
}

TEST_CASE("verification context")
{
    toda_context* ctx = nullptr;
    CHECK(toda_context_create("{\"n\": ", &ctx) == TODA_ERR_CONFIG);
    CHECK(std::string(toda_last_error()).find("byte") != std::string::npos);
    REQUIRE(toda_context_create("{\"n_min\": 2, \"n_max\": 3, \"random_points\": 15}", &ctx) == TODA_OK);
    CHECK(toda_context_set(ctx, "colour", "red") == TODA_ERR_CONFIG);
    CHECK(toda_context_set(ctx, "threads", "0") == TODA_ERR_CONFIG);
    CHECK(toda_context_set(ctx, "tol.rank_tol", "-1") == TODA_ERR_CONFIG);
    REQUIRE(toda_context_set(ctx, "threads", "3") == TODA_OK);
    REQUIRE(toda_context_set(ctx, "seed", "9") == TODA_OK);
    toda_text* report = nullptr;
    int failures = -1;
    int inconclusive = -1;
    REQUIRE(toda_run_verify(ctx, &report, &failures, &inconclusive) == TODA_OK);
    CHECK(failures == 0);
    CHECK(inconclusive == 0);
    const std::string json = take(report);
    CHECK(json.find("\"seed\": 9") != std::string::npos);
    toda_context_destroy(ctx);
}

TEST_CASE("worker count from the environment")
{
    setenv("TODA_LAX_THREADS", "none", 1);
    toda_context* ctx = nullptr;
    CHECK(toda_context_create(nullptr, &ctx) == TODA_ERR_CONFIG);
    setenv("TODA_LAX_THREADS", "2", 1);
    REQUIRE(toda_context_create(nullptr, &ctx) == TODA_OK);
    toda_context_destroy(ctx);
    unsetenv("TODA_LAX_THREADS");
}

TEST_CASE("request entry points")
{
    toda_text* out = nullptr;
    REQUIRE(toda_run_singular("{\"n\": 3, \"targets\": [\"even:2\"]}", &out) == TODA_OK);
    const std::string sing = take(out);
    CHECK(sing.find("\"corank\": 1") != std::string::npos);

    const std::string curve =
        "{\"type\": \"circle\", \"center\": {\"singular\": " + sing + "}, \"radius\": 0.001}";
    toda_text* csv = nullptr;
    REQUIRE(toda_run_maslov(curve.c_str(), &out, &csv) == TODA_OK);
    CHECK(take(out).find("\"theorem_holds\": true") != std::string::npos);
    CHECK(take(csv).rfind("t,phase", 0) == 0);

    CHECK(toda_run_maslov("{\"type\": \"circle\", \"center\": {\"omega\": {\"n\": 3}}, \"pair\": \"odd:1\", "
                          "\"radius\": 1e-12}",
                          &out, nullptr) == TODA_ERR_NO_CONVERGENCE);
    CHECK(out == nullptr);
    CHECK(toda_run_singular("{\"n\": 3, \"targets\": [\"even:2\"], \"max_iter\": 4, "
                            "\"seed\": {\"q\": [5, -3, 0.2], \"p\": [4, -4, 1]}}",
                            &out) == TODA_ERR_NO_CONVERGENCE);

    toda_text* summary = nullptr;
    REQUIRE(toda_run_integrate("{\"q\": [0, 0.1], \"p\": [0.2, 0], \"coeffs\": [0, 1], \"samples\": 3}", &csv,
                               &summary) == TODA_OK);
    CHECK(take(csv).rfind("t,q_1,q_2,p_1,p_2,F_1,F_2\n", 0) == 0);
    CHECK(take(summary).find("integral_drift") != std::string::npos);
    CHECK(toda_run_integrate("not json", &csv, nullptr) == TODA_ERR_CONFIG);
}
