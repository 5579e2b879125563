#include "doctest.h"

#include "errors.hpp"
#include "lax_core.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace toda;
using toda::testing::Gen;
using toda::testing::max_abs;
using toda::testing::zero_point;

namespace {

Matrix mat3(std::initializer_list<double> v)
{
    Matrix m(3, 3);
    auto it = v.begin();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            m(r, c) = *it++;
    return m;
}

} // namespace

TEST_CASE("phase point validation")
{
    CHECK_THROWS_AS(PhasePoint(Vector::Zero(1), Vector::Zero(1)), ArgumentError);
    CHECK_THROWS_AS(PhasePoint(Vector::Zero(3), Vector::Zero(2)), ArgumentError);
    Vector q = Vector::Zero(3);
    q[1] = 700.0;
    try {
        PhasePoint z(q, Vector::Zero(3));
        FAIL("overflowing bond accepted");
    } catch (const DomainError& e) {
        CHECK(e.index() == 0);
    }
    q[1] = 599.0;
    CHECK_NOTHROW(PhasePoint(q, Vector::Zero(3)));
    Vector bad = Vector::Zero(3);
    bad[2] = std::nan("");
    CHECK_THROWS_AS(PhasePoint(bad, Vector::Zero(3)), DomainError);
}

TEST_CASE("bond variables")
{
    Vector q(3);
    q << 2.0, 0.0, 0.0;
    Vector p(3);
    p << 1.0, 2.0, 3.0;
    const PhasePoint z(q, p);
    CHECK(z.b()[0] == doctest::Approx(std::exp(1.0)));
    CHECK(z.b()[1] == doctest::Approx(1.0));
    CHECK(z.b()[2] == doctest::Approx(std::exp(-1.0)));
    const PhasePoint back = PhasePoint::from_stacked(z.stacked());
    CHECK((back.q() - q).norm() == 0.0);
    CHECK((back.p() - p).norm() == 0.0);
}

TEST_CASE("sign vectors")
{
    CHECK_THROWS_AS(SignVector({1, 0, -1}), ArgumentError);
    const SignVector a({1, -1, -1});
    CHECK(a.parity() == 1);
    CHECK(a.lax_class() == LaxClass::even);
    CHECK(SignVector({1, 1, -1}).lax_class() == LaxClass::odd);
    CHECK(SignVector::odd_representative(4).parity() == -1);
    const SignVector prod = a * SignVector({1, 1, -1});
    CHECK(prod.parity() == -1);
    CHECK(prod[2] == 1);
}

TEST_CASE("Lax matrix at the origin")
{
    const PhasePoint z = zero_point(3);
    const Matrix l = build_lax(z, SignVector::all_plus(3)).entries;
    CHECK(max_abs(l - mat3({0, 1, 1, 1, 0, 1, 1, 1, 0})) == 0.0);
    const Matrix lb = build_lax(z, SignVector({1, 1, -1})).entries;
    CHECK(max_abs(lb - mat3({0, 1, -1, 1, 0, 1, -1, 1, 0})) == 0.0);
    CHECK(max_abs(build_lax(z, LaxClass::odd).entries - lb) == 0.0);
}

TEST_CASE("Lax matrix entries")
{
    Vector q(3);
    q << 2.0, 0.0, 0.0;
    Vector p(3);
    p << 1.0, 2.0, 3.0;
    const Matrix l = build_lax(PhasePoint(q, p), LaxClass::even).entries;
    const double e = std::numbers::e;
    CHECK(max_abs(l - mat3({1, e, 1 / e, e, 2, 1, 1 / e, 1, 3})) < 1e-15);
}

TEST_CASE("two-particle corner accumulates both bonds")
{
    Vector q(2);
    q << 0.4, -0.2;
    const PhasePoint z(q, Vector::Zero(2));
    const Vector b = z.b();
    const Matrix l = build_lax(z, LaxClass::even).entries;
    const Matrix lb = build_lax(z, LaxClass::odd).entries;
    CHECK(l(0, 1) == doctest::Approx(b[0] + b[1]));
    CHECK(lb(0, 1) == doctest::Approx(b[0] - b[1]));
    CHECK(l(1, 0) == l(0, 1));
    const Matrix l0 = build_lax(zero_point(2), LaxClass::even).entries;
    CHECK(max_abs(l0 - (Matrix(2, 2) << 0, 2, 2, 0).finished()) == 0.0);
    CHECK(max_abs(build_lax(zero_point(2), LaxClass::odd).entries) == 0.0);
}

TEST_CASE("generator matrices")
{
    const PhasePoint z = zero_point(3);
    for (LaxClass c : {LaxClass::even, LaxClass::odd})
        CHECK(max_abs(build_generator(z, 1, c).entries) == 0.0);
    const Matrix m2 = build_generator(z, 2, LaxClass::even).entries;
    CHECK(max_abs(m2 - 0.5 * mat3({0, 1, -1, -1, 0, 1, 1, -1, 0})) < 1e-15);
    const Matrix m3 = build_generator(z, 3, LaxClass::odd).entries;
    CHECK(max_abs(m3 - 0.5 * mat3({0, 1, 1, -1, 0, 1, -1, -1, 0})) < 1e-15);
    CHECK_THROWS_AS(build_generator(z, 0, LaxClass::even), ArgumentError);
    CHECK_THROWS_AS(build_generator(z, 4, LaxClass::even), ArgumentError);
}

TEST_CASE("integrals at the origin")
{
    const Vector f = integrals(zero_point(3));
    CHECK(f[0] == doctest::Approx(0.0));
    CHECK(f[1] == doctest::Approx(3.0));
    CHECK(f[2] == doctest::Approx(2.0));
}

TEST_CASE("momentum and energy in closed form")
{
    Gen g(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = g.integer(2, 8);
        const PhasePoint z = g.point(n, 1.5);
        const Vector f = integrals(z);
        CHECK(f[0] == doctest::Approx(z.p().sum()).epsilon(1e-13));
        const Vector b = z.b();
        const double bonds = n == 2 ? (b[0] + b[1]) * (b[0] + b[1]) : b.squaredNorm();
        const double h = 0.5 * z.p().squaredNorm() + bonds;
        CHECK(f[1] == doctest::Approx(h).epsilon(1e-13));
    }
}

TEST_CASE("matrix powers by repeated multiplication")
{
    const Matrix l = build_lax(zero_point(3), LaxClass::even).entries;
    CHECK(max_abs(matrix_power(l, 0) - Matrix::Identity(3, 3)) == 0.0);
    CHECK(max_abs(matrix_power(l, 3) - mat3({2, 3, 3, 3, 2, 3, 3, 3, 2})) == 0.0);
}

TEST_CASE("off-band structure at the origin")
{
    const PhasePoint z = zero_point(3);
    const Matrix d1 = build_lax(z, LaxClass::even).entries - build_lax(z, LaxClass::odd).entries;
    CHECK(max_abs(d1 - mat3({0, 0, 2, 0, 0, 0, 2, 0, 0})) == 0.0);
    const Matrix l3 = matrix_power(build_lax(z, LaxClass::even).entries, 3);
    const Matrix lb3 = matrix_power(build_lax(z, LaxClass::odd).entries, 3);
    CHECK(lb3(0, 0) == doctest::Approx(-2.0));
    for (int r = 0; r < 3; ++r)
        CHECK((l3 - lb3)(r, r) == doctest::Approx(4.0));
    for (int j = 1; j <= 3; ++j) {
        const OffBandReport rep = off_band_check(z, j, 1e-10);
        CHECK(rep.passed);
        CHECK(rep.first_diagonal_residual < 1e-14);
    }
}

TEST_CASE("trace relation at the origin")
{
    const PhasePoint z3 = zero_point(3);
    CHECK(matrix_power(build_lax(z3, LaxClass::even).entries, 3).trace() == doctest::Approx(6.0));
    CHECK(matrix_power(build_lax(z3, LaxClass::odd).entries, 3).trace() == doctest::Approx(-6.0));
    CHECK(trace_relation_check(z3, 1e-12).passed);
    const PhasePoint z2 = zero_point(2);
    CHECK(matrix_power(build_lax(z2, LaxClass::even).entries, 2).trace() == doctest::Approx(8.0));
    CHECK(matrix_power(build_lax(z2, LaxClass::odd).entries, 2).trace() == doctest::Approx(0.0));
    CHECK(trace_relation_check(z2, 1e-12).passed);
}

TEST_CASE("characteristic polynomials at the origin")
{
    const PhasePoint z = zero_point(3);
    const Vector a = char_poly_newton(build_lax(z, LaxClass::even).entries);
    const Vector b = char_poly_newton(build_lax(z, LaxClass::odd).entries);
    CHECK(max_abs(a - (Vector(4) << -2, -3, 0, 1).finished()) < 1e-14);
    CHECK(max_abs(b - (Vector(4) << 2, -3, 0, 1).finished()) < 1e-14);
    const std::vector<double> grid{-2.0, -0.5, 0.0, 1.0, 3.0};
    const CharPolyReport rep = char_poly_offset(z, grid, 1e-10);
    CHECK(rep.passed);
    CHECK(rep.constant == doctest::Approx(-4.0));
    CHECK(std::abs(rep.coefficient_differences[1]) < 1e-14);
    CHECK(std::abs(rep.coefficient_differences[2]) < 1e-14);
}

TEST_CASE("bond index form")
{
    Gen g(11);
    for (int n = 3; n <= 6; ++n) {
        const PhasePoint z = g.point(n);
        const SignVector eps = g.signs(n);
        const Matrix m = bond_antisymmetric(z, eps);
        CHECK(max_abs(m + m.transpose()) == 0.0);
        for (int r = 0; r < n; ++r)
            CHECK(m(r, (r + 1) % n) == doctest::Approx(eps[r] * z.b()[r]).epsilon(1e-15));
    }
}
