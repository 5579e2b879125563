#include "doctest.h"

#include "errors.hpp"
#include "singularity.hpp"
#include "spectral.hpp"
#include "support.hpp"

#include <cmath>

using namespace toda;
using toda::testing::Gen;
using toda::testing::max_abs;
using toda::testing::zero_point;

TEST_CASE("spectra at the origin")
{
    const SpectralData even = decompose(build_lax(zero_point(3), LaxClass::even));
    CHECK(even.values[0] == doctest::Approx(2.0));
    CHECK(even.values[1] == doctest::Approx(-1.0));
    CHECK(even.values[2] == doctest::Approx(-1.0));
    REQUIRE(even.degenerate_pairs.size() == 1);
    CHECK(even.degenerate_pairs[0] == 1);
    const SpectralData odd = decompose(build_lax(zero_point(3), LaxClass::odd));
    CHECK(odd.values[0] == doctest::Approx(1.0));
    CHECK(odd.values[1] == doctest::Approx(1.0));
    CHECK(odd.values[2] == doctest::Approx(-2.0));
    REQUIRE(odd.degenerate_pairs.size() == 1);
    CHECK(odd.degenerate_pairs[0] == 0);
}

TEST_CASE("generic points carry no degeneracy")
{
    Gen g(3);
    for (int trial = 0; trial < 100; ++trial) {
        const PhasePoint z = g.point(g.integer(2, 8));
        CHECK(decompose(build_lax(z, LaxClass::even)).degenerate_pairs.empty());
        CHECK(decompose(build_lax(z, LaxClass::odd)).degenerate_pairs.empty());
    }
}

TEST_CASE("degenerate basis is deterministic")
{
    const Matrix l = build_lax(zero_point(3), LaxClass::even).entries;
    const SpectralData a = decompose(l);
    const SpectralData b = decompose(l);
    CHECK(max_abs(a.vectors - b.vectors) == 0.0);
    // the first vector of the pair carries the largest possible leading component
    CHECK(a.vectors(0, 1) > 0.0);
    CHECK(std::abs(a.vectors(0, 2)) < 1e-12);
}

TEST_CASE("pair targets")
{
    const PairTarget t = parse_pair_target("odd:1", 3);
    CHECK(t.lax_class == LaxClass::odd);
    CHECK(t.first == 0);
    CHECK(t.to_string() == "odd:1");
    CHECK(parse_pair_target("even:2", 4).first == 1);
    CHECK_THROWS_AS(parse_pair_target("even:1", 3), ArgumentError);
    CHECK_THROWS_AS(parse_pair_target("odd:2", 3), ArgumentError);
    CHECK_THROWS_AS(parse_pair_target("middle:1", 3), ArgumentError);
    CHECK_THROWS_AS(parse_pair_target("odd:x", 3), ArgumentError);
    CHECK(allowed_pairs(LaxClass::even, 5).size() == 2);
    CHECK(allowed_pairs(LaxClass::odd, 5).size() == 2);
    CHECK(allowed_pairs(LaxClass::odd, 4).size() == 2);
    CHECK(allowed_pairs(LaxClass::even, 4).size() == 1);
    CHECK(is_allowed_pair(LaxClass::even, 3, 6));
    CHECK_FALSE(is_allowed_pair(LaxClass::even, 2, 6));
    CHECK_FALSE(is_allowed_pair(LaxClass::odd, 5, 6));
}

TEST_CASE("interlacing chain at the origin")
{
    const InterlacingReport r = interlacing_check(zero_point(3), 1e-12);
    CHECK(r.passed());
    CHECK(r.even_values[0] > r.odd_values[0]);
    CHECK(r.odd_values[0] == doctest::Approx(r.odd_values[1]));
    CHECK(r.odd_values[1] > r.even_values[1]);
    CHECK(r.even_values[1] == doctest::Approx(r.even_values[2]));
    CHECK(r.even_values[2] > r.odd_values[2]);
}

TEST_CASE("momentum shift moves the whole chain")
{
    const double c = 0.37;
    const PhasePoint z(Vector::Zero(3), Vector::Constant(3, c));
    const InterlacingReport a = interlacing_check(zero_point(3), 1e-12);
    const InterlacingReport b = interlacing_check(z, 1e-12);
    CHECK(b.passed());
    CHECK(max_abs(b.even_values - a.even_values - Vector::Constant(3, c)) < 1e-14);
    CHECK(max_abs(b.odd_values - a.odd_values - Vector::Constant(3, c)) < 1e-14);
}

TEST_CASE("annihilating polynomials at the origin")
{
    const SpectralData odd = decompose(build_lax(zero_point(3), LaxClass::odd));
    const AnnihilatorPolynomial tb = annihilator(odd, {LaxClass::odd, 0});
    CHECK(max_abs(tb.coefficients - (Vector(3) << -2, 1, 1).finished()) < 1e-12);
    CHECK(tb.derivative_at_root == doctest::Approx(3.0));
    CHECK(tb.root == doctest::Approx(1.0));

    const SpectralData even = decompose(build_lax(zero_point(3), LaxClass::even));
    const AnnihilatorPolynomial t = annihilator(even, {LaxClass::even, 1});
    CHECK(max_abs(t.coefficients - (Vector(3) << -2, -1, 1).finished()) < 1e-12);
    CHECK(t.derivative_at_root == doctest::Approx(-3.0));
    // simple eigenvalue 2: T'(2) = 3, not zero
    CHECK(t.derivative(2.0) == doctest::Approx(3.0));

    for (const auto& [spec, poly, cls] :
         {std::tuple{odd, tb, LaxClass::odd}, std::tuple{even, t, LaxClass::even}}) {
        const Matrix l = build_lax(zero_point(3), cls).entries;
        Matrix acc = Matrix::Zero(3, 3);
        for (int j = 0; j < 3; ++j)
            acc += poly.coefficients[j] * matrix_power(l, j);
        CHECK(max_abs(acc) < 1e-12);
        for (int a = 0; a < 3; ++a)
            CHECK(std::abs(poly(spec.values[a])) < 1e-12);
    }
    CHECK_THROWS_AS(annihilator(even, {LaxClass::even, 0}), ArgumentError);
}

TEST_CASE("annihilator vanishes to first order at the other double eigenvalues")
{
    for (int n = 4; n <= 7; ++n) {
        const OmegaPoint om = omega_point(n, 0.2, -0.4);
        for (LaxClass c : {LaxClass::even, LaxClass::odd}) {
            const SpectralData d = decompose(build_lax(om.z, c));
            for (int k : d.degenerate_pairs) {
                const AnnihilatorPolynomial t = annihilator(d, {c, k});
                CHECK(std::abs(t.derivative_at_root) > 1e-6);
                for (int other : d.degenerate_pairs)
                    if (other != k)
                        CHECK(std::abs(t.derivative(d.values[other])) < 1e-8);
            }
        }
    }
}

TEST_CASE("block coordinates at the reference point")
{
    const PhasePoint z = zero_point(3);
    const BlockFrame frame = make_block_frame(z);
    REQUIRE(frame.pairs.size() == 2);
    const BlockCoordinates bc = block_coordinates(z, frame);
    for (const auto& pc : bc.pairs) {
        CHECK(std::abs(pc.xi) < 1e-14);
        CHECK(std::abs(pc.eta) < 1e-14);
        const double lambda = frame.spectrum(pc.pair.lax_class).values[pc.pair.first];
        CHECK(pc.tau == doctest::Approx(lambda));
    }
}

TEST_CASE("block coordinates track the gap and their differentials")
{
    Gen g(5);
    const PhasePoint z0 = omega_point(4, 0.1, 0.3).z;
    const BlockFrame frame = make_block_frame(z0);
    const auto diffs = block_differentials(z0, frame);
    REQUIRE(diffs.size() == frame.pairs.size());
    Vector dir(8);
    for (int k = 0; k < 8; ++k)
        dir[k] = g.uniform(-1, 1);
    dir.normalize();
    for (double delta : {1e-3, 5e-4}) {
        const PhasePoint z = PhasePoint::from_stacked(z0.stacked() + delta * dir);
        const BlockCoordinates bc = block_coordinates(z, frame);
        for (std::size_t i = 0; i < bc.pairs.size(); ++i) {
            const PairCoordinates& pc = bc.pairs[i];
            const SpectralData d = decompose(build_lax(z, pc.pair.lax_class), 0.0);
            const double gap = d.values[pc.pair.first] - d.values[pc.pair.first + 1];
            CHECK(std::abs(gap - 2 * std::hypot(pc.xi, pc.eta)) < 20 * delta * delta);
            CHECK(std::abs(pc.xi - delta * diffs[i].dxi.dot(dir)) < 20 * delta * delta);
            CHECK(std::abs(pc.eta - delta * diffs[i].deta.dot(dir)) < 20 * delta * delta);
        }
    }
}

TEST_CASE("frame validity is enforced")
{
    const PhasePoint z0 = zero_point(3);
    const BlockFrame frame = make_block_frame(z0);
    Vector q(3);
    q << 1.5, -1.0, 0.2;
    Vector p(3);
    p << 1.0, -2.0, 0.5;
    CHECK_THROWS_AS(block_coordinates(PhasePoint(q, p), frame), FrameValidityError);
}
