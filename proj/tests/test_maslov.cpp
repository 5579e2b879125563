#include "doctest.h"

#include "errors.hpp"
#include "maslov.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace toda;
using toda::testing::Gen;
using toda::testing::zero_point;

namespace {

ClosedCurve small_loop(const PhasePoint& centre, double radius)
{
    const Vector z0 = centre.stacked();
    const int n = centre.n();
    return ClosedCurve(
        [z0, radius, n](double t) {
            Vector d = Vector::Zero(2 * n);
            d[0] = radius * std::cos(2 * std::numbers::pi * t);
            d[n] = radius * std::sin(2 * std::numbers::pi * t);
            return PhasePoint::from_stacked(z0 + d);
        },
        64);
}

// Loop in the (q_1 - q_2, p_1 - p_2) plane around the two-particle equilibrium.
ClosedCurve two_particle_loop(double radius)
{
    return ClosedCurve(
        [radius](double t) {
            const double x = radius * std::cos(2 * std::numbers::pi * t);
            const double y = radius * std::sin(2 * std::numbers::pi * t);
            Vector q(2);
            q << x / 2, -x / 2;
            Vector p(2);
            p << y / 2, -y / 2;
            return PhasePoint(q, p);
        },
        64);
}

} // namespace

TEST_CASE("oscillator calibration")
{
    CHECK(kCalibrationSign == -1);
    for (int n : {1, 2, 3}) {
        const MaslovResult m = harmonic_oscillator_loop(n);
        CHECK(m.mu == 2);
        CHECK(m.calibration_sign == kCalibrationSign);
    }
}

TEST_CASE("constant curve has trivial holonomy")
{
    Gen g(31);
    const PhasePoint z = g.point(4);
    const ClosedCurve c([z](double) { return z; }, 16);
    const HolonomyResult h = transport_eigenvectors(c);
    for (int s : h.gamma)
        CHECK(s == 1);
    for (int s : h.gammabar)
        CHECK(s == 1);
    CHECK(maslov_index(c).mu == 0);
}

TEST_CASE("two-particle loop around the equilibrium line")
{
    const ClosedCurve loop = two_particle_loop(0.1);
    const HolonomyCheck h = check_holonomy_theorem(loop);
    CHECK(h.holonomy.gamma == std::vector<int>{1, 1});
    CHECK(h.holonomy.gammabar == std::vector<int>{-1, -1});
    CHECK(std::abs(h.maslov.mu) == 2);
    CHECK(h.maslov_sign == -1);
    CHECK(h.holonomy.even_product == -1);
    CHECK(h.passed);
}

TEST_CASE("regular contractible loops")
{
    Gen g(32);
    for (int n = 2; n <= 5; ++n) {
        const PhasePoint z = g.point(n);
        const HolonomyCheck h = check_holonomy_theorem(small_loop(z, 0.01));
        CHECK(h.maslov.mu == 0);
        for (int s : h.holonomy.gamma)
            CHECK(s == 1);
        for (int s : h.holonomy.gammabar)
            CHECK(s == 1);
        CHECK(h.passed);
    }
}

TEST_CASE("orientation, parameterization and refinement")
{
    const ClosedCurve loop = two_particle_loop(0.2);
    const MaslovResult m = maslov_index(loop);
    CHECK(m.mu % 2 == 0);
    CHECK(maslov_index(loop.reversed()).mu == -m.mu);
    CHECK(maslov_index(loop.reparameterized()).mu == m.mu);
    const HolonomyResult a = transport_eigenvectors(loop);
    const HolonomyResult b = transport_eigenvectors(loop.with_samples(128));
    CHECK(a.gamma == b.gamma);
    CHECK(a.gammabar == b.gammabar);
    CHECK(maslov_index(loop.with_samples(128)).mu == m.mu);
}

TEST_CASE("sampled loops")
{
    Gen g(33);
    const PhasePoint z = g.point(3);
    std::vector<PhasePoint> pts;
    for (int k = 0; k < 12; ++k) {
        const double t = 2 * std::numbers::pi * k / 12;
        Vector s = z.stacked();
        s[0] += 0.01 * std::cos(t);
        s[3] += 0.01 * std::sin(t);
        pts.push_back(PhasePoint::from_stacked(s));
    }
    const ClosedCurve c = ClosedCurve::from_samples(pts);
    CHECK(c(0.0).stacked() == c(1.0).stacked());
    CHECK(maslov_index(c).mu == 0);
}

TEST_CASE("loops around codimension-two singular points")
{
    for (LaxClass cls : {LaxClass::even, LaxClass::odd}) {
        const PairTarget t = allowed_pairs(cls, 3).front();
        const SingularPoint sp = find_singular(perturbed_omega_seed(3, {t}, 1e-2), {t});
        const HolonomyCheck h = check_holonomy_theorem(circle_around(sp.z, t, 1e-3));
        CHECK(h.passed);
        CHECK(h.maslov_sign == -1);
        CHECK(h.holonomy.even_product == -1);
        CHECK(h.holonomy.odd_product == -1);
        const std::vector<int>& side = cls == LaxClass::even ? h.holonomy.gamma : h.holonomy.gammabar;
        CHECK(side[t.first] == -1);
        CHECK(side[t.first + 1] == -1);
    }
}

TEST_CASE("holonomy products over all positions are trivial")
{
    const PairTarget t = allowed_pairs(LaxClass::odd, 4).back();
    const SingularPoint sp = find_singular(perturbed_omega_seed(4, {t}, 1e-2), {t});
    const HolonomyResult h = transport_eigenvectors(circle_around(sp.z, t, 1e-3));
    int pe = 1;
    int po = 1;
    for (int s : h.gamma)
        pe *= s;
    for (int s : h.gammabar)
        po *= s;
    CHECK(pe == 1);
    CHECK(po == 1);
    CHECK(h.even_product == h.odd_product);
}

TEST_CASE("enclosed singular points")
{
    const PairTarget t{LaxClass::odd, 0};
    const PhasePoint z = omega_point(2).z;
    const NormalPlane np = normal_plane(z, t);
    CHECK(np.dxi.dot(np.a) == doctest::Approx(1.0));
    CHECK(std::abs(np.dxi.dot(np.b)) < 1e-12);
    CHECK(np.deta.dot(np.b) == doctest::Approx(1.0));
    CHECK(np.symplectic_area > 0.0);

    const EnclosureReport one = enclosure_count_check(single_point_disk(z, t, 0.05));
    CHECK(one.sigmas == std::vector<int>{1});
    CHECK(one.maslov.mu == -2);
    CHECK(one.passed);
    const EnclosureReport rev = enclosure_count_check(single_point_disk(z, t, 0.05).reversed());
    CHECK(rev.maslov.mu == 2);
    CHECK(rev.passed);
    const EnclosureReport two = enclosure_count_check(two_point_disk(z, t, 0.05, 0.5, 0.1));
    CHECK(two.sigmas.size() == 2);
    CHECK(two.maslov.mu == two.expected);
    CHECK(two.passed);
}

TEST_CASE("curves through singular points are rejected")
{
    const ClosedCurve through = circle_around(zero_point(3), {LaxClass::odd, 0}, 1e-12);
    CHECK_THROWS_AS(transport_eigenvectors(through), ConvergenceError);
    CHECK_THROWS_AS(ClosedCurve([](double) { return zero_point(2); }, 0), ArgumentError);
}
