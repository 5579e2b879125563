#include "maslov.hpp"

#include "dynamics.hpp"
#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace toda {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double omega_form(const Vector& u, const Vector& v)
{
    const auto n = u.size() / 2;
    return u.head(n).dot(v.tail(n)) - u.tail(n).dot(v.head(n));
}

// X_f = J grad f with grad f stacked (dq, dp).
Vector hamiltonian_field(const Vector& grad)
{
    const auto n = grad.size() / 2;
    Vector x(2 * n);
    x << grad.tail(n), -grad.head(n);
    return x;
}

int sign_of(double x) { return x < 0 ? -1 : 1; }

class Transporter {
public:
    Transporter(const ClosedCurve& curve, LaxClass c, const TransportOptions& options)
        : curve_(curve), class_(c), options_(options)
    {
    }

    std::vector<int> run()
    {
        const Matrix start = basis_at(0.0);
        Matrix current = start;
        const int steps = std::max(1, curve_.base_samples());
        for (int i = 1; i <= steps; ++i)
            current = advance(static_cast<double>(i - 1) / steps, current, static_cast<double>(i) / steps, 0);
        std::vector<int> signs(static_cast<std::size_t>(start.cols()));
        for (Eigen::Index k = 0; k < start.cols(); ++k)
            signs[static_cast<std::size_t>(k)] = sign_of(current.col(k).dot(start.col(k)));
        return signs;
    }

    int evaluations() const noexcept { return evaluations_; }

private:
    Matrix basis_at(double t)
    {
        ++evaluations_;
        const SpectralData spec = decompose(build_lax(curve_(t), class_), options_.degeneracy_tol);
        if (!spec.degenerate_pairs.empty()) {
            std::ostringstream msg;
            msg << "curve meets a degenerate point of the " << to_string(class_) << " class at t = " << t
                << " (pair " << PairTarget{class_, spec.degenerate_pairs.front()}.to_string() << ")";
            throw ConvergenceError(msg.str());
        }
        return spec.vectors;
    }

    Matrix advance(double t0, const Matrix& previous, double t1, int depth)
    {
        Matrix next = basis_at(t1);
        for (Eigen::Index k = 0; k < next.cols(); ++k) {
            const double overlap = previous.col(k).dot(next.col(k));
            if (std::abs(overlap) <= options_.min_overlap) {
                if (depth >= options_.max_depth) {
                    std::ostringstream msg;
                    msg << "refinement failed for " << to_string(class_) << " eigenvector " << k + 1 << " near t = "
                        << t1 << " (overlap " << overlap << ")";
                    throw ConvergenceError(msg.str());
                }
                const double mid = 0.5 * (t0 + t1);
                const Matrix halfway = advance(t0, previous, mid, depth + 1);
                return advance(mid, halfway, t1, depth + 1);
            }
            if (overlap < 0)
                next.col(k) *= -1.0;
        }
        return next;
    }

    const ClosedCurve& curve_;
    LaxClass class_;
    TransportOptions options_;
    int evaluations_ = 0;
};

class Unwrapper {
public:
    Unwrapper(const FrameMap& frame, const WindingOptions& options) : frame_(frame), options_(options) {}

    MaslovResult run(int base_samples)
    {
        const int steps = std::max(1, base_samples);
        double angle = phase_at(0.0);
        trace_.push_back({0.0, 0.0});
        for (int i = 1; i <= steps; ++i)
            angle = advance(static_cast<double>(i - 1) / steps, angle, static_cast<double>(i) / steps, 0);
        MaslovResult out;
        out.winding = total_ / kTwoPi;
        out.mu = kCalibrationSign * static_cast<int>(std::lround(out.winding));
        out.winding_trace = std::move(trace_);
        return out;
    }

private:
    double phase_at(double t)
    {
        const ComplexMatrix w = frame_(t);
        const ComplexMatrix gram = w.adjoint() * w;
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram);
        const Vector ev = solver.eigenvalues();
        if (ev.minCoeff() <= options_.min_gram_eigenvalue) {
            std::ostringstream msg;
            msg << "Lagrangian frame is rank deficient at t = " << t << " (smallest Gram eigenvalue " << ev.minCoeff()
                << ")";
            throw NumericalError(msg.str());
        }
        const ComplexMatrix inv_sqrt = solver.eigenvectors() *
                                       ev.cwiseSqrt().cwiseInverse().cast<std::complex<double>>().asDiagonal() *
                                       solver.eigenvectors().adjoint();
        const ComplexMatrix u = w * inv_sqrt;
        const std::complex<double> d = u.determinant();
        return std::arg(d * d);
    }

    double advance(double t0, double a0, double t1, int depth)
    {
        const double a1 = phase_at(t1);
        const double jump = std::remainder(a1 - a0, kTwoPi);
        if (std::abs(jump) >= options_.max_jump) {
            if (depth >= options_.max_depth) {
                std::ostringstream msg;
                msg << "phase unwrapping failed near t = " << t1 << " (jump " << jump << ")";
                throw ConvergenceError(msg.str());
            }
            const double mid = 0.5 * (t0 + t1);
            const double am = advance(t0, a0, mid, depth + 1);
            return advance(mid, am, t1, depth + 1);
        }
        total_ += jump;
        trace_.push_back({t1, total_});
        return a1;
    }

    const FrameMap& frame_;
    WindingOptions options_;
    double total_ = 0.0;
    std::vector<WindingSample> trace_;
};

} // namespace

ClosedCurve::ClosedCurve(Map map, int base_samples) : map_(std::move(map)), base_samples_(base_samples)
{
    if (!map_)
        throw ArgumentError("curve needs a parameterization");
    if (base_samples_ < 1)
        throw ArgumentError("curve needs at least one sample interval");
}

ClosedCurve ClosedCurve::from_samples(std::vector<PhasePoint> samples)
{
    if (samples.empty())
        throw ArgumentError("curve needs at least one sample");
    const int n = samples.front().n();
    for (const auto& s : samples)
        if (s.n() != n)
            throw ArgumentError("curve samples differ in particle count");
    if (samples.size() == 1 || samples.back().stacked() != samples.front().stacked())
        samples.push_back(samples.front());
    const int segments = static_cast<int>(samples.size()) - 1;
    auto points = std::make_shared<std::vector<PhasePoint>>(std::move(samples));
    return ClosedCurve(
        [points, segments](double t) {
            const double x = std::clamp(t, 0.0, 1.0) * segments;
            const int i = std::min(static_cast<int>(std::floor(x)), segments - 1);
            const double f = x - i;
            const auto& a = (*points)[static_cast<std::size_t>(i)];
            const auto& b = (*points)[static_cast<std::size_t>(i + 1)];
            if (f == 0.0)
                return a;
            return PhasePoint::from_stacked((1.0 - f) * a.stacked() + f * b.stacked());
        },
        segments);
}

ClosedCurve ClosedCurve::reversed() const
{
    Map m = map_;
    return ClosedCurve([m](double t) { return m(1.0 - t); }, base_samples_);
}

ClosedCurve ClosedCurve::reparameterized() const
{
    Map m = map_;
    return ClosedCurve([m](double t) { return m(t * t); }, base_samples_);
}

ClosedCurve ClosedCurve::with_samples(int base_samples) const { return ClosedCurve(map_, base_samples); }

HolonomyResult transport_eigenvectors(const ClosedCurve& curve, const TransportOptions& options)
{
    HolonomyResult out;
    Transporter even(curve, LaxClass::even, options);
    out.gamma = even.run();
    Transporter odd(curve, LaxClass::odd, options);
    out.gammabar = odd.run();
    out.evaluations = even.evaluations() + odd.evaluations();
    for (std::size_t k = 0; k < out.gamma.size(); ++k) {
        int& product = (k % 2 == 1) ? out.even_product : out.odd_product;
        product *= out.gamma[k] * out.gammabar[k];
    }
    return out;
}

MaslovResult lagrangian_winding(const FrameMap& frame, int base_samples, const WindingOptions& options)
{
    return Unwrapper(frame, options).run(base_samples);
}

ComplexMatrix integrals_frame(const PhasePoint& z)
{
    const int n = z.n();
    const Matrix jac = integrals_jacobian(z);
    ComplexMatrix w(n, n);
    for (int j = 0; j < n; ++j) {
        const Vector x = hamiltonian_field(jac.row(j).transpose());
        const double norm = x.norm();
        if (norm == 0.0)
            throw NumericalError("vanishing Hamiltonian vector field for F_" + std::to_string(j + 1));
        for (int r = 0; r < n; ++r)
            w(r, j) = std::complex<double>(x[r], x[n + r]) / norm;
    }
    return w;
}

MaslovResult maslov_index(const ClosedCurve& curve, const WindingOptions& options)
{
    return lagrangian_winding([&curve](double t) { return integrals_frame(curve(t)); }, curve.base_samples(), options);
}

MaslovResult harmonic_oscillator_loop(int n, int base_samples)
{
    if (n < 1)
        throw ArgumentError("need at least one oscillator");
    auto frame = [n](double t) {
        const double theta = kTwoPi * t;
        ComplexMatrix w = ComplexMatrix::Zero(n, n);
        for (int j = 0; j < n; ++j) {
            // flow of H_1 from (q, p) = (1, 0); the others sit at a fixed point of their circles
            const double q = j == 0 ? std::cos(theta) : 0.7;
            const double p = j == 0 ? -std::sin(theta) : 0.3;
            w(j, j) = std::complex<double>(p, -q) / std::hypot(p, q);
        }
        return w;
    };
    return lagrangian_winding(frame, base_samples);
}

HolonomyCheck check_holonomy_theorem(const ClosedCurve& curve, const TransportOptions& transport,
                                     const WindingOptions& winding)
{
    HolonomyCheck out;
    out.holonomy = transport_eigenvectors(curve, transport);
    out.maslov = maslov_index(curve, winding);
    out.maslov_sign = ((out.maslov.mu / 2) % 2 == 0) ? 1 : -1;
    int all_even = 1;
    int all_odd = 1;
    for (int g : out.holonomy.gamma)
        all_even *= g;
    for (int g : out.holonomy.gammabar)
        all_odd *= g;
    out.passed = out.maslov.mu % 2 == 0 && all_even == 1 && all_odd == 1 &&
                 out.holonomy.even_product == out.holonomy.odd_product &&
                 out.maslov_sign == out.holonomy.even_product;
    return out;
}

NormalPlane normal_plane(const PhasePoint& z, const PairTarget& pair, double degeneracy_tol)
{
    const BlockFrame frame = make_block_frame(z, {pair}, degeneracy_tol);
    const auto diffs = block_differentials(z, frame);
    const Vector& dxi = diffs.front().dxi;
    const Vector& deta = diffs.front().deta;
    const Vector x_xi = hamiltonian_field(dxi);
    const Vector x_eta = hamiltonian_field(deta);
    Eigen::Matrix2d k;
    k << dxi.dot(x_xi), dxi.dot(x_eta), deta.dot(x_xi), deta.dot(x_eta);
    if (std::abs(k.determinant()) < 1e-14)
        throw NumericalError("normal plane of pair " + pair.to_string() + " is degenerate");
    const Eigen::Matrix2d inv = k.inverse();
    NormalPlane np;
    np.a = inv(0, 0) * x_xi + inv(1, 0) * x_eta;
    np.b = inv(0, 1) * x_xi + inv(1, 1) * x_eta;
    np.dxi = dxi;
    np.deta = deta;
    np.symplectic_area = omega_form(np.a, np.b);
    return np;
}

ClosedCurve circle_around(const PhasePoint& z, const PairTarget& pair, double radius, int samples,
                          double degeneracy_tol)
{
    if (!(radius > 0.0))
        throw ArgumentError("circle radius must be positive");
    const NormalPlane np = normal_plane(z, pair, degeneracy_tol);
    const Vector center = z.stacked();
    return ClosedCurve(
        [center, np, radius](double t) {
            const double theta = kTwoPi * t;
            return PhasePoint::from_stacked(center + radius * (std::cos(theta) * np.a + std::sin(theta) * np.b));
        },
        samples);
}

ClosedCurve DiskPatch::boundary() const
{
    auto m = map;
    return ClosedCurve(
        [m](double t) {
            const double theta = kTwoPi * t;
            return m(std::cos(theta), std::sin(theta));
        },
        boundary_samples);
}

DiskPatch DiskPatch::reversed() const
{
    DiskPatch out = *this;
    auto m = map;
    out.map = [m](double u, double v) { return m(u, -v); };
    for (auto& w : out.singular_preimages)
        w.second = -w.second;
    return out;
}

DiskPatch single_point_disk(const PhasePoint& z, const PairTarget& pair, double radius)
{
    NormalPlane np = normal_plane(z, pair);
    if (np.symplectic_area < 0)
        std::swap(np.a, np.b);
    const Vector center = z.stacked();
    DiskPatch disk;
    disk.map = [center, np, radius](double u, double v) {
        return PhasePoint::from_stacked(center + radius * (u * np.a + v * np.b));
    };
    disk.singular_preimages = {{0.0, 0.0}};
    disk.pairs = {pair};
    return disk;
}

DiskPatch two_point_disk(const PhasePoint& z, const PairTarget& pair, double rho, double delta, double shift)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw ArgumentError("two-point disk needs 0 < delta < 1");
    NormalPlane np = normal_plane(z, pair);
    if (np.symplectic_area < 0)
        std::swap(np.a, np.b);
    const int n = z.n();
    Vector e_p = Vector::Zero(2 * n);
    e_p.tail(n).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
    const Vector center = z.stacked();
    DiskPatch disk;
    disk.map = [center, np, rho, delta, shift, e_p](double u, double v) {
        const std::complex<double> w(u, v);
        const std::complex<double> h = w * w - delta * delta;
        return PhasePoint::from_stacked(center + rho * (h.real() * np.a + h.imag() * np.b) + shift * u * e_p);
    };
    disk.singular_preimages = {{-delta, 0.0}, {delta, 0.0}};
    disk.pairs = {pair, pair};
    return disk;
}

EnclosureReport enclosure_count_check(const DiskPatch& disk, const WindingOptions& options, double degeneracy_tol)
{
    if (disk.singular_preimages.size() != disk.pairs.size())
        throw ArgumentError("each singular preimage needs a pair");
    EnclosureReport rep;
    int total = 0;
    for (std::size_t j = 0; j < disk.pairs.size(); ++j) {
        const auto [u, v] = disk.singular_preimages[j];
        if (std::hypot(u, v) > 0.9)
            throw ArgumentError("singular point too close to the disk boundary");
        const PhasePoint zj = disk.map(u, v);
        const NormalPlane np = normal_plane(zj, disk.pairs[j], degeneracy_tol);
        const double h = 1e-6;
        const Vector su = (disk.map(u + h, v).stacked() - disk.map(u - h, v).stacked()) / (2 * h);
        const Vector sv = (disk.map(u, v + h).stacked() - disk.map(u, v - h).stacked()) / (2 * h);
        auto project = [&np](const Vector& x) -> Vector { return np.dxi.dot(x) * np.a + np.deta.dot(x) * np.b; };
        const int sigma = sign_of(omega_form(project(su), project(sv)));
        rep.sigmas.push_back(sigma);
        total += sigma;
    }
    rep.maslov = maslov_index(disk.boundary(), options);
    rep.expected = -2 * total;
    rep.passed = rep.maslov.mu == rep.expected;
    return rep;
}

} // namespace toda
