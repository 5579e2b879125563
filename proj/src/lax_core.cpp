#include "lax_core.hpp"

#include "errors.hpp"

#include <cmath>
#include <sstream>

namespace toda {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

} // namespace

const char* to_string(LaxClass c) noexcept { return c == LaxClass::even ? "even" : "odd"; }

LaxClass other(LaxClass c) noexcept { return c == LaxClass::even ? LaxClass::odd : LaxClass::even; }

PhasePoint::PhasePoint(Vector q, Vector p) : q_(std::move(q)), p_(std::move(p))
{
    if (q_.size() < 2)
        throw ArgumentError("phase point needs n >= 2 particles");
    if (q_.size() != p_.size())
        throw ArgumentError("q and p must have the same length");
    const int n = this->n();
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(q_[j]) || !std::isfinite(p_[j]))
            throw DomainError("non-finite coordinate at index " + std::to_string(j), j);
    }
    b_.resize(n);
    for (int j = 0; j < n; ++j) {
        const double d = q_[j] - q_[wrap(j + 1, n)];
        if (std::abs(d) > kMaxBondSeparation) {
            std::ostringstream msg;
            msg << "bond " << j + 1 << " overflows: |q_" << j + 1 << " - q_" << wrap(j + 1, n) + 1 << "| = "
                << std::abs(d) << " exceeds " << kMaxBondSeparation;
            throw DomainError(msg.str(), j);
        }
        b_[j] = std::exp(0.5 * d);
    }
}

PhasePoint PhasePoint::from_stacked(const Vector& z)
{
    if (z.size() % 2 != 0)
        throw ArgumentError("stacked phase vector must have even length");
    const auto n = z.size() / 2;
    return PhasePoint(z.head(n), z.tail(n));
}

Vector PhasePoint::stacked() const
{
    Vector z(2 * n());
    z << q_, p_;
    return z;
}

SignVector::SignVector(std::vector<int> eps) : eps_(std::move(eps))
{
    for (int e : eps_) {
        if (e != 1 && e != -1)
            throw ArgumentError("sign vector entries must be +1 or -1");
    }
}

SignVector SignVector::all_plus(int n) { return SignVector(std::vector<int>(static_cast<std::size_t>(n), 1)); }

SignVector SignVector::odd_representative(int n)
{
    std::vector<int> eps(static_cast<std::size_t>(n), 1);
    eps.back() = -1;
    return SignVector(std::move(eps));
}

SignVector SignVector::of_class(LaxClass c, int n)
{
    return c == LaxClass::even ? all_plus(n) : odd_representative(n);
}

int SignVector::parity() const noexcept
{
    int s = 1;
    for (int e : eps_)
        s *= e;
    return s;
}

SignVector SignVector::operator*(const SignVector& other) const
{
    if (other.n() != n())
        throw ArgumentError("sign vectors differ in length");
    std::vector<int> out(eps_.size());
    for (std::size_t i = 0; i < eps_.size(); ++i)
        out[i] = eps_[i] * other.eps_[i];
    return SignVector(std::move(out));
}

LaxMatrix build_lax(const PhasePoint& z, const SignVector& eps)
{
    const int n = z.n();
    if (eps.n() != n)
        throw ArgumentError("sign vector length does not match particle count");
    Matrix l = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        l(r, r) += z.p()[r];
        const int s = wrap(r + 1, n);
        const double off = eps[r] * z.b()[r];
        l(r, s) += off;
        l(s, r) += off;
    }
    return LaxMatrix{std::move(l), eps};
}

LaxMatrix build_lax(const PhasePoint& z, LaxClass c) { return build_lax(z, SignVector::of_class(c, z.n())); }

std::vector<Matrix> lax_partials(const PhasePoint& z, const SignVector& eps)
{
    const int n = z.n();
    std::vector<Matrix> d(static_cast<std::size_t>(2 * n), Matrix::Zero(n, n));
    // db_r/dq_k = b_r (delta_{rk} - delta_{r+1,k}) / 2
    for (int r = 0; r < n; ++r) {
        const int s = wrap(r + 1, n);
        const double half = 0.5 * eps[r] * z.b()[r];
        Matrix& dr = d[static_cast<std::size_t>(r)];
        dr(r, s) += half;
        dr(s, r) += half;
        Matrix& ds = d[static_cast<std::size_t>(s)];
        ds(r, s) -= half;
        ds(s, r) -= half;
    }
    for (int k = 0; k < n; ++k)
        d[static_cast<std::size_t>(n + k)](k, k) = 1.0;
    return d;
}

Matrix bond_antisymmetric(const PhasePoint& z, const SignVector& eps)
{
    const int n = z.n();
    Matrix m = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        const int s = wrap(r + 1, n);
        const double off = eps[r] * z.b()[r];
        m(r, s) += off;
        m(s, r) -= off;
    }
    return m;
}

Matrix matrix_power(const Matrix& a, int k)
{
    if (k < 0)
        throw ArgumentError("negative matrix power");
    Matrix out = Matrix::Identity(a.rows(), a.cols());
    for (int i = 0; i < k; ++i)
        out = out * a;
    return out;
}

GeneratorMatrix build_generator(const PhasePoint& z, int j, LaxClass c)
{
    const int n = z.n();
    if (j < 1 || j > n)
        throw ArgumentError("flow index " + std::to_string(j) + " outside [1, " + std::to_string(n) + "]");
    const Matrix power = matrix_power(build_lax(z, other(c)).entries, j - 1);
    Matrix upper = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r)
        for (int s = r + 1; s < n; ++s)
            upper(r, s) = 0.5 * power(r, s);
    return GeneratorMatrix{upper - upper.transpose(), j, c};
}

Vector integrals(const PhasePoint& z)
{
    const int n = z.n();
    const Matrix l = build_lax(z, LaxClass::even).entries;
    Vector f(n);
    Matrix power = Matrix::Identity(n, n);
    for (int j = 1; j <= n; ++j) {
        power = power * l;
        f[j - 1] = power.trace() / j;
    }
    return f;
}

OffBandReport off_band_check(const PhasePoint& z, int j, double tol)
{
    const int n = z.n();
    if (j < 1 || j > n)
        throw ArgumentError("flow index " + std::to_string(j) + " outside [1, " + std::to_string(n) + "]");
    const Matrix l = build_lax(z, LaxClass::even).entries;
    const Matrix lbar = build_lax(z, LaxClass::odd).entries;
    const Matrix diff = matrix_power(l, j) - matrix_power(lbar, j);

    OffBandReport rep;
    rep.n = n;
    rep.j = j;
    const double norm =
        Eigen::SelfAdjointEigenSolver<Matrix>(l, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
    rep.zero_band_scale = std::max(1.0, std::pow(norm, j));

    // zero band: (r, r+d) with 0 <= d <= n-j-1 and r+d inside the matrix
    for (int r = 0; r < n; ++r)
        for (int d = 0; d <= n - j - 1 && r + d < n; ++d)
            rep.zero_band_residual = std::max(rep.zero_band_residual, std::abs(diff(r, r + d)));

    // first nonzero diagonal: (r, r+n-j), r = 1..j (one-based)
    const Vector& b = z.b();
    for (int r = 0; r < j; ++r) {
        double expected = 4.0;
        if (j < n) {
            expected = 2.0;
            for (int k = 1; k <= j; ++k)
                expected *= b[wrap(r - k, n)];
        }
        const double got = diff(r, r + n - j);
        rep.first_diagonal_residual = std::max(rep.first_diagonal_residual, std::abs(got - expected) / std::abs(expected));
    }
    rep.passed = rep.zero_band_residual < tol * rep.zero_band_scale && rep.first_diagonal_residual < tol;
    return rep;
}

TraceRelationReport trace_relation_check(const PhasePoint& z, double tol)
{
    const int n = z.n();
    const Matrix l = build_lax(z, LaxClass::even).entries;
    const Matrix lbar = build_lax(z, LaxClass::odd).entries;
    TraceRelationReport rep;
    Matrix pl = Matrix::Identity(n, n);
    Matrix pb = Matrix::Identity(n, n);
    for (int j = 1; j <= n; ++j) {
        pl = pl * l;
        pb = pb * lbar;
        const double tl = pl.trace();
        const double tb = pb.trace();
        if (j < n)
            rep.lower_residual = std::max(rep.lower_residual, std::abs(tl - tb) / std::max(1.0, std::abs(tl)));
        else
            rep.top_residual = std::abs(tl - tb - 4.0 * n) / (4.0 * n);
    }
    rep.passed = rep.lower_residual < tol && rep.top_residual < tol;
    return rep;
}

Vector char_poly_newton(const Matrix& a)
{
    const int n = static_cast<int>(a.rows());
    Vector power_sums(n + 1);
    Matrix pk = Matrix::Identity(n, n);
    for (int k = 1; k <= n; ++k) {
        pk = pk * a;
        power_sums[k] = pk.trace();
    }
    // elementary symmetric functions: k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i
    Vector e = Vector::Zero(n + 1);
    e[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (int i = 1; i <= k; ++i)
            acc += ((i % 2 == 1) ? 1.0 : -1.0) * e[k - i] * power_sums[i];
        e[k] = acc / k;
    }
    Vector coeffs(n + 1);
    for (int m = 0; m <= n; ++m)
        coeffs[m] = (((n - m) % 2 == 0) ? 1.0 : -1.0) * e[n - m];
    return coeffs;
}

CharPolyReport char_poly_offset(const PhasePoint& z, std::span<const double> x_grid, double tol)
{
    if (x_grid.empty())
        throw ArgumentError("char_poly_offset needs at least one sample point");
    const int n = z.n();
    const Matrix l = build_lax(z, LaxClass::even).entries;
    const Matrix lbar = build_lax(z, LaxClass::odd).entries;
    const Matrix id = Matrix::Identity(n, n);

    std::vector<double> diffs;
    diffs.reserve(x_grid.size());
    for (double x : x_grid) {
        const double dl = (x * id - l).partialPivLu().determinant();
        const double db = (x * id - lbar).partialPivLu().determinant();
        diffs.push_back(dl - db);
    }
    CharPolyReport rep;
    double sum = 0.0;
    for (double d : diffs)
        sum += d;
    rep.constant = sum / static_cast<double>(diffs.size());
    for (double d : diffs)
        rep.max_deviation = std::max(rep.max_deviation, std::abs(d - rep.constant));
    rep.coefficient_differences = (char_poly_newton(l) - char_poly_newton(lbar)).head(n);
    rep.magnitude_residual = std::abs(std::abs(rep.constant) - 4.0);
    rep.passed = rep.max_deviation < tol && rep.magnitude_residual < tol;
    return rep;
}

} // namespace toda
