#include "spectral.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace toda {

namespace {

// Index of the entry of largest magnitude; near-ties resolve to the lowest index.
int dominant_index(const Eigen::Ref<const Vector>& v)
{
    const double peak = v.cwiseAbs().maxCoeff();
    for (int i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) >= peak - 1e-12)
            return i;
    return 0;
}

void canonical_sign(Eigen::Ref<Vector> v)
{
    if (v[dominant_index(v)] < 0)
        v = -v;
}

// Rotate an orthonormal pair so the first vector has the largest possible
// leading component; the second one is then sign-fixed.
void canonical_pair(Eigen::Ref<Vector> a, Eigen::Ref<Vector> b)
{
    int m = 0;
    while (m < a.size() && std::hypot(a[m], b[m]) < 1e-8)
        ++m;
    if (m == a.size())
        return;
    const double c = a[m];
    const double s = b[m];
    const double r = std::hypot(c, s);
    const Vector u = (c * a + s * b) / r;
    Vector w = (-s * a + c * b) / r;
    canonical_sign(w);
    a = u;
    b = w;
}

void align_pair(Eigen::Ref<Matrix> pair, const Eigen::Ref<const Matrix>& ref)
{
    const Eigen::Matrix2d overlap = pair.transpose() * ref;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix2d q = svd.matrixU() * svd.matrixV().transpose();
    pair = (pair * q).eval();
}

} // namespace

bool SpectralData::is_degenerate(int first) const
{
    return std::find(degenerate_pairs.begin(), degenerate_pairs.end(), first) != degenerate_pairs.end();
}

SpectralData decompose(const Matrix& symmetric, double degeneracy_tol, const Matrix* reference)
{
    const int n = static_cast<int>(symmetric.rows());
    if (symmetric.cols() != n || n < 1)
        throw ArgumentError("decompose needs a square matrix");
    if (!symmetric.allFinite())
        throw NumericalError("matrix has non-finite entries");
    if (reference && (reference->rows() != n || reference->cols() != n))
        throw ArgumentError("reference basis has the wrong shape");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
    if (solver.info() != Eigen::Success)
        throw NumericalError("symmetric eigensolver did not converge");

    SpectralData out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    out.gaps = Vector::Zero(std::max(0, n - 1));
    for (int k = 0; k + 1 < n; ++k)
        out.gaps[k] = out.values[k] - out.values[k + 1];

    out.degeneracy_threshold = degeneracy_tol * std::max(1.0, out.spectral_range());
    for (int k = 0; k + 1 < n; ++k) {
        if (out.gaps[k] < out.degeneracy_threshold) {
            if (!out.degenerate_pairs.empty() && out.degenerate_pairs.back() == k - 1) {
                std::ostringstream msg;
                msg << "triple degeneracy at eigenvalue positions " << k << ".." << k + 2
                    << " (gaps " << out.gaps[k - 1] << ", " << out.gaps[k] << ")";
                throw NumericalError(msg.str());
            }
            out.degenerate_pairs.push_back(k);
        }
    }

    for (int k = 0; k < n; ++k) {
        if (out.is_degenerate(k)) {
            // Gram-Schmidt inside the eigenspace, then fix the rotation.
            Eigen::HouseholderQR<Matrix> qr(out.vectors.middleCols(k, 2));
            Matrix basis = qr.householderQ() * Matrix::Identity(n, 2);
            if (reference)
                align_pair(basis, reference->middleCols(k, 2));
            else
                canonical_pair(basis.col(0), basis.col(1));
            out.vectors.middleCols(k, 2) = basis;
            ++k;
            continue;
        }
        if (reference) {
            if (out.vectors.col(k).dot(reference->col(k)) < 0)
                out.vectors.col(k) *= -1.0;
        } else {
            canonical_sign(out.vectors.col(k));
        }
    }
    return out;
}

SpectralData decompose(const LaxMatrix& l, double degeneracy_tol, const Matrix* reference)
{
    return decompose(l.entries, degeneracy_tol, reference);
}

std::string PairTarget::to_string() const
{
    return std::string(toda::to_string(lax_class)) + ":" + std::to_string(label());
}

PairTarget parse_pair_target(const std::string& text, int n)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ArgumentError("pair target '" + text + "' must look like even:2 or odd:1");
    const std::string cls = text.substr(0, colon);
    PairTarget t;
    if (cls == "even")
        t.lax_class = LaxClass::even;
    else if (cls == "odd")
        t.lax_class = LaxClass::odd;
    else
        throw ArgumentError("unknown Lax class '" + cls + "' in pair target");
    int label = 0;
    try {
        std::size_t used = 0;
        label = std::stoi(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1)
            throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw ArgumentError("pair target '" + text + "' has a malformed index");
    }
    t.first = label - 1;
    if (!is_allowed_pair(t.lax_class, t.first, n))
        throw ArgumentError("pair target '" + text + "' is not an allowed degeneracy for n = " + std::to_string(n));
    return t;
}

bool is_allowed_pair(LaxClass c, int first, int n)
{
    if (first < 0 || first + 1 >= n)
        return false;
    // one-based label first+1 must be even (L) or odd (Lbar)
    return c == LaxClass::even ? (first % 2 == 1) : (first % 2 == 0);
}

std::vector<PairTarget> allowed_pairs(LaxClass c, int n)
{
    std::vector<PairTarget> out;
    for (int k = 0; k + 1 < n; ++k)
        if (is_allowed_pair(c, k, n))
            out.push_back(PairTarget{c, k});
    return out;
}

InterlacingReport interlacing_check(const PhasePoint& z, double tol)
{
    const int n = z.n();
    InterlacingReport rep;
    rep.even_values = decompose(build_lax(z, LaxClass::even), 0.0).values;
    rep.odd_values = decompose(build_lax(z, LaxClass::odd), 0.0).values;

    // Merged chain: lambda_1, (lbar_1, lbar_2), (lambda_2, lambda_3), ...
    struct Entry {
        bool odd;
        int index;
        int group;
    };
    std::vector<Entry> chain{{false, 0, 0}};
    int next_even = 1;
    int next_odd = 0;
    for (int m = 1; m <= n - 1; ++m) {
        if (m % 2 == 1) {
            chain.push_back({true, next_odd++, m});
            chain.push_back({true, next_odd++, m});
        } else {
            chain.push_back({false, next_even++, m});
            chain.push_back({false, next_even++, m});
        }
    }
    if (next_even < n)
        chain.push_back({false, next_even, n});
    if (next_odd < n)
        chain.push_back({true, next_odd, n});

    const double range = std::max({1.0, rep.even_values[0] - rep.even_values[n - 1],
                                   rep.odd_values[0] - rep.odd_values[n - 1]});
    const double slack = tol * range;
    auto value = [&](const Entry& e) { return e.odd ? rep.odd_values[e.index] : rep.even_values[e.index]; };
    auto name = [](const Entry& e) { return std::string(e.odd ? "lbar_" : "lambda_") + std::to_string(e.index + 1); };

    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const Entry& a = chain[i];
        const Entry& b = chain[i + 1];
        const double margin = value(a) - value(b);
        const bool strict = a.group != b.group;
        const bool ok = strict ? margin > slack : margin >= -slack;
        if (!ok) {
            rep.violations.push_back(
                {name(a) + (strict ? " > " : " >= ") + name(b) + " violated", margin});
        }
    }
    return rep;
}

BlockFrame make_block_frame(const PhasePoint& z, double degeneracy_tol)
{
    SpectralData even = decompose(build_lax(z, LaxClass::even), degeneracy_tol);
    SpectralData odd = decompose(build_lax(z, LaxClass::odd), degeneracy_tol);
    std::vector<PairTarget> pairs;
    for (int k : even.degenerate_pairs)
        pairs.push_back({LaxClass::even, k});
    for (int k : odd.degenerate_pairs)
        pairs.push_back({LaxClass::odd, k});
    return BlockFrame{z, std::move(even), std::move(odd), std::move(pairs)};
}

BlockFrame make_block_frame(const PhasePoint& z, std::vector<PairTarget> pairs, double degeneracy_tol)
{
    for (const auto& t : pairs)
        if (t.first < 0 || t.first + 1 >= z.n())
            throw ArgumentError("pair target " + t.to_string() + " out of range");
    return BlockFrame{z, decompose(build_lax(z, LaxClass::even), degeneracy_tol),
                      decompose(build_lax(z, LaxClass::odd), degeneracy_tol), std::move(pairs)};
}

double frame_overlap(const PhasePoint& z, const BlockFrame& frame, const PairTarget& pair)
{
    const SpectralData current = decompose(build_lax(z, pair.lax_class), 0.0);
    const Matrix frozen = frame.spectrum(pair.lax_class).vectors.middleCols(pair.first, 2);
    const Eigen::Matrix2d overlap = frozen.transpose() * current.vectors.middleCols(pair.first, 2);
    return Eigen::JacobiSVD<Eigen::Matrix2d>(overlap).singularValues().minCoeff();
}

BlockCoordinates block_coordinates(const PhasePoint& z, const BlockFrame& frame, double min_overlap)
{
    if (z.n() != frame.base.n())
        throw ArgumentError("point and frame differ in particle count");
    BlockCoordinates out{z, {}};
    const Matrix l = build_lax(z, LaxClass::even).entries;
    const Matrix lbar = build_lax(z, LaxClass::odd).entries;
    for (const auto& pair : frame.pairs) {
        const double overlap = frame_overlap(z, frame, pair);
        if (overlap < min_overlap) {
            std::ostringstream msg;
            msg << "frozen frame invalid for pair " << pair.to_string() << ": overlap " << overlap << " < "
                << min_overlap;
            throw FrameValidityError(msg.str());
        }
        const Matrix& m = pair.lax_class == LaxClass::even ? l : lbar;
        const auto& basis = frame.spectrum(pair.lax_class).vectors;
        const Vector u1 = basis.col(pair.first);
        const Vector u2 = basis.col(pair.first + 1);
        const double a11 = u1.dot(m * u1);
        const double a22 = u2.dot(m * u2);
        out.pairs.push_back({pair, 0.5 * (a22 - a11), u1.dot(m * u2), 0.5 * (a22 + a11)});
    }
    return out;
}

std::vector<PairDifferentials> block_differentials(const PhasePoint& z, const BlockFrame& frame)
{
    const int n = z.n();
    const auto partial_even = lax_partials(z, SignVector::all_plus(n));
    const auto partial_odd = lax_partials(z, SignVector::odd_representative(n));
    std::vector<PairDifferentials> out;
    for (const auto& pair : frame.pairs) {
        const auto& partials = pair.lax_class == LaxClass::even ? partial_even : partial_odd;
        const auto& basis = frame.spectrum(pair.lax_class).vectors;
        const Vector u1 = basis.col(pair.first);
        const Vector u2 = basis.col(pair.first + 1);
        PairDifferentials d{pair, Vector(2 * n), Vector(2 * n), Vector(2 * n)};
        for (int k = 0; k < 2 * n; ++k) {
            const Matrix& dl = partials[static_cast<std::size_t>(k)];
            const double a11 = u1.dot(dl * u1);
            const double a22 = u2.dot(dl * u2);
            d.dxi[k] = 0.5 * (a22 - a11);
            d.deta[k] = u1.dot(dl * u2);
            d.dtau[k] = 0.5 * (a22 + a11);
        }
        out.push_back(std::move(d));
    }
    return out;
}

double AnnihilatorPolynomial::operator()(double x) const
{
    double acc = 0.0;
    for (auto k = coefficients.size(); k-- > 0;)
        acc = acc * x + coefficients[k];
    return acc;
}

double AnnihilatorPolynomial::derivative(double x) const
{
    double acc = 0.0;
    for (auto k = coefficients.size(); k-- > 1;)
        acc = acc * x + static_cast<double>(k) * coefficients[k];
    return acc;
}

AnnihilatorPolynomial annihilator(const SpectralData& spec, PairTarget pair)
{
    if (!spec.is_degenerate(pair.first))
        throw ArgumentError("pair " + pair.to_string() + " is not degenerate");
    const int n = spec.n();
    const double root = 0.5 * (spec.values[pair.first] + spec.values[pair.first + 1]);

    // prod over the remaining factors (lambda_a - x), times one copy of (root - x)
    Vector poly = Vector::Zero(n);
    poly[0] = 1.0;
    int degree = 0;
    auto multiply = [&](double lambda) {
        for (int k = degree + 1; k > 0; --k)
            poly[k] = lambda * poly[k] - poly[k - 1];
        poly[0] *= lambda;
        ++degree;
    };
    multiply(root);
    double derivative = -1.0;
    for (int a = 0; a < n; ++a) {
        if (a == pair.first || a == pair.first + 1)
            continue;
        multiply(spec.values[a]);
        derivative *= spec.values[a] - root;
    }
    return AnnihilatorPolynomial{std::move(poly), pair, root, derivative};
}

} // namespace toda
