#include "singularity.hpp"

#include "dynamics.hpp"
#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace toda {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

struct PairGradients {
    Vector dxi;
    Vector deta;
    Vector dtau;
};

PairGradients pair_gradients(const std::vector<Matrix>& partials, const Vector& u1, const Vector& u2)
{
    const auto dim = static_cast<Eigen::Index>(partials.size());
    PairGradients g{Vector(dim), Vector(dim), Vector(dim)};
    for (Eigen::Index k = 0; k < dim; ++k) {
        const Matrix& dl = partials[static_cast<std::size_t>(k)];
        const double a11 = u1.dot(dl * u1);
        const double a22 = u2.dot(dl * u2);
        g.dxi[k] = 0.5 * (a22 - a11);
        g.deta[k] = u1.dot(dl * u2);
        g.dtau[k] = 0.5 * (a22 + a11);
    }
    return g;
}

double bracket(const Vector& f, const Vector& g) { return poisson(Gradient::from_stacked(f), Gradient::from_stacked(g)); }

Matrix symplectic_form(int n)
{
    Matrix j = Matrix::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = Matrix::Identity(n, n);
    j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
    return j;
}

FrequencyReport frequency_from(const PhasePoint& z, const SpectralData& spec, const PairTarget& pair)
{
    const int n = z.n();
    const SignVector eps = SignVector::of_class(pair.lax_class, n);
    const AnnihilatorPolynomial t = annihilator(spec, pair);
    const Vector u1 = spec.vectors.col(pair.first);
    const Vector u2 = spec.vectors.col(pair.first + 1);

    FrequencyReport f;
    f.pair = pair;
    f.lambda = t.root;
    f.derivative_at_root = t.derivative_at_root;
    f.denominator = u2.dot(bond_antisymmetric(z, eps) * u1);
    const double scale = z.b().maxCoeff();
    if (std::abs(f.denominator) < 1e-12 * scale) {
        std::ostringstream msg;
        msg << "vanishing denominator u2.M.u1 = " << f.denominator << " for pair " << pair.to_string();
        throw NumericalError(msg.str());
    }
    const Vector& b = z.b();
    for (int m = 0; m < n; ++m) {
        const int m1 = wrap(m + 1, n);
        const double term = n * eps[m] * b[m] * (u1[m1] * u2[m] - u1[m] * u2[m1]);
        f.m_independence = std::max(f.m_independence, std::abs(term - f.denominator));
    }
    const PairGradients g = pair_gradients(lax_partials(z, eps), u1, u2);
    f.bracket = bracket(g.dxi, g.deta);
    f.omega = 2.0 * f.derivative_at_root * f.bracket;
    f.omega_closed_form = 2.0 * n * f.derivative_at_root / f.denominator;
    return f;
}

} // namespace

CorankReport corank(const PhasePoint& z, double rank_tol, double degeneracy_tol)
{
    if (!(rank_tol > 0.0))
        throw ArgumentError("rank tolerance must be positive");
    const int n = z.n();
    const Matrix l = build_lax(z, LaxClass::even).entries;
    const double radius =
        std::max(1.0, Eigen::SelfAdjointEigenSolver<Matrix>(l, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff());
    Vector scale(n);
    for (int j = 0; j < n; ++j)
        scale[j] = std::pow(radius, -j);
    const Matrix jac = scale.asDiagonal() * integrals_jacobian(z);

    Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeFullU);
    CorankReport rep{z, svd.singularValues(), 0, 0, 0, Matrix(n, 0), rank_tol, false};
    const double top = rep.singular_values[0];
    const double threshold = rank_tol * top;
    std::vector<int> null_cols;
    for (int k = 0; k < n; ++k) {
        const double s = rep.singular_values[k];
        if (s < threshold)
            null_cols.push_back(k);
        if (s >= 0.1 * threshold && s <= 10.0 * threshold)
            rep.inconclusive = true;
    }
    if (10.0 * rank_tol >= 1.0)
        rep.inconclusive = true;
    rep.corank = static_cast<int>(null_cols.size());
    rep.null_basis.resize(n, rep.corank);
    for (int i = 0; i < rep.corank; ++i) {
        const Vector c = scale.asDiagonal() * svd.matrixU().col(null_cols[static_cast<std::size_t>(i)]);
        rep.null_basis.col(i) = c.normalized();
    }
    rep.nu = static_cast<int>(decompose(build_lax(z, LaxClass::even), degeneracy_tol).degenerate_pairs.size());
    rep.nubar = static_cast<int>(decompose(build_lax(z, LaxClass::odd), degeneracy_tol).degenerate_pairs.size());
    return rep;
}

OmegaPoint omega_point(int n, double q0, double p0)
{
    if (n < 2)
        throw ArgumentError("omega point needs n >= 2");
    OmegaPoint out{PhasePoint(Vector::Constant(n, q0), Vector::Constant(n, p0)), Vector(n), Vector(n), (n - 1) / 2,
                   n / 2};
    auto fill = [&](Vector& target, int start) {
        int k = 0;
        for (int r = start; r <= n; r += 2) {
            const double value = p0 + 2.0 * std::cos(std::numbers::pi * r / n);
            const int multiplicity = (r == 0 || r == n) ? 1 : 2;
            for (int m = 0; m < multiplicity; ++m)
                target[k++] = value;
        }
    };
    fill(out.even_values, 0);
    fill(out.odd_values, 1);
    return out;
}

FrequencyReport transverse_frequency(const PhasePoint& z, const PairTarget& pair, double degeneracy_tol)
{
    if (pair.first < 0 || pair.first + 1 >= z.n())
        throw ArgumentError("pair " + pair.to_string() + " out of range");
    return frequency_from(z, decompose(build_lax(z, pair.lax_class), degeneracy_tol), pair);
}

PhasePoint perturbed_omega_seed(int n, const std::vector<PairTarget>& targets, double magnitude)
{
    const PhasePoint z0 = omega_point(n).z;
    const BlockFrame frame = make_block_frame(z0);
    const auto diffs = block_differentials(z0, frame);
    Matrix rows(2 * static_cast<Eigen::Index>(diffs.size()), 2 * n);
    Vector rhs(rows.rows());
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        const bool target = std::find(targets.begin(), targets.end(), diffs[i].pair) != targets.end();
        const auto r = static_cast<Eigen::Index>(2 * i);
        rows.row(r) = diffs[i].dxi.transpose();
        rows.row(r + 1) = diffs[i].deta.transpose();
        rhs[r] = target ? 0.0 : 0.5;
        rhs[r + 1] = 0.0;
    }
    const Vector d = rows.completeOrthogonalDecomposition().solve(rhs);
    return PhasePoint::from_stacked(z0.stacked() + magnitude * d);
}

SingularPoint find_singular(const PhasePoint& seed, const std::vector<PairTarget>& targets, const FindOptions& options)
{
    const int n = seed.n();
    if (targets.empty())
        throw ArgumentError("find_singular needs at least one target pair");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!is_allowed_pair(targets[i].lax_class, targets[i].first, n))
            throw ArgumentError("pair " + targets[i].to_string() + " can never degenerate for n = " + std::to_string(n));
        for (std::size_t k = 0; k < i; ++k)
            if (targets[k] == targets[i])
                throw ArgumentError("pair " + targets[i].to_string() + " listed twice");
    }

    PhasePoint z = seed;
    const auto dim = 2 * n;
    const auto rows = static_cast<Eigen::Index>(2 * targets.size());
    int iteration = 0;
    for (;; ++iteration) {
        Matrix jac(rows, dim);
        Vector residual(rows);
        bool converged = true;
        std::vector<Matrix> frames;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const PairTarget& t = targets[i];
            const SpectralData spec = decompose(build_lax(z, t.lax_class), 0.0);
            const double gap = spec.values[t.first] - spec.values[t.first + 1];
            if (gap >= options.gap_tol * std::max(1.0, spec.spectral_range()))
                converged = false;
            const Vector u1 = spec.vectors.col(t.first);
            const Vector u2 = spec.vectors.col(t.first + 1);
            frames.push_back(spec.vectors.middleCols(t.first, 2));
            const PairGradients g = pair_gradients(lax_partials(z, SignVector::of_class(t.lax_class, n)), u1, u2);
            const auto r = static_cast<Eigen::Index>(2 * i);
            jac.row(r) = g.dxi.transpose();
            jac.row(r + 1) = g.deta.transpose();
            residual[r] = -0.5 * gap;
            residual[r + 1] = 0.0;
        }
        if (converged)
            break;
        if (iteration >= options.max_iter) {
            std::ostringstream msg;
            msg << "no convergence after " << options.max_iter << " iterations; largest target gap "
                << 2.0 * residual.cwiseAbs().maxCoeff();
            throw ConvergenceError(msg.str());
        }

        const Vector step = -jac.completeOrthogonalDecomposition().solve(residual);
        double alpha = 1.0;
        for (int halving = 0;; ++halving) {
            if (halving > 40)
                throw ConvergenceError("step damping failed to keep the frame valid");
            bool ok = true;
            try {
                const PhasePoint trial = PhasePoint::from_stacked(z.stacked() + alpha * step);
                for (std::size_t i = 0; i < targets.size() && ok; ++i) {
                    const SpectralData spec = decompose(build_lax(trial, targets[i].lax_class), 0.0);
                    const Eigen::Matrix2d overlap = frames[i].transpose() * spec.vectors.middleCols(targets[i].first, 2);
                    ok = Eigen::JacobiSVD<Eigen::Matrix2d>(overlap).singularValues().minCoeff() > options.min_overlap;
                }
                if (ok) {
                    z = trial;
                    break;
                }
            } catch (const DomainError&) {
            }
            alpha *= 0.5;
        }
    }

    SingularPoint sp{z, targets, {}, {}, iteration};
    std::set<std::pair<int, int>> wanted;
    for (const auto& t : targets)
        wanted.insert({static_cast<int>(t.lax_class), t.first});
    for (LaxClass c : {LaxClass::even, LaxClass::odd}) {
        const SpectralData spec = decompose(build_lax(z, c), options.degeneracy_tol);
        for (int k : spec.degenerate_pairs) {
            if (!wanted.count({static_cast<int>(c), k})) {
                std::ostringstream msg;
                msg << "collapsed onto a higher stratum: " << PairTarget{c, k}.to_string()
                    << " is degenerate as well (gap " << spec.gaps[k] << ")";
                throw ConvergenceError(msg.str());
            }
        }
        for (const auto& t : targets) {
            if (t.lax_class != c)
                continue;
            sp.residual_gaps.push_back(spec.gaps[t.first]);
            sp.frequencies.push_back(frequency_from(z, spec, t));
        }
    }
    // keep outputs in target order
    std::vector<double> gaps;
    std::vector<FrequencyReport> freqs;
    for (const auto& t : targets) {
        for (std::size_t i = 0; i < sp.frequencies.size(); ++i) {
            if (sp.frequencies[i].pair == t) {
                gaps.push_back(sp.residual_gaps[i]);
                freqs.push_back(sp.frequencies[i]);
            }
        }
    }
    sp.residual_gaps = std::move(gaps);
    sp.frequencies = std::move(freqs);
    return sp;
}

HessianReport hessian_structure_check(const PhasePoint& z, const PairTarget& pair, double degeneracy_tol)
{
    const int n = z.n();
    const int dim = 2 * n;
    const SignVector eps = SignVector::of_class(pair.lax_class, n);
    const SpectralData spec = decompose(build_lax(z, pair.lax_class), degeneracy_tol);
    const AnnihilatorPolynomial t = annihilator(spec, pair);

    HessianReport rep;
    rep.pair = pair;
    rep.frequency = frequency_from(z, spec, pair);

    // Tr L^j = Tr Lbar^j + const, so the odd-class G uses the same F_j.
    auto grad_g = [&](const Vector& x) -> Vector {
        return integrals_jacobian(PhasePoint::from_stacked(x)).transpose() * t.coefficients;
    };
    const Vector z0 = z.stacked();
    Matrix h(dim, dim);
    for (int k = 0; k < dim; ++k) {
        const double step = 1e-5 * std::max(1.0, std::abs(z0[k]));
        Vector plus = z0;
        Vector minus = z0;
        plus[k] += step;
        minus[k] -= step;
        h.col(k) = (grad_g(plus) - grad_g(minus)) / (2.0 * step);
    }
    rep.hessian = 0.5 * (h + h.transpose());
    rep.hessian_norm = rep.hessian.cwiseAbs().maxCoeff();

    const auto partials = lax_partials(z, eps);
    const Vector u1 = spec.vectors.col(pair.first);
    const Vector u2 = spec.vectors.col(pair.first + 1);
    const PairGradients g = pair_gradients(partials, u1, u2);
    Matrix dyad = 2.0 * t.derivative_at_root *
                  (g.dxi * g.dxi.transpose() + g.deta * g.deta.transpose() + g.dtau * g.dtau.transpose());
    rep.dyadic_residual = (rep.hessian - dyad).cwiseAbs().maxCoeff();

    for (int a = 0; a < n; ++a) {
        if (a == pair.first || a == pair.first + 1 || spec.is_degenerate(a) || (a > 0 && spec.is_degenerate(a - 1)))
            continue;
        const Vector ua = spec.vectors.col(a);
        Vector dl(dim);
        for (int k = 0; k < dim; ++k)
            dl[k] = ua.dot(partials[static_cast<std::size_t>(k)] * ua);
        dyad += t.derivative(spec.values[a]) * dl * dl.transpose();
    }
    rep.full_dyadic_residual = (rep.hessian - dyad).cwiseAbs().maxCoeff();

    const Matrix k = symplectic_form(n) * rep.hessian;
    rep.trace_square = (k * k).trace();
    Eigen::EigenSolver<Matrix> solver(k, false);
    const Eigen::VectorXcd ev = solver.eigenvalues();
    int top = 0;
    for (int i = 0; i < dim; ++i) {
        rep.max_real_part = std::max(rep.max_real_part, std::abs(ev[i].real()));
        if (std::abs(ev[i].imag()) > std::abs(ev[top].imag()))
            top = i;
    }
    rep.omega_eigen = std::abs(ev[top].imag());
    for (int i = 0; i < dim; ++i) {
        if (std::abs(ev[i] - ev[top]) < 1e-9 * std::max(1.0, rep.omega_eigen) ||
            std::abs(ev[i] - std::conj(ev[top])) < 1e-9 * std::max(1.0, rep.omega_eigen))
            continue;
        rep.max_other_modulus = std::max(rep.max_other_modulus, std::abs(ev[i]));
    }
    const Vector sv = Eigen::JacobiSVD<Matrix>(rep.hessian).singularValues();
    rep.hessian_rank = static_cast<int>((sv.array() > 1e-6 * sv[0]).count());
    return rep;
}

BracketReport bracket_relations_check(const PhasePoint& z, double degeneracy_tol)
{
    const int n = z.n();
    const BlockFrame frame = make_block_frame(z, degeneracy_tol);
    const auto diffs = block_differentials(z, frame);

    BracketReport rep;
    rep.n = n;
    struct Fn {
        std::string name;
        const Vector* grad;
        std::size_t pair;
        int kind; // 0 xi, 1 eta, 2 tau
    };
    std::vector<Fn> fns;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        const std::string tag = diffs[i].pair.to_string();
        fns.push_back({"xi[" + tag + "]", &diffs[i].dxi, i, 0});
        fns.push_back({"eta[" + tag + "]", &diffs[i].deta, i, 1});
        fns.push_back({"tau[" + tag + "]", &diffs[i].dtau, i, 2});
        rep.pairs.push_back(frequency_from(z, frame.spectrum(diffs[i].pair.lax_class), diffs[i].pair));
        rep.normalized_ratios.push_back(n * rep.pairs.back().bracket / rep.pairs.back().denominator);
    }
    for (std::size_t a = 0; a < fns.size(); ++a) {
        for (std::size_t b = a + 1; b < fns.size(); ++b) {
            BracketEntry e;
            e.name = "{" + fns[a].name + ", " + fns[b].name + "}";
            e.value = bracket(*fns[a].grad, *fns[b].grad);
            const bool canonical = fns[a].pair == fns[b].pair && fns[a].kind == 0 && fns[b].kind == 1;
            e.zero_pattern = !canonical;
            e.expected = canonical ? rep.pairs[fns[a].pair].denominator / n : 0.0;
            if (e.zero_pattern)
                rep.zero_residual = std::max(rep.zero_residual, std::abs(e.value));
            rep.entries.push_back(std::move(e));
        }
    }
    return rep;
}

double spectral_component_bracket(const PhasePoint& z, const SignVector& eps, const Vector& u, const Vector& v,
                                  const SignVector& sigma, const Vector& w, const Vector& x)
{
    const int n = z.n();
    const auto pe = lax_partials(z, eps);
    const auto ps = lax_partials(z, sigma);
    Vector f(2 * n);
    Vector g(2 * n);
    for (int k = 0; k < 2 * n; ++k) {
        f[k] = u.dot(pe[static_cast<std::size_t>(k)] * v);
        g[k] = w.dot(ps[static_cast<std::size_t>(k)] * x);
    }
    return bracket(f, g);
}

double spectral_component_closed_form(const PhasePoint& z, const SignVector& eps, const Vector& u, const Vector& v,
                                      const SignVector& sigma, const Vector& w, const Vector& x)
{
    const int n = z.n();
    Vector d(n);
    d[0] = 1.0;
    for (int m = 1; m < n; ++m)
        d[m] = d[m - 1] * eps[m - 1] * sigma[m - 1];
    const Matrix md = bond_antisymmetric(z, eps) * d.asDiagonal();
    const Vector dx = d.cwiseProduct(x);
    const Vector dw = d.cwiseProduct(w);
    return (v.dot(dx) * u.dot(md * w) + u.dot(dw) * v.dot(md * x)) / n;
}

TangentReport symplectic_tangent_check(const PhasePoint& z, double rank_tol, double degeneracy_tol)
{
    const int n = z.n();
    const BlockFrame frame = make_block_frame(z, degeneracy_tol);
    const auto diffs = block_differentials(z, frame);
    TangentReport rep;
    rep.codimension = 2 * static_cast<int>(diffs.size());
    if (diffs.empty()) {
        rep.min_singular = Eigen::JacobiSVD<Matrix>(symplectic_form(n)).singularValues().minCoeff();
        return rep;
    }
    Matrix rows(rep.codimension, 2 * n);
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        rows.row(static_cast<Eigen::Index>(2 * i)) = diffs[i].dxi.transpose();
        rows.row(static_cast<Eigen::Index>(2 * i + 1)) = diffs[i].deta.transpose();
    }
    Eigen::JacobiSVD<Matrix> svd(rows, Eigen::ComputeFullV);
    const Matrix tangent = svd.matrixV().rightCols(2 * n - rep.codimension);
    const Matrix restricted = tangent.transpose() * symplectic_form(n) * tangent;
    rep.min_singular = Eigen::JacobiSVD<Matrix>(restricted).singularValues().minCoeff();

    if (diffs.size() == 1) {
        const CorankReport cr = corank(z, rank_tol, degeneracy_tol);
        if (cr.corank == 1) {
            const PairTarget& pair = diffs[0].pair;
            const Vector a = annihilator(frame.spectrum(pair.lax_class), pair).coefficients.normalized();
            const Vector c = cr.null_basis.col(0);
            const double along = a.dot(c);
            rep.null_vector_angle = std::atan2((a - along * c).norm(), std::abs(along));
        }
    }
    return rep;
}

} // namespace toda
