#include "dynamics.hpp"

#include "errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <iomanip>
#include <ostream>

namespace toda {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

void check_flow_index(int j, int n)
{
    if (j < 1 || j > n)
        throw ArgumentError("flow index " + std::to_string(j) + " outside [1, " + std::to_string(n) + "]");
}

// dF_j from a precomputed L^{j-1}.
void accumulate_gradient(const PhasePoint& z, const Matrix& power, double weight, Vector& dq, Vector& dp)
{
    const int n = z.n();
    const Vector& b = z.b();
    for (int r = 0; r < n; ++r) {
        dp[r] += weight * power(r, r);
        const int up = wrap(r + 1, n);
        const int down = wrap(r - 1, n);
        dq[r] += weight * (b[r] * power(r, up) - b[down] * power(down, r));
    }
}

// Gradient of G = sum_j c_j F_j, stacked (dq, dp).
Vector combined_gradient(const PhasePoint& z, const Vector& c)
{
    const int n = z.n();
    const Matrix l = build_lax(z, LaxClass::even).entries;
    Vector dq = Vector::Zero(n);
    Vector dp = Vector::Zero(n);
    Matrix power = Matrix::Identity(n, n);
    for (int j = 1; j <= n; ++j) {
        if (c[j - 1] != 0.0)
            accumulate_gradient(z, power, c[j - 1], dq, dp);
        if (j < n)
            power = power * l;
    }
    Vector g(2 * n);
    g << dq, dp;
    return g;
}

using State = std::vector<double>;

PhasePoint point_of(const State& x)
{
    const auto n = static_cast<Eigen::Index>(x.size() / 2);
    return PhasePoint(Eigen::Map<const Vector>(x.data(), n), Eigen::Map<const Vector>(x.data() + n, n));
}

} // namespace

Gradient Gradient::from_stacked(const Vector& g)
{
    const auto n = g.size() / 2;
    return Gradient{g.head(n), g.tail(n)};
}

Vector Gradient::stacked() const
{
    Vector g(2 * n());
    g << dq, dp;
    return g;
}

Gradient grad_F(const PhasePoint& z, int j)
{
    const int n = z.n();
    check_flow_index(j, n);
    const Matrix power = matrix_power(build_lax(z, LaxClass::even).entries, j - 1);
    Gradient g{Vector::Zero(n), Vector::Zero(n)};
    accumulate_gradient(z, power, 1.0, g.dq, g.dp);
    return g;
}

Matrix integrals_jacobian(const PhasePoint& z)
{
    const int n = z.n();
    const Matrix l = build_lax(z, LaxClass::even).entries;
    Matrix jac(n, 2 * n);
    Matrix power = Matrix::Identity(n, n);
    for (int j = 1; j <= n; ++j) {
        Vector dq = Vector::Zero(n);
        Vector dp = Vector::Zero(n);
        accumulate_gradient(z, power, 1.0, dq, dp);
        jac.row(j - 1) << dq.transpose(), dp.transpose();
        power = power * l;
    }
    return jac;
}

Gradient coordinate_gradient(int n, int k)
{
    if (k < 0 || k >= 2 * n)
        throw ArgumentError("coordinate index out of range");
    Gradient g{Vector::Zero(n), Vector::Zero(n)};
    if (k < n)
        g.dq[k] = 1.0;
    else
        g.dp[k - n] = 1.0;
    return g;
}

double poisson(const Gradient& f, const Gradient& g)
{
    if (f.n() != g.n() || f.dp.size() != f.dq.size() || g.dp.size() != g.dq.size())
        throw ArgumentError("poisson bracket of gradients with mismatched dimensions");
    return f.dq.dot(g.dp) - f.dp.dot(g.dq);
}

Matrix involution_matrix(const PhasePoint& z)
{
    const int n = z.n();
    const Matrix jac = integrals_jacobian(z);
    Matrix out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = poisson(Gradient::from_stacked(jac.row(i).transpose()),
                                Gradient::from_stacked(jac.row(j).transpose()));
    return out;
}

double lax_residual(const PhasePoint& z, int j, LaxClass c)
{
    const int n = z.n();
    check_flow_index(j, n);
    const SignVector eps = SignVector::of_class(c, n);
    const Matrix l = build_lax(z, eps).entries;
    const Matrix m = build_generator(z, j, c).entries;
    const Matrix commutator = l * m - m * l;
    const auto partials = lax_partials(z, eps);
    const Gradient gf = grad_F(z, j);

    double worst = 0.0;
    for (int r = 0; r < n; ++r) {
        for (int s = 0; s < n; ++s) {
            Gradient entry{Vector(n), Vector(n)};
            for (int k = 0; k < n; ++k) {
                entry.dq[k] = partials[static_cast<std::size_t>(k)](r, s);
                entry.dp[k] = partials[static_cast<std::size_t>(n + k)](r, s);
            }
            worst = std::max(worst, std::abs(poisson(entry, gf) - commutator(r, s)));
        }
    }
    return worst;
}

double Trajectory::integral_drift() const
{
    if (samples.empty())
        return 0.0;
    const Vector f0 = integrals(samples.front().z);
    double worst = 0.0;
    for (const auto& s : samples) {
        const Vector f = integrals(s.z);
        for (int k = 0; k < f.size(); ++k)
            worst = std::max(worst, std::abs(f[k] - f0[k]) / std::max(1.0, std::abs(f0[k])));
    }
    return worst;
}

std::vector<double> uniform_times(double t_final, int count)
{
    if (count < 2)
        throw ArgumentError("need at least two sample times");
    if (!std::isfinite(t_final))
        throw ArgumentError("final time must be finite");
    std::vector<double> times(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        times[static_cast<std::size_t>(i)] = t_final * i / (count - 1);
    return times;
}

Trajectory integrate_flow(const PhasePoint& z0, const Vector& coefficients, const std::vector<double>& times,
                          const FlowOptions& options)
{
    namespace odeint = boost::numeric::odeint;
    const int n = z0.n();
    if (coefficients.size() != n)
        throw ArgumentError("coefficient vector must have length n");
    if (times.empty())
        throw ArgumentError("no sample times requested");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0 || (i > 0 && times[i] < times[i - 1]))
            throw ArgumentError("sample times must be finite, non-negative and ascending");
    }

    Trajectory traj{coefficients, {}};
    traj.samples.reserve(times.size());

    if (options.method == FlowMethod::verlet) {
        for (int j = 0; j < n; ++j)
            if (j != 1 && coefficients[j] != 0.0)
                throw ArgumentError("Stormer-Verlet is only available for the H-flow (c = alpha e_2)");
        const double alpha = coefficients[1];
        Vector q = z0.q();
        Vector p = z0.p();
        auto force = [&](const Vector& qq) {
            const PhasePoint zz(qq, Vector::Zero(n));
            const Vector& b = zz.b();
            Vector f(n);
            for (int r = 0; r < n; ++r)
                f[r] = -(b[r] * b[r] - b[wrap(r - 1, n)] * b[wrap(r - 1, n)]);
            return f;
        };
        double t = 0.0;
        try {
            for (double target : times) {
                const double span = target - t;
                if (span > 0.0) {
                    const long steps = std::max(1L, static_cast<long>(std::ceil(span / options.fixed_step)));
                    const double h = alpha * span / static_cast<double>(steps);
                    for (long s = 0; s < steps; ++s) {
                        p += 0.5 * h * force(q);
                        q += h * p;
                        p += 0.5 * h * force(q);
                    }
                    t = target;
                }
                traj.samples.push_back({PhasePoint(q, p), target});
            }
        } catch (const DomainError& e) {
            throw ConvergenceError(std::string("Verlet integration left the domain: ") + e.what());
        }
        return traj;
    }

    State x(static_cast<std::size_t>(2 * n));
    Eigen::Map<Vector>(x.data(), 2 * n) = z0.stacked();

    auto system = [&](const State& s, State& dxdt, double) {
        const Vector g = combined_gradient(point_of(s), coefficients);
        for (int k = 0; k < n; ++k) {
            dxdt[static_cast<std::size_t>(k)] = g[n + k];
            dxdt[static_cast<std::size_t>(n + k)] = -g[k];
        }
    };
    auto observer = [&](const State& s, double t) { traj.samples.push_back({point_of(s), t}); };

    try {
        auto stepper = odeint::make_dense_output(options.atol, options.rtol, odeint::runge_kutta_dopri5<State>());
        odeint::integrate_times(stepper, system, x, times.begin(), times.end(), options.initial_step, observer,
                                odeint::max_step_checker(static_cast<int>(options.max_steps)));
    } catch (const DomainError& e) {
        throw ConvergenceError(std::string("flow left the representable domain: ") + e.what());
    } catch (const Error&) {
        throw;
    } catch (const std::runtime_error& e) {
        throw ConvergenceError(std::string("step-size control failed: ") + e.what());
    }
    return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory)
{
    if (trajectory.samples.empty())
        return;
    const int n = trajectory.samples.front().z.n();
    os << "t";
    for (const char* prefix : {"q_", "p_", "F_"})
        for (int k = 1; k <= n; ++k)
            os << ',' << prefix << k;
    os << '\n';
    os << std::setprecision(17);
    for (const auto& s : trajectory.samples) {
        os << s.t;
        const Vector f = integrals(s.z);
        for (const Vector* v : {&s.z.q(), &s.z.p(), &f})
            for (int k = 0; k < n; ++k)
                os << ',' << (*v)[k];
        os << '\n';
    }
}

} // namespace toda
