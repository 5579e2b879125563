#include "verify.hpp"

#include "dynamics.hpp"
#include "errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace toda {

namespace {

struct Outcome {
    double residual = 0.0;
    CheckStatus status = CheckStatus::pass;
    std::string detail;
};

Outcome below(double residual, double tol, std::string detail = {})
{
    const bool ok = std::isfinite(residual) && residual < tol;
    return {residual, ok ? CheckStatus::pass : CheckStatus::fail, std::move(detail)};
}

// Evaluates f(0..count-1) on up to `threads` workers; results keep index order.
template <class T>
std::vector<T> parallel_map(int count, int threads, const std::function<T(int)>& f)
{
    std::vector<std::optional<T>> slots(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    const int workers = std::max(1, std::min(threads, count));
    auto work = [&](int w) {
        for (int i = w; i < count; i += workers) {
            try {
                slots[static_cast<std::size_t>(i)].emplace(f(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
        for (auto& t : pool)
            t.join();
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(slots.size());
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

std::string join_pairs(const std::vector<PairTarget>& pairs)
{
    std::string s;
    for (const auto& p : pairs)
        s += (s.empty() ? "" : ",") + p.to_string();
    return s;
}

class Verifier {
public:
    explicit Verifier(const RunConfig& cfg) : cfg_(cfg) { report_.config = cfg; }

    VerificationReport run()
    {
        for (const auto& suite : suite_names()) {
            if (!cfg_.suites.empty() && std::find(cfg_.suites.begin(), cfg_.suites.end(), suite) == cfg_.suites.end())
                continue;
            for (int n = cfg_.n_min; n <= cfg_.n_max; ++n) {
                if (suite == "structure")
                    structure(n);
                else if (suite == "dynamics")
                    dynamics(n);
                else if (suite == "spectral")
                    spectral(n);
                else if (suite == "singularity")
                    singularity(n);
                else
                    maslov(n);
            }
        }
        return std::move(report_);
    }

private:
    void check(const std::string& suite, const std::string& id, int n, const std::string& reference, double tol,
               const std::function<Outcome()>& body)
    {
        CheckRecord rec;
        rec.suite = suite;
        rec.id = id;
        rec.n = n;
        rec.reference = reference;
        rec.tolerance = tol;
        const auto start = std::chrono::steady_clock::now();
        try {
            const Outcome o = body();
            rec.residual = o.residual;
            rec.status = o.status;
            rec.detail = o.detail;
        } catch (const std::exception& e) {
            rec.residual = std::numeric_limits<double>::quiet_NaN();
            rec.status = CheckStatus::fail;
            rec.detail = std::string("error: ") + e.what();
        }
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        report_.checks.push_back(std::move(rec));
    }

    std::vector<PhasePoint> draw(int n, int count, int stream) const
    {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg_.seed), static_cast<std::uint32_t>(cfg_.seed >> 32),
                          static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(stream)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<PhasePoint> pts;
        pts.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            Vector q(n);
            Vector p(n);
            for (int k = 0; k < n; ++k)
                q[k] = u(rng);
            for (int k = 0; k < n; ++k)
                p[k] = u(rng);
            pts.emplace_back(q, p);
        }
        return pts;
    }

    double max_over(const std::vector<PhasePoint>& pts, const std::function<double(const PhasePoint&)>& f) const
    {
        const auto values = parallel_map<double>(static_cast<int>(pts.size()), cfg_.threads,
                                                 [&](int i) { return f(pts[static_cast<std::size_t>(i)]); });
        double worst = 0.0;
        for (double v : values)
            worst = std::isnan(v) ? v : std::max(worst, v);
        return worst;
    }

    // Sigma_1 points near the origin, one per allowed pair.
    const std::vector<SingularPoint>& found_points(int n)
    {
        auto it = found_.find(n);
        if (it != found_.end())
            return it->second;
        std::vector<SingularPoint> pts;
        FindOptions opt;
        opt.degeneracy_tol = cfg_.tol.degeneracy_tol;
        for (LaxClass c : {LaxClass::even, LaxClass::odd})
            for (const auto& t : allowed_pairs(c, n))
                pts.push_back(find_singular(perturbed_omega_seed(n, {t}, 1e-2), {t}, opt));
        return found_[n] = std::move(pts);
    }

    void structure(int n)
    {
        const std::string s = "structure";
        const int count = cfg_.random_points;
        check(s, "off_band", n, "off-band structure of L^j - Lbar^j", 1e-10, [&] {
            const auto pts = draw(n, count, 1);
            return below(max_over(pts,
                                  [n](const PhasePoint& z) {
                                      double w = 0.0;
                                      for (int j = 1; j <= n; ++j) {
                                          const auto r = off_band_check(z, j, 1e-10);
                                          w = std::max({w, r.zero_band_residual / r.zero_band_scale,
                                                        r.first_diagonal_residual});
                                      }
                                      return w;
                                  }),
                         1e-10);
        });
        check(s, "trace_relation", n, "trace relation Tr L^n = Tr Lbar^n + 4n", 1e-9, [&] {
            const auto pts = draw(n, count, 2);
            return below(max_over(pts,
                                  [](const PhasePoint& z) {
                                      const auto r = trace_relation_check(z, 1e-9);
                                      return std::max(r.lower_residual, r.top_residual);
                                  }),
                         1e-9);
        });
        check(s, "char_poly_offset", n, "characteristic polynomials of L and Lbar differ by a constant", 1e-8, [&] {
            const auto pts = draw(n, count, 3);
            std::vector<double> grid;
            for (int k = 0; k <= 20; ++k)
                grid.push_back(-1.0 + 0.1 * k);
            const auto reps = parallel_map<CharPolyReport>(static_cast<int>(pts.size()), cfg_.threads, [&](int i) {
                return char_poly_offset(pts[static_cast<std::size_t>(i)], grid, 1e-8);
            });
            const double c0 = reps.front().constant;
            double w = 0.0;
            for (const auto& r : reps)
                w = std::max({w, r.max_deviation, r.magnitude_residual, std::abs(r.constant - c0)});
            return below(w, 1e-8, "det(xI-L) - det(xI-Lbar) = " + format_double(std::round(c0)));
        });
        check(s, "conjugation_covariance", n, "sign-vector conjugation of L^eps", 1e-10, [&] {
            const auto pts = draw(n, count, 4);
            const std::uint64_t seed = cfg_.seed;
            return below(max_over(pts,
                                  [n, seed](const PhasePoint& z) {
                                      std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(z.q()[0] * 1e9));
                                      std::vector<int> e(static_cast<std::size_t>(n));
                                      std::vector<int> f(static_cast<std::size_t>(n));
                                      for (int k = 0; k < n; ++k) {
                                          e[static_cast<std::size_t>(k)] = (rng() & 1) ? 1 : -1;
                                          f[static_cast<std::size_t>(k)] = (rng() & 1) ? 1 : -1;
                                      }
                                      SignVector eps(e);
                                      SignVector sig(f);
                                      if (eps.parity() != sig.parity()) {
                                          f[0] = -f[0];
                                          sig = SignVector(f);
                                      }
                                      const Vector a = decompose(build_lax(z, eps), 0.0).values;
                                      const Vector b = decompose(build_lax(z, sig), 0.0).values;
                                      const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
                                      return (a - b).cwiseAbs().maxCoeff() / scale;
                                  }),
                         1e-10);
        });
        check(s, "corollary_rank", n, "independence of L^(j-1) - Lbar^(j-1)", 1e-10, [&] {
            if (n < 2)
                return Outcome{};
            const auto pts = draw(n, std::min(count, 50), 5);
            double worst = 1.0;
            for (const auto& z : pts) {
                const Matrix l = build_lax(z, LaxClass::even).entries;
                const Matrix lb = build_lax(z, LaxClass::odd).entries;
                Matrix cols(n * n, n - 1);
                for (int j = 2; j <= n; ++j) {
                    const Matrix d = matrix_power(l, j - 1) - matrix_power(lb, j - 1);
                    cols.col(j - 2) = Eigen::Map<const Vector>(d.data(), n * n);
                }
                const Vector sv = Eigen::JacobiSVD<Matrix>(cols).singularValues();
                worst = std::min(worst, sv[sv.size() - 1] / sv[0]);
            }
            // pass when the smallest relative singular value clears the tolerance
            return Outcome{worst, worst > 1e-10 ? CheckStatus::pass : CheckStatus::fail,
                           "smallest relative singular value"};
        });
        check(s, "generator_shape", n, "plumbing", 1e-13, [&] {
            const auto pts = draw(n, 20, 6);
            double w = 0.0;
            for (const auto& z : pts) {
                for (LaxClass c : {LaxClass::even, LaxClass::odd}) {
                    w = std::max(w, build_generator(z, 1, c).entries.cwiseAbs().maxCoeff());
                    for (int j = 2; j <= n; ++j) {
                        const Matrix m = build_generator(z, j, c).entries;
                        w = std::max(w, (m + m.transpose()).cwiseAbs().maxCoeff());
                    }
                }
                const Matrix m2 = build_generator(z, 2, LaxClass::even).entries;
                w = std::max(w, (m2 - 0.5 * bond_antisymmetric(z, SignVector::all_plus(n))).cwiseAbs().maxCoeff());
            }
            return below(w, 1e-13);
        });
    }

    void dynamics(int n)
    {
        const std::string s = "dynamics";
        const int count = cfg_.random_points;
        check(s, "involution", n, "involution of the integrals", 1e-9, [&] {
            const auto pts = draw(n, count, 11);
            return below(max_over(pts, [](const PhasePoint& z) { return involution_matrix(z).cwiseAbs().maxCoeff(); }),
                         1e-9);
        });
        check(s, "lax_equation", n, "higher Lax equations", 1e-8, [&] {
            const auto pts = draw(n, std::min(count, 50), 12);
            return below(max_over(pts,
                                  [n](const PhasePoint& z) {
                                      double w = 0.0;
                                      for (int j = 1; j <= n; ++j)
                                          for (LaxClass c : {LaxClass::even, LaxClass::odd})
                                              w = std::max(w, lax_residual(z, j, c));
                                      return w;
                                  }),
                         1e-8);
        });
        check(s, "gradient_fd", n, "plumbing", 1e-7, [&] {
            const auto pts = draw(n, std::min(count, 20), 13);
            return below(max_over(pts,
                                  [n](const PhasePoint& z) {
                                      const double h = 1e-6;
                                      const Vector z0 = z.stacked();
                                      const Vector f0 = integrals(z);
                                      double w = 0.0;
                                      for (int k = 0; k < 2 * n; ++k) {
                                          Vector a = z0;
                                          Vector b = z0;
                                          a[k] += h;
                                          b[k] -= h;
                                          const Vector fd = (integrals(PhasePoint::from_stacked(a)) -
                                                             integrals(PhasePoint::from_stacked(b))) /
                                                            (2 * h);
                                          for (int j = 1; j <= n; ++j) {
                                              const double g = grad_F(z, j).stacked()[k];
                                              w = std::max(w, std::abs(g - fd[j - 1]) / std::max(1.0, std::abs(f0[j - 1])));
                                          }
                                      }
                                      return w;
                                  }),
                         1e-7, "relative to max(1, |F_j|)");
        });
        check(s, "isospectral_flow", n, "isospectrality of the commuting flows", 1e-8, [&] {
            const PhasePoint z = draw(n, 1, 14).front();
            FlowOptions opt;
            opt.rtol = cfg_.tol.ode_rtol;
            const auto times = uniform_times(cfg_.flow_t_final, 51);
            double w = 0.0;
            for (int j = 2; j <= std::min(n, 3); ++j) {
                Vector c = Vector::Zero(n);
                c[j - 1] = 1.0;
                const Trajectory traj = integrate_flow(z, c, times, opt);
                for (LaxClass cls : {LaxClass::even, LaxClass::odd}) {
                    const Vector v0 = decompose(build_lax(z, cls), 0.0).values;
                    const double scale = std::max(1.0, v0.cwiseAbs().maxCoeff());
                    for (const auto& st : traj.samples)
                        w = std::max(w, (decompose(build_lax(st.z, cls), 0.0).values - v0).cwiseAbs().maxCoeff() / scale);
                }
            }
            return below(w, 1e-8, "flows F_2..F_" + std::to_string(std::min(n, 3)) + " over [0, " +
                                      format_double(cfg_.flow_t_final) + "]");
        });
        check(s, "momentum_flow", n, "plumbing", 1e-9, [&] {
            const PhasePoint z = draw(n, 1, 15).front();
            Vector c = Vector::Zero(n);
            c[0] = 1.0;
            const Trajectory traj = integrate_flow(z, c, uniform_times(2.0, 5));
            double w = 0.0;
            for (const auto& st : traj.samples) {
                w = std::max(w, (st.z.q() - z.q() - Vector::Constant(n, st.t)).cwiseAbs().maxCoeff());
                w = std::max(w, (st.z.p() - z.p()).cwiseAbs().maxCoeff());
            }
            return below(w, 1e-9);
        });
    }

    void spectral(int n)
    {
        const std::string s = "spectral";
        const int count = cfg_.random_points;
        check(s, "eigen_decomposition", n, "plumbing", 1e-10, [&] {
            const auto pts = draw(n, count, 21);
            return below(max_over(pts,
                                  [](const PhasePoint& z) {
                                      double w = 0.0;
                                      for (LaxClass c : {LaxClass::even, LaxClass::odd}) {
                                          const Matrix l = build_lax(z, c).entries;
                                          const SpectralData d = decompose(l, 0.0);
                                          for (int k = 0; k < d.n(); ++k)
                                              w = std::max(w, (l * d.vectors.col(k) - d.values[k] * d.vectors.col(k)).norm() /
                                                                  (1.0 + std::abs(d.values[k])));
                                          w = std::max(w, (d.vectors.transpose() * d.vectors -
                                                           Matrix::Identity(d.n(), d.n()))
                                                              .cwiseAbs()
                                                              .maxCoeff());
                                      }
                                      return w;
                                  }),
                         1e-10);
        });
        check(s, "interlacing", n, "interlacing of periodic and antiperiodic spectra", 0.5, [&] {
            const auto pts = draw(n, count, 22);
            const auto counts = parallel_map<int>(static_cast<int>(pts.size()), cfg_.threads, [&](int i) {
                return static_cast<int>(interlacing_check(pts[static_cast<std::size_t>(i)], 1e-12).violations.size());
            });
            int total = 0;
            for (int c : counts)
                total += c;
            return below(total, 0.5, std::to_string(total) + " violations");
        });
        check(s, "omega_spectrum", n, "closed-form spectra at relative equilibria", 1e-12, [&] {
            double w = 0.0;
            for (auto [q0, p0] : {std::pair{0.0, 0.0}, std::pair{0.3, 0.7}}) {
                const OmegaPoint om = omega_point(n, q0, p0);
                w = std::max(w, (decompose(build_lax(om.z, LaxClass::even), 0.0).values - om.even_values).cwiseAbs().maxCoeff());
                w = std::max(w, (decompose(build_lax(om.z, LaxClass::odd), 0.0).values - om.odd_values).cwiseAbs().maxCoeff());
            }
            return below(w, 1e-12);
        });
        check(s, "degeneracy_parity", n, "allowed degeneracies", 0.5, [&] {
            const OmegaPoint om = omega_point(n);
            int bad = 0;
            for (LaxClass c : {LaxClass::even, LaxClass::odd}) {
                const SpectralData d = decompose(build_lax(om.z, c), cfg_.tol.degeneracy_tol);
                for (int k : d.degenerate_pairs)
                    bad += is_allowed_pair(c, k, n) ? 0 : 1;
                const int expected = c == LaxClass::even ? om.nu : om.nubar;
                bad += static_cast<int>(d.degenerate_pairs.size()) == expected ? 0 : 1;
            }
            return below(bad, 0.5, std::to_string(bad) + " misplaced or missing pairs");
        });
        check(s, "annihilator", n, "annihilating polynomials T_r", 1e-8, [&] {
            const OmegaPoint om = omega_point(n);
            double w = 0.0;
            for (LaxClass c : {LaxClass::even, LaxClass::odd}) {
                const Matrix l = build_lax(om.z, c).entries;
                const SpectralData d = decompose(l, cfg_.tol.degeneracy_tol);
                for (int k : d.degenerate_pairs) {
                    const AnnihilatorPolynomial t = annihilator(d, {c, k});
                    Matrix acc = Matrix::Zero(n, n);
                    for (int j = 0; j < n; ++j)
                        acc += t.coefficients[j] * matrix_power(l, j);
                    w = std::max(w, acc.cwiseAbs().maxCoeff());
                    for (int a = 0; a < n; ++a)
                        w = std::max(w, std::abs(t(d.values[a])));
                    for (int other : d.degenerate_pairs)
                        if (other != k)
                            w = std::max(w, std::abs(t.derivative(d.values[other])));
                    if (std::abs(t.derivative_at_root) < 1e-6)
                        w = std::max(w, 1.0);
                }
            }
            return below(w, 1e-8);
        });
    }

    void singularity(int n)
    {
        const std::string s = "singularity";
        const double rank_tol = cfg_.tol.rank_tol;
        const double dtol = cfg_.tol.degeneracy_tol;
        check(s, "corank_omega", n, "corank of dF equals nu + nubar", 0.5, [&] {
            const OmegaPoint om = omega_point(n);
            const CorankReport r = corank(om.z, rank_tol, dtol);
            const std::string detail = "corank " + std::to_string(r.corank) + ", nu " + std::to_string(r.nu) +
                                       ", nubar " + std::to_string(r.nubar);
            if (r.inconclusive)
                return Outcome{0.0, CheckStatus::inconclusive, detail};
            const bool ok = r.agrees() && r.corank == n - 1 && r.nu == om.nu && r.nubar == om.nubar;
            return Outcome{ok ? 0.0 : 1.0, ok ? CheckStatus::pass : CheckStatus::fail, detail};
        });
        check(s, "corank_random", n, "corank of dF equals nu + nubar", 0.5, [&] {
            const auto pts = draw(n, cfg_.random_points, 31);
            const auto reps = parallel_map<CorankReport>(static_cast<int>(pts.size()), cfg_.threads, [&](int i) {
                return corank(pts[static_cast<std::size_t>(i)], rank_tol, dtol);
            });
            int decided = 0;
            int bad = 0;
            for (const auto& r : reps) {
                if (r.inconclusive)
                    continue;
                ++decided;
                bad += (r.agrees() && r.corank == 0) ? 0 : 1;
            }
            const std::string detail = std::to_string(decided) + " decided, " +
                                       std::to_string(reps.size() - static_cast<std::size_t>(decided)) + " inconclusive";
            if (decided == 0)
                return Outcome{0.0, CheckStatus::inconclusive, detail};
            return below(bad, 0.5, detail);
        });
        if (n < 2)
            return;
        check(s, "omega_brackets", n, "brackets of xi, eta, tau at relative equilibria", cfg_.tol.bracket_tol,
              [&] { return brackets(omega_point(n).z); });
        check(s, "omega_tangent", n, "symplectic strata", 1e-6, [&] {
            const TangentReport t = symplectic_tangent_check(omega_point(n).z, rank_tol, dtol);
            return Outcome{t.min_singular, t.min_singular > 1e-6 ? CheckStatus::pass : CheckStatus::fail,
                           "smallest singular value of the restricted form"};
        });
        if (n < 3)
            return;
        check(s, "find_singular", n, "corank one on the codimension-two strata", 0.5, [&] {
            const auto& pts = found_points(n);
            int bad = 0;
            int undecided = 0;
            double worst_gap = 0.0;
            for (const auto& sp : pts) {
                const CorankReport r = corank(sp.z, rank_tol, dtol);
                if (r.inconclusive)
                    ++undecided;
                else
                    bad += (r.corank == 1 && r.agrees()) ? 0 : 1;
                for (double g : sp.residual_gaps)
                    worst_gap = std::max(worst_gap, g);
            }
            const std::string detail =
                std::to_string(pts.size()) + " points, largest residual gap " + format_double(worst_gap);
            if (bad == 0 && undecided > 0)
                return Outcome{0.0, CheckStatus::inconclusive, detail + ", corank undecided"};
            return below(bad, 0.5, detail);
        });
        for (const auto& sp : found_points(n)) {
            const std::string tag = join_pairs(sp.targets);
            check(s, "sigma1_brackets[" + tag + "]", n, "brackets of xi, eta, tau on the strata", cfg_.tol.bracket_tol,
                  [&] { return brackets(sp.z); });
            check(s, "sigma1_tangent[" + tag + "]", n, "symplectic strata", 1e-6, [&] {
                const TangentReport t = symplectic_tangent_check(sp.z, rank_tol, dtol);
                const bool ok = t.min_singular > 1e-6 && t.null_vector_angle < 1e-6;
                return Outcome{t.null_vector_angle, ok ? CheckStatus::pass : CheckStatus::fail,
                               "null vector angle to annihilator coefficients; restricted form min singular value " +
                                   format_double(t.min_singular)};
            });
            check(s, "transverse_frequency[" + tag + "]", n, "transverse stability", 1e-6, [&] {
                const HessianReport h = hessian_structure_check(sp.z, sp.targets.front(), dtol);
                const double omega = std::abs(h.frequency.omega);
                const double freq_err = std::abs(omega - h.omega_eigen) / omega;
                const double dyad = h.full_dyadic_residual / h.hessian_norm;
                const bool elliptic = h.trace_square < 0.0;
                std::ostringstream d;
                d << "omega " << format_double(h.frequency.omega) << " (closed form "
                  << format_double(h.frequency.omega_closed_form) << "), three-dyad residual "
                  << format_double(h.dyadic_residual / h.hessian_norm) << ", Tr(JG'')^2 "
                  << format_double(h.trace_square);
                const double w = std::max(freq_err, dyad);
                return Outcome{w, (w < 1e-6 && elliptic) ? CheckStatus::pass : CheckStatus::fail, d.str()};
            });
        }
    }

    Outcome brackets(const PhasePoint& z)
    {
        const BracketReport b = bracket_relations_check(z, cfg_.tol.degeneracy_tol);
        double ratio_err = 0.0;
        double m_ind = 0.0;
        for (double r : b.normalized_ratios)
            ratio_err = std::max(ratio_err, std::abs(r + 1.0));
        for (const auto& f : b.pairs)
            m_ind = std::max(m_ind, f.m_independence);
        std::ostringstream d;
        d << b.pairs.size() << " pairs; n{xi,eta}/(u2.M.u1) = -1 to " << format_double(ratio_err)
          << "; m-independence " << format_double(m_ind);
        const bool ok = b.zero_residual < cfg_.tol.bracket_tol && ratio_err < 1e-6 && m_ind < 1e-9;
        return Outcome{b.zero_residual, ok ? CheckStatus::pass : CheckStatus::fail, d.str()};
    }

    void maslov(int n)
    {
        const std::string s = "maslov";
        if (n == cfg_.n_min) {
            check(s, "calibration", 0, "plumbing", 0.5, [&] {
                const MaslovResult m = harmonic_oscillator_loop(2);
                return below(std::abs(m.mu - 2), 0.5, "oscillator angle loop mu = " + std::to_string(m.mu));
            });
        }
        check(s, "regular_loop", n, "Maslov index of contractible regular loops", 0.5, [&] {
            const PhasePoint z = draw(n, 1, 41).front();
            double gap = 1.0;
            for (LaxClass c : {LaxClass::even, LaxClass::odd})
                gap = std::min(gap, decompose(build_lax(z, c), 0.0).gaps.minCoeff());
            const double r = 0.1 * gap;
            const Vector z0 = z.stacked();
            const ClosedCurve loop(
                [z0, r, n](double t) {
                    Vector d = Vector::Zero(2 * n);
                    d[0] = r * std::cos(2 * std::numbers::pi * t);
                    d[n] = r * std::sin(2 * std::numbers::pi * t);
                    return PhasePoint::from_stacked(z0 + d);
                },
                64);
            const HolonomyCheck h = check_holonomy_theorem(loop);
            int bad = std::abs(h.maslov.mu) + (h.passed ? 0 : 1);
            for (int g : h.holonomy.gamma)
                bad += g == 1 ? 0 : 1;
            for (int g : h.holonomy.gammabar)
                bad += g == 1 ? 0 : 1;
            return below(bad, 0.5, "mu = " + std::to_string(h.maslov.mu));
        });

        struct Centre {
            PhasePoint z;
            PairTarget pair;
            double radius;
        };
        std::vector<Centre> centres;
        if (n == 2) {
            centres.push_back({omega_point(2).z, {LaxClass::odd, 0}, 0.05});
        } else {
            try {
                std::set<int> seen;
                for (const auto& sp : found_points(n))
                    if (seen.insert(static_cast<int>(sp.targets.front().lax_class)).second)
                        centres.push_back({sp.z, sp.targets.front(), 1e-3});
            } catch (const std::exception& e) {
                check(s, "singular_loop", n, "holonomy and Maslov index", 0.5, [msg = std::string(e.what())]() -> Outcome {
                    throw NumericalError(msg);
                });
                return;
            }
        }
        for (const auto& c : centres) {
            const std::string tag = c.pair.to_string();
            check(s, "singular_loop[" + tag + "]", n, "holonomy and Maslov index", 0.5, [&] {
                const ClosedCurve loop = circle_around(c.z, c.pair, c.radius, 128, cfg_.tol.degeneracy_tol);
                const HolonomyCheck h = check_holonomy_theorem(loop);
                const HolonomyCheck fine = check_holonomy_theorem(loop.with_samples(256));
                int bad = (h.passed ? 0 : 1) + (std::abs(h.maslov.mu) == 2 ? 0 : 1) + (h.maslov_sign == -1 ? 0 : 1);
                bad += (fine.maslov.mu == h.maslov.mu && fine.holonomy.gamma == h.holonomy.gamma &&
                        fine.holonomy.gammabar == h.holonomy.gammabar)
                           ? 0
                           : 1;
                std::ostringstream d;
                d << "mu = " << h.maslov.mu << ", even product " << h.holonomy.even_product << ", odd product "
                  << h.holonomy.odd_product;
                return below(bad, 0.5, d.str());
            });
            check(s, "enclosure[" + tag + "]", n, "Maslov index from enclosed singular points", 0.5, [&] {
                const DiskPatch one = single_point_disk(c.z, c.pair, c.radius);
                const EnclosureReport a = enclosure_count_check(one);
                const EnclosureReport b = enclosure_count_check(one.reversed());
                const EnclosureReport two = enclosure_count_check(two_point_disk(c.z, c.pair, c.radius, 0.5, 0.1));
                const int bad = (a.passed ? 0 : 1) + (b.passed ? 0 : 1) + (two.passed ? 0 : 1);
                std::ostringstream d;
                d << "one point mu = " << a.maslov.mu << ", reversed " << b.maslov.mu << ", two points "
                  << two.maslov.mu;
                return below(bad, 0.5, d.str());
            });
        }
    }

    RunConfig cfg_;
    VerificationReport report_;
    std::map<int, std::vector<SingularPoint>> found_;
};

double positive(const std::string& key, double x)
{
    if (!std::isfinite(x) || !(x > 0.0))
        throw ConfigError(key + " must be positive");
    return x;
}

std::vector<std::string> parse_suites(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "all")
            return {};
        if (std::find(suite_names().begin(), suite_names().end(), item) == suite_names().end())
            throw ConfigError("unknown suite '" + item + "'");
        out.push_back(item);
    }
    return out;
}

int parse_int(const std::string& key, const std::string& value)
{
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used == value.size() && v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max())
            return static_cast<int>(v);
    } catch (const std::exception&) {
    }
    throw ConfigError(key + " expects an integer, got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& value)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size())
            return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(key + " expects a number, got '" + value + "'");
}

} // namespace

const char* to_string(CheckStatus s) noexcept
{
    switch (s) {
    case CheckStatus::pass:
        return "pass";
    case CheckStatus::fail:
        return "fail";
    default:
        return "inconclusive";
    }
}

void RunConfig::apply(const std::string& key, const std::string& value)
{
    if (key == "n") {
        n_min = n_max = parse_int(key, value);
    } else if (key == "n_min") {
        n_min = parse_int(key, value);
    } else if (key == "n_max") {
        n_max = parse_int(key, value);
    } else if (key == "seed") {
        try {
            std::size_t used = 0;
            seed = std::stoull(value, &used);
            if (used != value.size() || value.front() == '-')
                throw std::invalid_argument("seed");
        } catch (const std::exception&) {
            throw ConfigError("seed expects a non-negative integer, got '" + value + "'");
        }
    } else if (key == "random_points") {
        random_points = parse_int(key, value);
    } else if (key == "suite" || key == "suites") {
        suites = parse_suites(value);
    } else if (key == "flow_t_final") {
        flow_t_final = parse_real(key, value);
    } else if (key == "tol.degeneracy_tol") {
        tol.degeneracy_tol = parse_real(key, value);
    } else if (key == "tol.rank_tol") {
        tol.rank_tol = parse_real(key, value);
    } else if (key == "tol.bracket_tol") {
        tol.bracket_tol = parse_real(key, value);
    } else if (key == "tol.ode_rtol") {
        tol.ode_rtol = parse_real(key, value);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

void RunConfig::validate() const
{
    if (n_min < 2 || n_max < n_min || n_max > 16)
        throw ConfigError("n range must satisfy 2 <= n_min <= n_max <= 16");
    if (random_points < 1)
        throw ConfigError("random_points must be at least 1");
    positive("tol.degeneracy_tol", tol.degeneracy_tol);
    positive("tol.rank_tol", tol.rank_tol);
    positive("tol.bracket_tol", tol.bracket_tol);
    positive("tol.ode_rtol", tol.ode_rtol);
    positive("flow_t_final", flow_t_final);
}

RunConfig RunConfig::from_json_text(const std::string& text)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    RunConfig cfg;
    auto scalar = [](const Json& v) -> std::string {
        if (v.is_string())
            return v.get<std::string>();
        if (v.is_number_integer())
            return std::to_string(v.get<long long>());
        if (v.is_number())
            return format_double(v.get<double>());
        throw ConfigError("config values must be numbers or strings");
    };
    for (const auto& [key, value] : j.items()) {
        if (key == "tolerances") {
            if (!value.is_object())
                throw ConfigError("tolerances must be an object");
            for (const auto& [tk, tv] : value.items())
                cfg.apply("tol." + tk, scalar(tv));
        } else if (key == "suites" && value.is_array()) {
            std::string joined;
            for (const auto& s : value) {
                if (!s.is_string())
                    throw ConfigError("suites must be strings");
                joined += (joined.empty() ? "" : ",") + s.get<std::string>();
            }
            cfg.apply("suites", joined);
        } else {
            cfg.apply(key, scalar(value));
        }
    }
    cfg.validate();
    return cfg;
}

Json RunConfig::to_json() const
{
    Json s = Json::array();
    for (const auto& name : suites.empty() ? suite_names() : suites)
        s.push_back(name);
    return Json{{"n_min", n_min},
                {"n_max", n_max},
                {"seed", seed},
                {"random_points", random_points},
                {"suites", s},
                {"flow_t_final", format_double(flow_t_final)},
                {"tolerances",
                 {{"degeneracy_tol", format_double(tol.degeneracy_tol)},
                  {"rank_tol", format_double(tol.rank_tol)},
                  {"bracket_tol", format_double(tol.bracket_tol)},
                  {"ode_rtol", format_double(tol.ode_rtol)}}}};
}

int VerificationReport::count(CheckStatus s) const
{
    return static_cast<int>(std::count_if(checks.begin(), checks.end(), [s](const auto& c) { return c.status == s; }));
}

Json VerificationReport::to_json() const
{
    Json list = Json::array();
    for (const auto& c : checks) {
        Json rec{{"id", c.id},
                 {"suite", c.suite},
                 {"n", c.n},
                 {"reference", c.reference},
                 {"residual", format_double(c.residual)},
                 {"tolerance", format_double(c.tolerance)},
                 {"status", toda::to_string(c.status)}};
        if (!c.detail.empty())
            rec["detail"] = c.detail;
        if (config.timings)
            rec["wall_ms"] = format_double(c.wall_ms);
        list.push_back(std::move(rec));
    }
    return Json{{"config", config.to_json()},
                {"summary",
                 {{"checks", checks.size()},
                  {"pass", count(CheckStatus::pass)},
                  {"fail", count(CheckStatus::fail)},
                  {"inconclusive", count(CheckStatus::inconclusive)}}},
                {"checks", list}};
}

int threads_from_environment()
{
    const char* env = std::getenv("TODA_LAX_THREADS");
    if (!env || !*env)
        return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int v = parse_int("TODA_LAX_THREADS", env);
    if (v < 1)
        throw ConfigError("TODA_LAX_THREADS must be a positive integer");
    return v;
}

VerificationReport run_verification(const RunConfig& config)
{
    config.validate();
    return Verifier(config).run();
}

} // namespace toda
