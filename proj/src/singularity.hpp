#pragma once

// Rank of the integrals' differential, relative equilibria with closed-form
// spectra, a Gauss-Newton locator for degenerate points, and the local
// bracket / Hessian structure at such points.

#include "spectral.hpp"

#include <string>
#include <vector>

namespace toda {

inline constexpr double kDefaultRankTol = 1e-7;

struct CorankReport {
    PhasePoint z;
    Vector singular_values; ///< descending, of the degree-scaled Jacobian
    int corank = 0;
    int nu = 0;
    int nubar = 0;
    /// Columns c with sum_j c_j dF_j ~ 0 (unit norm).
    Matrix null_basis;
    double rank_tol = kDefaultRankTol;
    /// Some singular value sits inside [0.1, 10] * rank_tol * sigma_max.
    bool inconclusive = false;

    bool agrees() const noexcept { return corank == nu + nubar; }
};

/// Corank of the n x 2n Jacobian of (F_1..F_n). Row j is scaled by
/// max(1, |L|)^{-(j-1)} before the SVD; this does not change the rank.
CorankReport corank(const PhasePoint& z, double rank_tol = kDefaultRankTol,
                    double degeneracy_tol = kDefaultDegeneracyTol);

/// Relative equilibrium q = q0, p = p0 with predicted spectra.
struct OmegaPoint {
    PhasePoint z;
    Vector even_values; ///< descending
    Vector odd_values;  ///< descending
    int nu = 0;
    int nubar = 0;
};

OmegaPoint omega_point(int n, double q0 = 0.0, double p0 = 0.0);

struct FrequencyReport {
    PairTarget pair;
    double lambda = 0.0;
    double derivative_at_root = 0.0; ///< T'(lambda)
    /// u_{2r} . M . u_{2r-1} with M the sign-weighted bond matrix
    /// (entries +-eps_r b_r, no factor 1/2).
    double denominator = 0.0;
    /// max over m of |n eps_m b_m (u1_{m+1} u2_m - u1_m u2_{m+1}) - denominator|.
    double m_independence = 0.0;
    /// {xi, eta} at the point, from analytic differentials.
    double bracket = 0.0;
    /// 2 T' {xi, eta}: rotation rate of the linearised flow in (xi, eta).
    double omega = 0.0;
    /// 2 n T' / denominator, the closed form as usually quoted.
    double omega_closed_form = 0.0;
};

struct SingularPoint {
    PhasePoint z;
    std::vector<PairTarget> targets;
    std::vector<double> residual_gaps;
    std::vector<FrequencyReport> frequencies;
    int iterations = 0;
};

struct FindOptions {
    int max_iter = 60;
    /// Converged once every target gap is below gap_tol * max(1, range).
    double gap_tol = 1e-12;
    double min_overlap = 0.9;
    double degeneracy_tol = kDefaultDegeneracyTol;
};

/// Drives the target pairs to degeneracy. Throws ConvergenceError when the
/// iteration stalls or when pairs other than the targets end up degenerate.
SingularPoint find_singular(const PhasePoint& seed, const std::vector<PairTarget>& targets,
                            const FindOptions& options = {});

/// Omega point (q = p = 0) pushed off the stratum so that every allowed pair
/// except the targets opens by about `magnitude`.
PhasePoint perturbed_omega_seed(int n, const std::vector<PairTarget>& targets, double magnitude);

FrequencyReport transverse_frequency(const PhasePoint& z, const PairTarget& pair,
                                     double degeneracy_tol = kDefaultDegeneracyTol);

struct HessianReport {
    PairTarget pair;
    Matrix hessian; ///< G'' by central differences of the analytic gradient
    double hessian_norm = 0.0;
    /// |G'' - 2T'(dxi dxi + deta deta + dtau dtau)|_max
    double dyadic_residual = 0.0;
    /// Same, after also subtracting T'(lambda_a) dlambda_a dlambda_a for each
    /// simple eigenvalue lambda_a.
    double full_dyadic_residual = 0.0;
    double omega_eigen = 0.0;      ///< largest |Im| eigenvalue of J G''
    double max_real_part = 0.0;    ///< max |Re| over eigenvalues of J G''
    double max_other_modulus = 0.0; ///< largest |eigenvalue| outside the +-i omega pair
    double trace_square = 0.0;     ///< Tr (J G'')^2
    int hessian_rank = 0;
    FrequencyReport frequency;
};

HessianReport hessian_structure_check(const PhasePoint& z, const PairTarget& pair,
                                      double degeneracy_tol = kDefaultDegeneracyTol);

struct BracketEntry {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    bool zero_pattern = true;
};

struct BracketReport {
    int n = 0;
    std::vector<BracketEntry> entries;
    /// max over zero-pattern brackets of |value|
    double zero_residual = 0.0;
    /// per pair: n {xi, eta} / (u_{2r} . M . u_{2r-1})
    std::vector<double> normalized_ratios;
    std::vector<FrequencyReport> pairs;
};

/// All brackets among the frozen-frame xi, eta, tau of every degenerate pair
/// of both classes at z.
BracketReport bracket_relations_check(const PhasePoint& z, double degeneracy_tol = kDefaultDegeneracyTol);

/// Bracket of two spectral components <u, L^eps v> and <w, L^sigma x>,
/// computed from analytic differentials.
double spectral_component_bracket(const PhasePoint& z, const SignVector& eps, const Vector& u, const Vector& v,
                                  const SignVector& sigma, const Vector& w, const Vector& x);

/// (1/n) [(v.D.x)(u.M^eps D.w) + (u.D.w)(v.M^eps D.x)] with
/// D = diag(prod_{k<m} eps_k sigma_k) and M^eps the signed bond matrix.
/// Only meaningful when u, v and w, x span eigenvectors of a shared
/// eigenvalue and parity(eps sigma) = +1.
double spectral_component_closed_form(const PhasePoint& z, const SignVector& eps, const Vector& u, const Vector& v,
                                      const SignVector& sigma, const Vector& w, const Vector& x);

struct TangentReport {
    int codimension = 0;
    /// Smallest singular value of the symplectic form restricted to the
    /// tangent space of the stratum (the joint kernel of the xi, eta rows).
    double min_singular = 0.0;
    /// Angle between the corank null vector and the annihilator coefficients,
    /// for a single degenerate pair; zero otherwise.
    double null_vector_angle = 0.0;
};

TangentReport symplectic_tangent_check(const PhasePoint& z, double rank_tol = kDefaultRankTol,
                                       double degeneracy_tol = kDefaultDegeneracyTol);

} // namespace toda
