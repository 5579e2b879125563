#pragma once

// Phase-space points, Lax matrices L^eps of the periodic Toda chain, the
// higher-flow generators and the conserved integrals F_j = Tr(L^j)/j, plus the
// structural checks relating the even representative L to the odd one Lbar.

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace toda {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Even class: L (periodic eigenvectors). Odd class: Lbar (antiperiodic).
enum class LaxClass { even, odd };

const char* to_string(LaxClass c) noexcept;
LaxClass other(LaxClass c) noexcept;

/// A point (q, p) of the 2n-dimensional phase space.
class PhasePoint {
public:
    /// Bonds with |q_j - q_{j+1}| above this are rejected.
    static constexpr double kMaxBondSeparation = 600.0;

    PhasePoint(Vector q, Vector p);

    /// Builds from the stacked vector (q_1..q_n, p_1..p_n).
    static PhasePoint from_stacked(const Vector& z);

    int n() const noexcept { return static_cast<int>(q_.size()); }
    const Vector& q() const noexcept { return q_; }
    const Vector& p() const noexcept { return p_; }

    /// Bond variables b_j = exp((q_j - q_{j+1})/2), q_{n+1} = q_1.
    const Vector& b() const noexcept { return b_; }

    Vector stacked() const;

private:
    Vector q_;
    Vector p_;
    Vector b_;
};

/// n-tuple of signs applied to the bonds: L^eps has eps_r b_r off the diagonal.
class SignVector {
public:
    explicit SignVector(std::vector<int> eps);

    static SignVector all_plus(int n);
    /// (1, ..., 1, -1): the odd representative Lbar.
    static SignVector odd_representative(int n);
    static SignVector of_class(LaxClass c, int n);

    int n() const noexcept { return static_cast<int>(eps_.size()); }
    int operator[](int r) const { return eps_[static_cast<std::size_t>(r)]; }
    std::span<const int> values() const noexcept { return eps_; }

    /// Product of all entries. +1 means conjugate to L, -1 conjugate to Lbar.
    int parity() const noexcept;
    LaxClass lax_class() const noexcept { return parity() > 0 ? LaxClass::even : LaxClass::odd; }

    /// Entrywise product.
    SignVector operator*(const SignVector& other) const;

private:
    std::vector<int> eps_;
};

struct LaxMatrix {
    Matrix entries;
    SignVector sign;

    int n() const noexcept { return static_cast<int>(entries.rows()); }
};

struct GeneratorMatrix {
    Matrix entries;
    int flow_index;
    LaxClass lax_class;
};

/// L^eps(z). With eps = all_plus this is L, with odd_representative it is Lbar.
/// Entries are accumulated with periodic indices, so for n = 2 the (1,2) entry
/// collects eps_1 b_1 + eps_2 b_2.
LaxMatrix build_lax(const PhasePoint& z, const SignVector& eps);
LaxMatrix build_lax(const PhasePoint& z, LaxClass c);

/// Partial derivatives of L^eps with respect to q_1..q_n then p_1..p_n.
std::vector<Matrix> lax_partials(const PhasePoint& z, const SignVector& eps);

/// Index-form antisymmetric matrix with eps_r b_r at (r, r+1) and -eps_r b_r at
/// (r+1, r). The canonical flow generator is half of this for eps = all_plus.
Matrix bond_antisymmetric(const PhasePoint& z, const SignVector& eps);

/// A^k by repeated multiplication (k >= 0).
Matrix matrix_power(const Matrix& a, int k);

/// Antisymmetric generator of the F_j flow: strict upper triangle of
/// (1/2) Lbar^{j-1} for the even class, (1/2) L^{j-1} for the odd class.
GeneratorMatrix build_generator(const PhasePoint& z, int j, LaxClass c);

/// (F_1, ..., F_n) with F_j = Tr(L^j)/j.
Vector integrals(const PhasePoint& z);

struct OffBandReport {
    int n = 0;
    int j = 0;
    /// max |(L^j - Lbar^j)_{r,r+d}| over the zero band 0 <= d <= n-j-1.
    double zero_band_residual = 0.0;
    /// Scale ||L||_2^j used to judge the zero band.
    double zero_band_scale = 1.0;
    /// max relative error of the first nonzero diagonal against
    /// 2 b_{r-1}...b_{r-j} (j < n) or 4 (j = n).
    double first_diagonal_residual = 0.0;
    bool passed = false;
};

/// Checks that L^j - Lbar^j is j-off-banded with the predicted first diagonal.
/// The first nonzero diagonal sits at (r, r+n-j), 1 <= r <= j.
OffBandReport off_band_check(const PhasePoint& z, int j, double tol);

struct TraceRelationReport {
    /// max |Tr L^j - Tr Lbar^j| over 1 <= j < n, relative to max(1, |Tr L^j|).
    double lower_residual = 0.0;
    /// |Tr L^n - Tr Lbar^n - 4n| / (4n).
    double top_residual = 0.0;
    bool passed = false;
};

TraceRelationReport trace_relation_check(const PhasePoint& z, double tol);

struct CharPolyReport {
    /// det(xI - L) - det(xI - Lbar), averaged over the grid.
    double constant = 0.0;
    /// max deviation of the sampled differences from `constant`.
    double max_deviation = 0.0;
    /// Coefficient differences (x^0 .. x^{n-1}) from Newton's identities.
    Vector coefficient_differences;
    /// ||constant| - 4|.
    double magnitude_residual = 0.0;
    bool passed = false;
};

/// Characteristic polynomial of A (det(xI - A)), coefficients of x^0..x^n,
/// from the power sums Tr A^k via Newton's identities.
Vector char_poly_newton(const Matrix& a);

CharPolyReport char_poly_offset(const PhasePoint& z, std::span<const double> x_grid, double tol);

} // namespace toda
