#pragma once

// Eigen-decomposition of Lax matrices with a deterministic basis convention,
// degeneracy bookkeeping, the interlacing chain between L and Lbar, and the
// local 2x2-block coordinates (xi, eta, tau) around a degenerate point.

#include "lax_core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace toda {

inline constexpr double kDefaultDegeneracyTol = 1e-8;

/// Descending spectrum of a real symmetric matrix.
struct SpectralData {
    Vector values;  ///< descending
    Matrix vectors; ///< column k is the eigenvector of values[k]
    Vector gaps;    ///< values[k] - values[k+1]
    /// Zero-based position k of every flagged pair (k, k+1).
    std::vector<int> degenerate_pairs;
    double degeneracy_threshold = 0.0;

    int n() const noexcept { return static_cast<int>(values.size()); }
    bool is_degenerate(int first) const;
    double spectral_range() const { return values[0] - values[n() - 1]; }
};

/// Eigenpairs sorted descending. A pair is flagged when its gap is below
/// degeneracy_tol * max(1, spectral range). Inside a flagged pair the basis is
/// rotated onto `reference` (maximal overlap) when given; otherwise the first
/// vector is rotated to carry the largest possible leading component. Isolated
/// vectors are sign-aligned with `reference`, or have their largest entry
/// positive. Three consecutive equal eigenvalues throw NumericalError.
SpectralData decompose(const Matrix& symmetric, double degeneracy_tol = kDefaultDegeneracyTol,
                       const Matrix* reference = nullptr);
SpectralData decompose(const LaxMatrix& l, double degeneracy_tol = kDefaultDegeneracyTol,
                       const Matrix* reference = nullptr);

/// A degenerate pair of one Lax class: eigenvalues at positions first, first+1
/// (descending, zero-based).
struct PairTarget {
    LaxClass lax_class = LaxClass::even;
    int first = 0;

    /// One-based label r with lambda_r = lambda_{r+1} (r even for the even
    /// class, odd for the odd class).
    int label() const noexcept { return first + 1; }
    std::string to_string() const;
    bool operator==(const PairTarget&) const = default;
};

/// Parses "even:2" / "odd:1" (one-based labels).
PairTarget parse_pair_target(const std::string& text, int n);

/// Pair positions that can ever degenerate for this class.
std::vector<PairTarget> allowed_pairs(LaxClass c, int n);

/// True when `first` is an allowed degeneracy position for the class.
bool is_allowed_pair(LaxClass c, int first, int n);

struct InterlacingViolation {
    std::string description;
    double margin = 0.0;
};

struct InterlacingReport {
    Vector even_values;
    Vector odd_values;
    std::vector<InterlacingViolation> violations;
    bool passed() const noexcept { return violations.empty(); }
};

/// Checks lambda_1 > lbar_1 >= lbar_2 > lambda_2 >= lambda_3 > lbar_3 >= ...
/// Strict steps must exceed tol * max(1, range); weak steps may undershoot by it.
InterlacingReport interlacing_check(const PhasePoint& z, double tol);

/// Frozen eigenbases of L and Lbar at a base point together with the pairs
/// whose 2x2 blocks are tracked.
struct BlockFrame {
    PhasePoint base;
    SpectralData even;
    SpectralData odd;
    std::vector<PairTarget> pairs;

    const SpectralData& spectrum(LaxClass c) const { return c == LaxClass::even ? even : odd; }
};

/// Frame at z tracking every flagged degenerate pair of both classes.
BlockFrame make_block_frame(const PhasePoint& z, double degeneracy_tol = kDefaultDegeneracyTol);
/// Frame at z tracking the given pairs, degenerate or not.
BlockFrame make_block_frame(const PhasePoint& z, std::vector<PairTarget> pairs,
                            double degeneracy_tol = kDefaultDegeneracyTol);

struct PairCoordinates {
    PairTarget pair;
    double xi = 0.0;  ///< (<u2, L u2> - <u1, L u1>) / 2
    double eta = 0.0; ///< <u1, L u2>
    double tau = 0.0; ///< (<u2, L u2> + <u1, L u1>) / 2
};

struct BlockCoordinates {
    PhasePoint base;
    std::vector<PairCoordinates> pairs;
};

/// Block coordinates of L(z), Lbar(z) in the frozen frame. Throws
/// FrameValidityError when a tracked eigenspace of L(z) overlaps the frame by
/// less than min_overlap (smallest principal cosine).
BlockCoordinates block_coordinates(const PhasePoint& z, const BlockFrame& frame, double min_overlap = 0.9);

/// Smallest principal cosine between the frame's pair subspace and the
/// current eigenspace at the same positions.
double frame_overlap(const PhasePoint& z, const BlockFrame& frame, const PairTarget& pair);

/// Gradients (over q then p) of the frozen-frame xi, eta, tau at z.
struct PairDifferentials {
    PairTarget pair;
    Vector dxi;
    Vector deta;
    Vector dtau;
};

std::vector<PairDifferentials> block_differentials(const PhasePoint& z, const BlockFrame& frame);

/// T(x) = det(L* - xI) / (lambda* - x) as coefficients of x^0 .. x^{n-1}.
struct AnnihilatorPolynomial {
    Vector coefficients;
    PairTarget pair;
    double root = 0.0;
    double derivative_at_root = 0.0;

    double operator()(double x) const;
    double derivative(double x) const;
};

/// Requires `pair.first` to be flagged degenerate in `spec`.
AnnihilatorPolynomial annihilator(const SpectralData& spec, PairTarget pair);

} // namespace toda
