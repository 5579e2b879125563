#pragma once

// Closed curves in phase space, sign holonomies of eigenvectors transported
// along them, and the winding of the Lagrangian plane field spanned by the
// Hamiltonian vector fields of the integrals.

#include "singularity.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace toda {

using ComplexMatrix = Eigen::MatrixXcd;

/// Orientation factor between the raw det^2 winding and mu. Fixed by the
/// harmonic-oscillator angle loop, which must give mu = +2.
inline constexpr int kCalibrationSign = -1;

/// Loop t in [0, 1] -> z(t) with z(1) = z(0).
class ClosedCurve {
public:
    using Map = std::function<PhasePoint(double)>;

    ClosedCurve(Map map, int base_samples);

    /// Piecewise-linear loop through the samples; the first sample is
    /// appended when the list is not already closed.
    static ClosedCurve from_samples(std::vector<PhasePoint> samples);

    PhasePoint operator()(double t) const { return map_(t); }
    int base_samples() const noexcept { return base_samples_; }
    int n() const { return map_(0.0).n(); }

    ClosedCurve reversed() const;
    /// Same geometric loop traversed with t -> t^2 (endpoints fixed).
    ClosedCurve reparameterized() const;
    /// Same loop with a different starting sample count.
    ClosedCurve with_samples(int base_samples) const;

private:
    Map map_;
    int base_samples_;
};

struct TransportOptions {
    double min_overlap = 0.9;
    int max_depth = 40;
    double degeneracy_tol = kDefaultDegeneracyTol;
};

struct HolonomyResult {
    std::vector<int> gamma;    ///< L, descending positions
    std::vector<int> gammabar; ///< Lbar, descending positions
    int even_product = 1;      ///< over one-based even positions of both
    int odd_product = 1;       ///< over one-based odd positions of both
    int evaluations = 0;
};

HolonomyResult transport_eigenvectors(const ClosedCurve& curve, const TransportOptions& options = {});

struct WindingSample {
    double t = 0.0;
    double phase = 0.0; ///< continuous arg det(U)^2
};

struct MaslovResult {
    int mu = 0;
    double winding = 0.0; ///< raw total phase change / 2 pi
    std::vector<WindingSample> winding_trace;
    int calibration_sign = kCalibrationSign;
};

struct WindingOptions {
    double max_jump = 1.5707963267948966; ///< pi / 2
    int max_depth = 40;
    double min_gram_eigenvalue = 1e-10;
};

/// Frame of the plane at parameter t as W = A + iB (q block A, p block B).
using FrameMap = std::function<ComplexMatrix(double)>;

/// Winding of arg det(U)^2 with U the unitary part of the frame, unwrapped
/// with bisection wherever one step exceeds max_jump.
MaslovResult lagrangian_winding(const FrameMap& frame, int base_samples, const WindingOptions& options = {});

/// Columns X_{F_j} = (dF_j/dp, -dF_j/dq), each normalized.
ComplexMatrix integrals_frame(const PhasePoint& z);

MaslovResult maslov_index(const ClosedCurve& curve, const WindingOptions& options = {});

/// n uncoupled oscillators H_j = (q_j^2 + p_j^2)/2; the loop runs once
/// around the first oscillator's angle.
MaslovResult harmonic_oscillator_loop(int n, int base_samples = 64);

struct HolonomyCheck {
    HolonomyResult holonomy;
    MaslovResult maslov;
    int maslov_sign = 1; ///< (-1)^{mu/2}
    bool passed = false;
};

HolonomyCheck check_holonomy_theorem(const ClosedCurve& curve, const TransportOptions& transport = {},
                                     const WindingOptions& winding = {});

/// Vectors in the plane spanned by the Hamiltonian vector fields of xi and
/// eta for `pair` at z, dual to (dxi, deta): dxi(a) = deta(b) = 1,
/// dxi(b) = deta(a) = 0.
struct NormalPlane {
    Vector a;
    Vector b;
    Vector dxi;
    Vector deta;
    /// omega(a, b) with omega(u, v) = u_q . v_p - u_p . v_q
    double symplectic_area = 0.0;
};

NormalPlane normal_plane(const PhasePoint& z, const PairTarget& pair, double degeneracy_tol = kDefaultDegeneracyTol);

/// z(t) = z + radius (cos 2 pi t a + sin 2 pi t b).
ClosedCurve circle_around(const PhasePoint& z, const PairTarget& pair, double radius, int samples = 128,
                          double degeneracy_tol = kDefaultDegeneracyTol);

/// Map of the closed unit disk into phase space with known singular preimages.
struct DiskPatch {
    std::function<PhasePoint(double, double)> map;
    std::vector<std::pair<double, double>> singular_preimages;
    std::vector<PairTarget> pairs;
    int boundary_samples = 128;

    ClosedCurve boundary() const;
    DiskPatch reversed() const;
};

/// One singular point at the origin; orientation chosen so that its sign is +1.
DiskPatch single_point_disk(const PhasePoint& z, const PairTarget& pair, double radius);

/// Two singular points at w = +-delta: S(w) = z + rho (Re h a + Im h b) +
/// shift Re(w) e_p with h = w^2 - delta^2 and e_p the uniform momentum shift.
DiskPatch two_point_disk(const PhasePoint& z, const PairTarget& pair, double rho, double delta, double shift);

struct EnclosureReport {
    MaslovResult maslov;
    std::vector<int> sigmas;
    int expected = 0; ///< -2 sum sigma
    bool passed = false;
};

/// sigma_j = sign omega(P dS/du, P dS/dv) at each preimage, P the projection
/// onto the normal plane along the stratum.
EnclosureReport enclosure_count_check(const DiskPatch& disk, const WindingOptions& options = {},
                                      double degeneracy_tol = kDefaultDegeneracyTol);

} // namespace toda
