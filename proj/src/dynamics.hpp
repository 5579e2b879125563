#pragma once

// Gradients of the integrals, the canonical Poisson bracket, entrywise checks
// of the higher Lax equations, and integration of Hamiltonian flows generated
// by linear combinations of the integrals.

#include "lax_core.hpp"

#include <iosfwd>
#include <vector>

namespace toda {

/// Gradient of a phase-space function, split into q and p parts.
struct Gradient {
    Vector dq;
    Vector dp;

    static Gradient from_stacked(const Vector& g);
    Vector stacked() const;
    int n() const noexcept { return static_cast<int>(dq.size()); }
};

/// Analytic dF_j: dF_j/dp_r = (L^{j-1})_{rr},
/// dF_j/dq_r = b_r (L^{j-1})_{r,r+1} - b_{r-1} (L^{j-1})_{r-1,r}.
Gradient grad_F(const PhasePoint& z, int j);

/// n x 2n Jacobian of (F_1..F_n); row j-1 is dF_j stacked as (dq, dp).
Matrix integrals_jacobian(const PhasePoint& z);

/// Gradient of the coordinate function q_k (k < n) or p_{k-n} (k >= n).
Gradient coordinate_gradient(int n, int k);

/// {f, g} = sum_r (df/dq_r dg/dp_r - df/dp_r dg/dq_r).
double poisson(const Gradient& f, const Gradient& g);

/// Matrix of {F_i, F_j}.
Matrix involution_matrix(const PhasePoint& z);

/// max |{L_rs, F_j} - [L, M_(j)]_rs| (barred pair for the odd class), with the
/// bracket side assembled from analytic gradients.
double lax_residual(const PhasePoint& z, int j, LaxClass c);

enum class FlowMethod {
    adaptive_rk45, ///< Dormand-Prince 5(4) with dense output
    verlet         ///< fixed-step Stormer-Verlet, H-flow only
};

struct FlowOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 1e-3;
    /// Verlet step size.
    double fixed_step = 1e-3;
    FlowMethod method = FlowMethod::adaptive_rk45;
    /// Adaptive steps before giving up.
    long max_steps = 5'000'000;
};

struct FlowState {
    PhasePoint z;
    double t = 0.0;
};

struct Trajectory {
    Vector coefficients;
    std::vector<FlowState> samples;

    /// max over samples and k of |F_k(t) - F_k(0)| / max(1, |F_k(0)|).
    double integral_drift() const;
};

/// Integrates zdot = J grad(sum_j c_j F_j) and reports the state at each of
/// `times` (ascending, starting at or after 0). Throws ConvergenceError on
/// step-size underflow or when the state leaves the representable domain.
Trajectory integrate_flow(const PhasePoint& z0, const Vector& coefficients, const std::vector<double>& times,
                          const FlowOptions& options = {});

/// Evenly spaced samples on [0, t_final] (inclusive), `count` >= 2.
std::vector<double> uniform_times(double t_final, int count);

/// CSV with header t,q_1..q_n,p_1..p_n,F_1..F_n.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

} // namespace toda
