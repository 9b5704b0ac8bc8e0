#pragma once

#include "ahop/types.hpp"

namespace ahop {

struct DescentConfig {
    int max_iters = 100;
    /// Converged once |x_{t+1} - x_t|_2 <= step_tol.
    double step_tol = 1e-10;
    /// Allowed per-step energy increase from rounding; beyond this the
    /// descent aborts with InvariantViolation rather than clamping.
    double energy_slack = 1e-10;

    void validate() const;
};

/// s_k = -|x - xi_k|^2 + b' (x - xi_k).
Vector unified_scores(const MemoryMatrix& memory, const Vector& x, const Vector& b);

/// E(x) = -lse(unified_scores), max-shifted.
double energy(const MemoryMatrix& memory, const Vector& x, const Vector& b);

/// Same energy through the convex/concave split |x|^2 - lse(A x + c),
/// with A_k = (2 xi_k + b)' and c_k = -|xi_k|^2 - xi_k' b.
double energy_rewritten(const MemoryMatrix& memory, const Vector& x, const Vector& b);

/// -ln N - |b|^2 / 4.
double energy_lower_bound(int pattern_count, const Vector& b);

/// One CCCP step: x' = memory * softmax(unified_scores) + b / 2.
Vector energy_iterate(const MemoryMatrix& memory, const Vector& x, const Vector& b);

/// Iterate until step_tol or max_iters, recording energies. Verifies
/// monotone descent and the lower bound at every step.
Trajectory descend(const MemoryMatrix& memory, const Vector& x0, const Vector& b,
                   const DescentConfig& cfg);

}  // namespace ahop
