#include "ahop/energy.hpp"

#include <cmath>
#include <sstream>

namespace ahop {

namespace {

double lse(const Vector& s) {
    const double m = s.maxCoeff();
    return m + std::log((s.array() - m).max(-700.0).exp().sum());
}

}  // namespace

void DescentConfig::validate() const {
    if (max_iters < 1) throw ConfigError("descent config: max_iters must be >= 1");
    if (!(step_tol > 0.0)) throw ConfigError("descent config: step_tol must be positive");
    if (!(energy_slack >= 0.0)) throw ConfigError("descent config: energy_slack must be >= 0");
}

Vector unified_scores(const MemoryMatrix& memory, const Vector& x, const Vector& b) {
    if (x.size() != memory.dim() || b.size() != memory.dim())
        throw DimensionError("unified_scores: length mismatch");
    detail::require_finite(x, "unified_scores x");
    detail::require_finite(b, "unified_scores b");
    Vector s(memory.count());
    for (int k = 0; k < memory.count(); ++k) {
        const Vector diff = x - memory.data().col(k);
        s[k] = -diff.squaredNorm() + b.dot(diff);
    }
    return s;
}

double energy(const MemoryMatrix& memory, const Vector& x, const Vector& b) {
    return -lse(unified_scores(memory, x, b));
}

double energy_rewritten(const MemoryMatrix& memory, const Vector& x, const Vector& b) {
    // s_k = -|x|^2 + (2 xi_k + b)' x - |xi_k|^2 - xi_k' b, so the -|x|^2
    // term factors out of the log-sum-exp
    const int N = memory.count();
    Vector ax_c(N);
    for (int k = 0; k < N; ++k) {
        const auto xi = memory.data().col(k);
        ax_c[k] = (2.0 * xi + b).dot(x) - xi.squaredNorm() - xi.dot(b);
    }
    return x.squaredNorm() - lse(ax_c);
}

double energy_lower_bound(int pattern_count, const Vector& b) {
    return -std::log(static_cast<double>(pattern_count)) - 0.25 * b.squaredNorm();
}

Vector energy_iterate(const MemoryMatrix& memory, const Vector& x, const Vector& b) {
    const Vector s = unified_scores(memory, x, b);
    const double m = s.maxCoeff();
    Vector p = (s.array() - m).max(-700.0).exp();
    p /= p.sum();
    return memory.data() * p + 0.5 * b;
}

Trajectory descend(const MemoryMatrix& memory, const Vector& x0, const Vector& b,
                   const DescentConfig& cfg) {
    cfg.validate();
    detail::require_finite(x0, "descend x0");

    Trajectory t;
    t.iterates.push_back(x0);
    t.energies.push_back(energy(memory, x0, b));
    const double bound = energy_lower_bound(memory.count(), b) - cfg.energy_slack;

    auto check = [&](double e, int step) {
        if (e < bound) {
            std::ostringstream msg;
            msg << "descend: energy " << e << " below bound " << bound << " at step " << step;
            throw InvariantViolation(msg.str());
        }
    };
    check(t.energies.back(), 0);

    for (int it = 0; it < cfg.max_iters; ++it) {
        const Vector next = energy_iterate(memory, t.iterates.back(), b);
        const double e = energy(memory, next, b);
        if (e > t.energies.back() + cfg.energy_slack) {
            std::ostringstream msg;
            msg << "descend: energy increased " << t.energies.back() << " -> " << e << " at step "
                << (it + 1) << " beyond slack " << cfg.energy_slack;
            throw InvariantViolation(msg.str());
        }
        check(e, it + 1);
        const double step_norm = (next - t.iterates.back()).norm();
        t.iterates.push_back(next);
        t.energies.push_back(e);
        t.steps = it + 1;
        if (step_norm <= cfg.step_tol) {
            t.converged = true;
            break;
        }
    }
    return t;
}

}  // namespace ahop
