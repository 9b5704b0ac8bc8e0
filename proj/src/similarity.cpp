#include "ahop/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace ahop {

namespace detail {

void sort_descending(Vector& q) {
    std::sort(q.data(), q.data() + q.size(), std::greater<double>());
}

Vector u_transpose_w(const UMode& mode, const Vector& w) {
    if (mode.is_triangular()) {
        // (U' w)_j = sum_{i >= j} w_i
        Vector u(w.size());
        double acc = 0.0;
        for (int j = static_cast<int>(w.size()) - 1; j >= 0; --j) {
            acc += w[j];
            u[j] = acc;
        }
        return u;
    }
    return mode.matrix.transpose() * w;
}

}  // namespace detail

Vector dimwise(BaseKind base, const Vector& pattern, const Vector& query) {
    if (pattern.size() != query.size())
        throw DimensionError("dimwise: pattern and query length mismatch");
    detail::require_finite(pattern, "dimwise pattern");
    detail::require_finite(query, "dimwise query");
    if (base == BaseKind::Dis) {
        Vector diff = pattern - query;
        return -diff.array().square().matrix();
    }
    return pattern.cwiseProduct(query);
}

Vector footprint(const Vector& q, bool sorted) {
    detail::require_finite(q, "footprint");
    Vector f = q;
    if (sorted) detail::sort_descending(f);
    double acc = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        acc += f[i];
        f[i] = acc;
    }
    return f;
}

double k_optimal_bruteforce(BaseKind base, const Vector& pattern, const Vector& query, int k) {
    const Vector q = dimwise(base, pattern, query);
    const int d = static_cast<int>(q.size());
    if (d > 20) throw ConfigError("k_optimal_bruteforce: d > 20 would enumerate 2^d subsets");
    if (k < 1 || k > d) throw ConfigError("k_optimal_bruteforce: k out of range");
    double best = -std::numeric_limits<double>::infinity();
    for (uint32_t mask = 1; mask < (1u << d); ++mask) {
        if (std::popcount(mask) != k) continue;
        double s = 0.0;
        for (int i = 0; i < d; ++i)
            if (mask & (1u << i)) s += q[i];
        best = std::max(best, s);
    }
    return best;
}

Vector adaptive_scores(const MemoryMatrix& memory, const Vector& query, const WeightSet& weights) {
    const int d = memory.dim();
    if (query.size() != d) throw DimensionError("adaptive_scores: query length mismatch");
    weights.validate(d);
    detail::require_finite(query, "adaptive_scores query");

    Vector scores = Vector::Zero(memory.count());
    Vector q(d);
    for (const auto& base : weights.bases) {
        for (int k = 0; k < memory.count(); ++k) {
            if (base.base == BaseKind::Dis)
                q = -(memory.data().col(k) - query).array().square().matrix();
            else
                q = memory.data().col(k).cwiseProduct(query);
            if (base.sorted) detail::sort_descending(q);
            double s;
            if (base.u_mode.is_triangular()) {
                // w' U q = sum_i w_i * cumsum(q)_i
                double acc = 0.0, dot = 0.0;
                for (int i = 0; i < d; ++i) {
                    acc += q[i];
                    dot += base.w[i] * acc;
                }
                s = dot;
            } else {
                s = base.w.dot(base.u_mode.matrix * q);
            }
            scores[k] += base.beta * s;
        }
    }
    return scores;
}

Vector match_count_scores(const MemoryMatrix& memory, const Vector& query, double tol) {
    if (tol < 0.0) throw ConfigError("match_count_scores: tol must be nonnegative");
    if (query.size() != memory.dim())
        throw DimensionError("match_count_scores: query length mismatch");
    Vector scores(memory.count());
    for (int k = 0; k < memory.count(); ++k)
        scores[k] = static_cast<double>(
            ((memory.data().col(k) - query).array().abs() <= tol).count());
    return scores;
}

}  // namespace ahop
