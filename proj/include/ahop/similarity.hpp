#pragma once

#include "ahop/types.hpp"

namespace ahop {

/// Dimension-wise similarity q with q_i = sim(pattern_i, query_i).
/// Dis: q_i = -(pattern_i - query_i)^2, Dot: q_i = pattern_i * query_i.
Vector dimwise(BaseKind base, const Vector& pattern, const Vector& query);

/// Similarity footprint: cumulative sums of q sorted descending
/// (sorted = true) or of q in the given order (sorted = false).
/// Entry k-1 equals the k-optimal similarity for decomposable bases.
Vector footprint(const Vector& q, bool sorted);

/// Exact max of sum_{i in D} q_i over all index subsets |D| = k, by
/// enumeration. Oracle for the footprint; guarded to d <= 20.
double k_optimal_bruteforce(BaseKind base, const Vector& pattern, const Vector& query, int k);

/// Adaptive similarity scores s_k = sum_b beta_b * w_b' * ftpt_b(pattern_k, query).
Vector adaptive_scores(const MemoryMatrix& memory, const Vector& query, const WeightSet& weights);

/// Count of dimensions with |pattern_i - query_i| <= tol, per pattern.
/// Real-valued so it plugs into the same separation pipeline.
Vector match_count_scores(const MemoryMatrix& memory, const Vector& query, double tol);

namespace detail {
/// In-place descending sort (values only; ties carry equal values, so the
/// resulting sequence is permutation-independent).
void sort_descending(Vector& q);
/// u = U' w for the given mode: suffix sums for the fixed triangle.
Vector u_transpose_w(const UMode& mode, const Vector& w);
}  // namespace detail

}  // namespace ahop
