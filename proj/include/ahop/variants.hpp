#pragma once

#include "ahop/rng.hpp"
#include "ahop/types.hpp"

namespace ahop {

/// Draw one (origin, query) pair from the variant distribution.
/// Origin is uniform over columns; the query is derived per spec.kind.
VariantSample sample(const VariantSpec& spec, const MemoryMatrix& memory, RngState& rng);

std::vector<VariantSample> sample_many(const VariantSpec& spec, const MemoryMatrix& memory,
                                       int n, RngState& rng);

/// Exact log p(query | pattern) for the Noisy / Masked / Biased kinds.
/// May return -infinity; throws ConfigError for Mixed (no closed form).
double log_likelihood(const VariantSpec& spec, const Vector& query, const Vector& pattern);

/// Maximum-a-posteriori origin under a uniform prior: the lowest index
/// maximizing log_likelihood.
int map_origin(const VariantSpec& spec, const MemoryMatrix& memory, const Vector& query);

}  // namespace ahop
