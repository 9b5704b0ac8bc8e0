#pragma once

#include <string>
#include <variant>

#include "ahop/types.hpp"

namespace ahop {

struct AHopConfig {
    WeightSet weights;
    SeparationKind sep = SeparationKind::Softmax;
};

struct MHopConfig {
    double beta = 1.0;
    SeparationKind sep = SeparationKind::Softmax;
};

/// L1 similarity with argmax separation (the separation is fixed).
struct UHopConfig {};

struct K2HopConfig {
    Matrix kernel;  // D_phi x d
    double beta = 1.0;
    SeparationKind sep = SeparationKind::Softmax;
};

using ModelConfig = std::variant<AHopConfig, MHopConfig, UHopConfig, K2HopConfig>;

std::string model_name(const ModelConfig& config);

/// Similarity scores of one query against every stored pattern.
Vector model_scores(const ModelConfig& config, const MemoryMatrix& memory, const Vector& query);

/// Separation: scores -> probability vector. Softmax is max-shifted;
/// Argmax is one-hot at the first maximal index.
Vector separation(const Vector& scores, SeparationKind kind);

/// One-iteration retrieval y = memory * separation(scores).
Vector retrieve(const ModelConfig& config, const MemoryMatrix& memory, const Vector& query);

/// Lowest-index argmin of Euclidean distance to y.
int nearest_pattern(const MemoryMatrix& memory, const Vector& y);

}  // namespace ahop
