#pragma once

#include "ahop/rng.hpp"
#include "ahop/types.hpp"
#include "ahop/variants.hpp"

namespace ahop {

struct TrainConfig {
    int epochs = 200;
    double learning_rate = 0.1;
    /// Samples per Adam step; 0 = the whole sample set at once.
    int batch_size = 0;
    /// Finite budget: one fixed set of `sample_count` samples reused every
    /// epoch. Online: `sample_count` fresh draws each epoch.
    bool online = false;
    int sample_count = 512;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate() const;

    /// Hyperparameters stated for the retrieval experiments.
    static TrainConfig paper_default() { return {}; }
    /// Kernel runs diverge at lr 0.1; 1e-2 is the tuned default.
    static TrainConfig kernel_default();
};

struct BaseGradient {
    Vector dw;
    double dbeta = 0.0;
    Matrix dU;         // only when the base has a trainable U matrix
    bool has_dU = false;
};

struct GradientSet {
    std::vector<BaseGradient> bases;
};

/// Mean over the batch of -log softmax(adaptive_scores)_origin, via
/// max-shifted log-sum-exp.
double loss(const MemoryMatrix& memory, const std::vector<VariantSample>& batch,
            const WeightSet& weights);

/// Exact analytic gradient of `loss` in every w, beta (and U where
/// trainable). The per-sample sort permutation is treated as constant,
/// which is the true gradient wherever the sorted order is strict.
GradientSet gradient(const MemoryMatrix& memory, const std::vector<VariantSample>& batch,
                     const WeightSet& weights);

/// Adam-optimize a WeightSet against samples drawn from the spec.
/// Deterministic for a given (init, cfg, rng). If loss_log is non-null it
/// receives one pre-step loss per epoch.
WeightSet train(const MemoryMatrix& memory, const VariantSpec& spec, WeightSet init,
                const TrainConfig& cfg, RngState& rng, std::vector<double>* loss_log = nullptr);

/// Adam-optimize a K2-Hop kernel (scores beta * (Phi Xi)' (Phi x)) on the
/// same objective. Init: Gaussian entries scaled 1/sqrt(d).
Matrix train_kernel(const MemoryMatrix& memory, const VariantSpec& spec, int d_phi,
                    const TrainConfig& cfg, RngState& rng, double beta = 1.0,
                    std::vector<double>* loss_log = nullptr);

/// Closed-form weights that make the adaptive score equal the noisy-variant
/// log-likelihood up to an affine map: a single unsorted Dis base whose
/// suffix sums satisfy (U' w)_i = 1 / sigma_i.
WeightSet optimal_weights_noisy(const Vector& sigma);

/// b = 2 * drift, for use with the unified score of the energy module.
Vector optimal_bias(const Vector& drift);

}  // namespace ahop
