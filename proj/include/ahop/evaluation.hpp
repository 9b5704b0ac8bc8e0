#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ahop/data_io.hpp"
#include "ahop/models.hpp"
#include "ahop/rng.hpp"
#include "ahop/training.hpp"

namespace ahop {

struct EvalStats {
    double accuracy = 0.0;
    double error = 0.0;         // mean |T(x) - xi_origin|^2 / d
    double error_unnorm = 0.0;  // same without the 1/d factor
};

/// Accuracy and retrieval error over n_trials fresh samples from spec.
EvalStats evaluate_model(const ModelConfig& config, const MemoryMatrix& memory,
                         const VariantSpec& spec, int n_trials, RngState& rng);

/// Fraction of samples whose nearest pattern after retrieval is the origin.
double empirical_accuracy(const ModelConfig& config, const MemoryMatrix& memory,
                          const VariantSpec& spec, int n_trials, RngState& rng);

/// (normalized, unnormalized) mean squared retrieval error.
std::pair<double, double> retrieval_error(const ModelConfig& config, const MemoryMatrix& memory,
                                          const VariantSpec& spec, int n_trials, RngState& rng);

/// Untrained description of a model; learnable parameters are initialized
/// and fitted per run inside run_experiment.
struct ModelTemplate {
    enum class Kind { AHop, MHop, UHop, K2Hop };
    enum class UInit { Triangular, Identity, Random };

    Kind kind = Kind::AHop;
    std::string name;  // display label; defaults to the kind

    // A-Hop knobs (ablations)
    std::vector<BaseKind> bases{BaseKind::Dis, BaseKind::Dot};
    bool sorted = true;
    UInit u_init = UInit::Triangular;
    bool u_trainable = false;
    SeparationKind sep = SeparationKind::Softmax;

    double beta = 1.0;  // M-Hop temperature / K2-Hop scale
    int d_phi = 0;      // K2-Hop kernel rows; 0 = d

    bool learnable() const { return kind == Kind::AHop || kind == Kind::K2Hop; }
    std::string display_name() const;
};

/// Initial WeightSet for an A-Hop template: per base w = e_d, beta = 1.
WeightSet make_initial_weights(const ModelTemplate& tmpl, int d, RngState& rng);

struct VariantTemplate {
    std::string label;
    MixedTriplet triplet;
};

struct ExperimentPlan {
    DatasetSpec dataset;
    std::vector<ModelTemplate> models;
    std::vector<VariantTemplate> settings;
    int runs = 5;
    int trials = 2000;
    TrainConfig train;                 // A-Hop weights
    TrainConfig kernel_train;          // K2-Hop kernels
    uint64_t seed = 0;
    int jobs = 0;                      // worker threads; 0 = hardware default
};

struct ExperimentResult {
    std::string model;
    std::string setting;
    int runs = 0;
    double acc_mean = 0.0, acc_std = 0.0;
    double err_mean = 0.0, err_std = 0.0;
    double err_unnorm_mean = 0.0;
    double wall_ms = 0.0;
    // per-run values, in run order (not serialized)
    std::vector<double> acc_runs, err_runs;
};

/// Execute the grid: per (setting, run) a fresh seeded memory, frozen
/// spec and evaluation stream shared by every model (paired comparison);
/// learnable models are trained on a run- and model-specific stream
/// disjoint from evaluation. Cells run on a worker pool; results are
/// ordered by (model, setting) regardless of scheduling.
std::vector<ExperimentResult> run_experiment(const ExperimentPlan& plan);

extern const char* kResultsCsvHeader;  // model,setting,runs,...
std::string results_csv(const std::vector<ExperimentResult>& results);
std::string results_json(const std::vector<ExperimentResult>& results);
std::vector<ExperimentResult> results_from_json(const std::string& text);

/// Byte comparison of two results CSVs with the wall_ms column masked;
/// wall time is the one legitimately nondeterministic field.
bool csv_equal_modulo_timing(const std::string& a, const std::string& b);

/// Sample standard deviation (n - 1 denominator; 0 for n < 2).
double sample_std(const std::vector<double>& xs);

}  // namespace ahop
