#pragma once

#include <string>

#include "ahop/rng.hpp"
#include "ahop/types.hpp"

namespace ahop {

struct DatasetSpec {
    enum class Source { Synthetic, MnistTrain };
    Source source = Source::Synthetic;
    int n = 0;            // Synthetic: pattern count
    int d = 0;            // Synthetic: dimensionality
    std::string path;     // MnistTrain: IDX3 image file
    int take_n = 0;       // MnistTrain: images to keep
};

/// N patterns with entries i.i.d. Uniform(-1, 1), drawn column by column.
MemoryMatrix synth_patterns(int N, int d, RngState& rng);

/// Parse a big-endian IDX3 image file (magic 0x00000803), flatten each
/// image row-major to d = rows*cols and rescale bytes to [-1, 1] via
/// v/127.5 - 1. Keeps the first take_n images (0 = all).
MemoryMatrix load_mnist(const std::string& path, int take_n);

MemoryMatrix load_dataset(const DatasetSpec& spec, RngState& rng);

void save_weights_json(const std::string& path, const WeightSet& weights);
WeightSet load_weights_json(const std::string& path);
void save_variant_json(const std::string& path, const VariantSpec& spec);
VariantSpec load_variant_json(const std::string& path);

/// CSV rows: iteration,energy,step_norm (step_norm empty on row 0).
void write_trajectory_csv(const std::string& path, const Trajectory& trajectory);
/// Reads back energies and step counts (iterates are not persisted).
Trajectory load_trajectory_csv(const std::string& path);

/// CSV rows: epoch,loss.
void write_training_log_csv(const std::string& path, const std::vector<double>& losses);

/// Debug dump: origin,q_0,...,q_{d-1} per sample.
void write_samples_csv(const std::string& path, const std::vector<VariantSample>& samples);

/// Shortest representation that parses back to the identical double.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ahop
