#pragma once

#include <cstdint>
#include <random>

namespace ahop {

/// Deterministic random stream identified by (seed, stream).
///
/// The same (seed, stream) always reproduces the same draws, on any
/// platform: the engine is the fully specified mt19937_64 and all
/// distributions are generated here rather than through the
/// implementation-defined <random> distributions. Independent streams for
/// trials/runs are derived as (seed, base_stream + index).
class RngState {
public:
    explicit RngState(uint64_t seed, uint64_t stream = 0);

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

    /// Fresh state (seed, stream + offset), independent of this one's position.
    RngState at(uint64_t stream_offset) const { return RngState(seed_, stream_ + stream_offset); }

    uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);
    /// Unbiased integer in [0, n).
    int uniform_int(int n);
    /// Standard normal via Box-Muller (pairs cached).
    double normal();
    double normal(double mean, double stddev);
    /// -1.0 or +1.0 with equal probability.
    double sign();

private:
    uint64_t seed_;
    uint64_t stream_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ahop
