#include "ahop/rng.hpp"

#include <cmath>

namespace ahop {

namespace {

uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

RngState::RngState(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {
    uint64_t s = seed;
    uint64_t a = splitmix64(s);
    s ^= stream * 0xda942042e4dd58b5ull;
    uint64_t b = splitmix64(s);
    engine_.seed(a ^ (b + 0x9e3779b97f4a7c15ull));
}

uint64_t RngState::next_u64() { return engine_(); }

double RngState::uniform() {
    // 53-bit mantissa in [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngState::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int RngState::uniform_int(int n) {
    // rejection sampling keeps the draw unbiased
    const uint64_t bound = static_cast<uint64_t>(n);
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t r;
    do {
        r = next_u64();
    } while (r >= limit);
    return static_cast<int>(r % bound);
}

double RngState::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1, u2;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    spare_ = mag * std::sin(ang);
    have_spare_ = true;
    return mag * std::cos(ang);
}

double RngState::normal(double mean, double stddev) { return mean + stddev * normal(); }

double RngState::sign() { return (next_u64() & 1ull) ? 1.0 : -1.0; }

}  // namespace ahop
