#include "ahop/variants.hpp"

#include <cfenv>
#include <cmath>
#include <limits>
#include <numeric>

namespace ahop {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// First `take` entries of a Fisher-Yates shuffle over [0, d).
std::vector<int> distinct_indices(int d, int take, RngState& rng) {
    std::vector<int> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < take; ++i) {
        const int j = i + rng.uniform_int(d - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(take);
    return idx;
}

double sigma_at(const VariantSpec& spec, int i) {
    return spec.sigma.size() == 1 ? spec.sigma[0] : spec.sigma[i];
}

}  // namespace

VariantSample sample(const VariantSpec& spec, const MemoryMatrix& memory, RngState& rng) {
    const int d = memory.dim();
    spec.validate(d);
    VariantSample out;
    out.origin = rng.uniform_int(memory.count());
    out.query = memory.data().col(out.origin);

    switch (spec.kind) {
        case VariantKind::Noisy:
            for (int i = 0; i < d; ++i)
                out.query[i] += rng.normal(0.0, std::sqrt(sigma_at(spec, i)));
            break;
        case VariantKind::Masked:
            for (int i = 0; i < d; ++i)
                if (rng.uniform() < spec.p_masked)
                    out.query[i] = rng.uniform(spec.mask_low, spec.mask_high);
            break;
        case VariantKind::Biased:
            out.query += spec.drift;
            break;
        case VariantKind::Mixed: {
            // noise, then mask, then bias; the triplet's noise intensity is
            // the per-dimension standard deviation
            if (spec.mixed_triplet.noise > 0.0)
                for (int i = 0; i < d; ++i) out.query[i] += rng.normal(0.0, spec.mixed_triplet.noise);
            const int n_mask = static_cast<int>(std::nearbyint(d * spec.mixed_triplet.mask));
            if (n_mask > 0)
                for (int i : distinct_indices(d, n_mask, rng))
                    out.query[i] = rng.uniform(-1.0, 1.0);
            out.query += spec.drift;
            break;
        }
    }
    return out;
}

std::vector<VariantSample> sample_many(const VariantSpec& spec, const MemoryMatrix& memory,
                                       int n, RngState& rng) {
    std::vector<VariantSample> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(sample(spec, memory, rng));
    return out;
}

double log_likelihood(const VariantSpec& spec, const Vector& query, const Vector& pattern) {
    if (query.size() != pattern.size())
        throw DimensionError("log_likelihood: query and pattern length mismatch");
    const int d = static_cast<int>(query.size());
    spec.validate(d);

    switch (spec.kind) {
        case VariantKind::Noisy: {
            double logdet = 0.0, quad = 0.0;
            for (int i = 0; i < d; ++i) {
                const double s = sigma_at(spec, i);
                const double r = query[i] - pattern[i];
                logdet += std::log(s);
                quad += r * r / s;
            }
            return -0.5 * d * std::log(2.0 * M_PI) - 0.5 * logdet - 0.5 * quad;
        }
        case VariantKind::Masked: {
            int mismatches = 0;
            for (int i = 0; i < d; ++i)
                if (std::abs(query[i] - pattern[i]) > spec.match_tol) ++mismatches;
            if (mismatches > 0 && spec.p_masked == 0.0) return kNegInf;
            const double log_g = -std::log(spec.mask_high - spec.mask_low);
            const double log_keep = std::log1p(-spec.p_masked);
            double lp = (d - mismatches) * log_keep;
            if (mismatches > 0) lp += mismatches * (std::log(spec.p_masked) + log_g);
            return lp;
        }
        case VariantKind::Biased: {
            for (int i = 0; i < d; ++i)
                if (std::abs(query[i] - pattern[i] - spec.drift[i]) > spec.match_tol)
                    return kNegInf;
            return 0.0;
        }
        case VariantKind::Mixed:
            throw ConfigError("log_likelihood: mixed variants have no closed-form likelihood");
    }
    throw ConfigError("log_likelihood: unknown variant kind");
}

int map_origin(const VariantSpec& spec, const MemoryMatrix& memory, const Vector& query) {
    int best = 0;
    double best_lp = kNegInf;
    for (int k = 0; k < memory.count(); ++k) {
        const double lp = log_likelihood(spec, query, memory.data().col(k));
        if (lp > best_lp) {
            best_lp = lp;
            best = k;
        }
    }
    return best;
}

}  // namespace ahop
