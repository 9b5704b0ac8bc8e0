#include "ahop/models.hpp"

#include <cmath>

#include "ahop/similarity.hpp"

namespace ahop {

std::string model_name(const ModelConfig& config) {
    struct Visitor {
        std::string operator()(const AHopConfig&) const { return "A-Hop"; }
        std::string operator()(const MHopConfig&) const { return "M-Hop"; }
        std::string operator()(const UHopConfig&) const { return "U-Hop"; }
        std::string operator()(const K2HopConfig&) const { return "K2-Hop"; }
    };
    return std::visit(Visitor{}, config);
}

Vector model_scores(const ModelConfig& config, const MemoryMatrix& memory, const Vector& query) {
    if (query.size() != memory.dim()) throw DimensionError("model_scores: query length mismatch");
    struct Visitor {
        const MemoryMatrix& memory;
        const Vector& query;
        Vector operator()(const AHopConfig& c) const {
            return adaptive_scores(memory, query, c.weights);
        }
        Vector operator()(const MHopConfig& c) const {
            return c.beta * (memory.data().transpose() * query);
        }
        Vector operator()(const UHopConfig&) const {
            return -(memory.data().colwise() - query).cwiseAbs().colwise().sum().transpose();
        }
        Vector operator()(const K2HopConfig& c) const {
            if (c.kernel.cols() != memory.dim())
                throw DimensionError("K2-Hop kernel column count must equal d");
            return c.beta * ((c.kernel * memory.data()).transpose() * (c.kernel * query));
        }
    };
    return std::visit(Visitor{memory, query}, config);
}

Vector separation(const Vector& scores, SeparationKind kind) {
    if (scores.size() == 0) throw DimensionError("separation: empty score vector");
    detail::require_finite(scores, "separation scores");
    const int n = static_cast<int>(scores.size());
    if (kind == SeparationKind::Argmax) {
        int best = 0;
        for (int k = 1; k < n; ++k)
            if (scores[k] > scores[best]) best = k;
        Vector p = Vector::Zero(n);
        p[best] = 1.0;
        return p;
    }
    const double m = scores.maxCoeff();
    // exponents far below log(DBL_MIN) only produce slow subnormals
    Vector p = (scores.array() - m).max(-700.0).exp();
    p /= p.sum();
    return p;
}

Vector retrieve(const ModelConfig& config, const MemoryMatrix& memory, const Vector& query) {
    const Vector scores = model_scores(config, memory, query);
    SeparationKind sep = SeparationKind::Softmax;
    if (const auto* a = std::get_if<AHopConfig>(&config))
        sep = a->sep;
    else if (const auto* m = std::get_if<MHopConfig>(&config))
        sep = m->sep;
    else if (std::holds_alternative<UHopConfig>(config))
        sep = SeparationKind::Argmax;
    else if (const auto* k = std::get_if<K2HopConfig>(&config))
        sep = k->sep;
    return memory.data() * separation(scores, sep);
}

int nearest_pattern(const MemoryMatrix& memory, const Vector& y) {
    if (y.size() != memory.dim()) throw DimensionError("nearest_pattern: length mismatch");
    detail::require_finite(y, "nearest_pattern input");
    int best = 0;
    double best_d = (memory.data().col(0) - y).squaredNorm();
    for (int k = 1; k < memory.count(); ++k) {
        const double dist = (memory.data().col(k) - y).squaredNorm();
        if (dist < best_d) {
            best_d = dist;
            best = k;
        }
    }
    return best;
}

}  // namespace ahop
