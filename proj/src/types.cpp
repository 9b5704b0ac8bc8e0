#include "ahop/types.hpp"

#include <cmath>

#include "ahop/rng.hpp"

namespace ahop {

namespace detail {

void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) throw DimensionError(std::string(what) + ": non-finite entries");
}

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw DimensionError(std::string(what) + ": non-finite entries");
}

}  // namespace detail

MemoryMatrix::MemoryMatrix(Matrix data) : data_(std::move(data)) {
    if (data_.rows() < 1 || data_.cols() < 1)
        throw DimensionError("MemoryMatrix: need at least one pattern and one dimension");
    detail::require_finite(data_, "MemoryMatrix");
}

Eigen::Ref<const Vector> MemoryMatrix::pattern(int k) const {
    if (k < 0 || k >= count()) throw DimensionError("MemoryMatrix: pattern index out of range");
    return data_.col(k);
}

const char* to_string(SeparationKind k) {
    return k == SeparationKind::Softmax ? "softmax" : "argmax";
}

const char* to_string(BaseKind k) { return k == BaseKind::Dis ? "dis" : "dot"; }

const char* to_string(VariantKind k) {
    switch (k) {
        case VariantKind::Noisy: return "noisy";
        case VariantKind::Masked: return "masked";
        case VariantKind::Biased: return "biased";
        case VariantKind::Mixed: return "mixed";
    }
    return "?";
}

VariantSpec VariantSpec::noisy(Vector sigma) {
    VariantSpec s;
    s.kind = VariantKind::Noisy;
    s.sigma = std::move(sigma);
    if (s.sigma.size() == 0 || (s.sigma.array() <= 0.0).any())
        throw ConfigError("noisy spec: sigma must be strictly positive in every dimension");
    return s;
}

VariantSpec VariantSpec::noisy_iso(double sigma, int d) {
    if (d < 1) throw ConfigError("noisy spec: d must be positive");
    return noisy(Vector::Constant(d, sigma));
}

VariantSpec VariantSpec::masked(double p, double lo, double hi) {
    VariantSpec s;
    s.kind = VariantKind::Masked;
    s.p_masked = p;
    s.mask_low = lo;
    s.mask_high = hi;
    if (!(p >= 0.0 && p < 1.0)) throw ConfigError("masked spec: need 0 <= p_masked < 1");
    if (!(lo < hi)) throw ConfigError("masked spec: need mask_low < mask_high");
    return s;
}

VariantSpec VariantSpec::biased(Vector drift) {
    VariantSpec s;
    s.kind = VariantKind::Biased;
    s.drift = std::move(drift);
    detail::require_finite(s.drift, "biased spec drift");
    return s;
}

VariantSpec VariantSpec::mixed(MixedTriplet triplet, int d, RngState& rng) {
    if (d < 1) throw ConfigError("mixed spec: d must be positive");
    for (double v : {triplet.mask, triplet.noise, triplet.bias})
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("mixed spec: intensities must be in [0, 1]");
    VariantSpec s;
    s.kind = VariantKind::Mixed;
    s.mixed_triplet = triplet;
    s.sign_vector = Vector(d);
    for (int i = 0; i < d; ++i) s.sign_vector[i] = rng.sign();
    s.drift = s.sign_vector * triplet.bias;
    return s;
}

void VariantSpec::validate(int d) const {
    if (d < 1) throw ConfigError("variant spec: dimensionality must be positive");
    switch (kind) {
        case VariantKind::Noisy:
            if (sigma.size() != d && sigma.size() != 1)
                throw ConfigError("noisy spec: sigma length mismatch");
            if ((sigma.array() <= 0.0).any())
                throw ConfigError("noisy spec: sigma must be strictly positive");
            break;
        case VariantKind::Masked:
            if (!(p_masked >= 0.0 && p_masked < 1.0))
                throw ConfigError("masked spec: need 0 <= p_masked < 1");
            if (!(mask_low < mask_high)) throw ConfigError("masked spec: need mask_low < mask_high");
            break;
        case VariantKind::Biased:
            if (drift.size() != d) throw ConfigError("biased spec: drift length mismatch");
            break;
        case VariantKind::Mixed:
            if (sign_vector.size() != d) throw ConfigError("mixed spec: sign vector length mismatch");
            if (drift.size() != d) throw ConfigError("mixed spec: drift length mismatch");
            if (((sign_vector.array() != 1.0) && (sign_vector.array() != -1.0)).any())
                throw ConfigError("mixed spec: sign vector entries must be +-1");
            break;
    }
    if (match_tol < 0.0) throw ConfigError("variant spec: match_tol must be nonnegative");
}

UMode UMode::explicit_matrix(ahop::Matrix m, bool trainable_) {
    UMode u;
    u.kind = Kind::Matrix;
    if (m.rows() != m.cols() || m.rows() < 1) throw ConfigError("U matrix must be square");
    detail::require_finite(m, "U matrix");
    u.matrix = std::move(m);
    u.trainable = trainable_;
    return u;
}

int WeightSet::dim() const {
    if (bases.empty()) throw ConfigError("WeightSet: no bases");
    return static_cast<int>(bases.front().w.size());
}

void WeightSet::validate(int d) const {
    if (bases.empty()) throw ConfigError("WeightSet: no bases");
    const int want = d >= 0 ? d : static_cast<int>(bases.front().w.size());
    for (const auto& b : bases) {
        if (b.w.size() != want) throw DimensionError("WeightSet: w length mismatch");
        detail::require_finite(b.w, "WeightSet w");
        if (!std::isfinite(b.beta)) throw DimensionError("WeightSet: beta not finite");
        if (b.u_mode.kind == UMode::Kind::Matrix && b.u_mode.matrix.rows() != want)
            throw DimensionError("WeightSet: U matrix size mismatch");
    }
}

WeightSet WeightSet::base_dis(int d) {
    BaseConfig b;
    b.base = BaseKind::Dis;
    b.w = Vector::Zero(d);
    b.w[d - 1] = 1.0;
    return WeightSet{{b}};
}

WeightSet WeightSet::base_dis_dot(int d) {
    WeightSet ws = base_dis(d);
    BaseConfig dot = ws.bases.front();
    dot.base = BaseKind::Dot;
    ws.bases.push_back(std::move(dot));
    return ws;
}

}  // namespace ahop
