#include "ahop/json_io.hpp"

namespace ahop {

using nlohmann::json;

namespace {

json vector_to_json(const Vector& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vector vector_from_json(const json& a, const char* what) {
    if (!a.is_array()) throw FormatError(std::string(what) + ": expected an array");
    Vector v(a.size());
    for (size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
    return v;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& a, const char* what) {
    if (!a.is_array() || a.empty()) throw FormatError(std::string(what) + ": expected row arrays");
    const size_t cols = a[0].size();
    Matrix m(a.size(), cols);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != cols) throw FormatError(std::string(what) + ": ragged rows");
        for (size_t j = 0; j < cols; ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = a[i][j].get<double>();
    }
    return m;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* what) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw FormatError(std::string(what) + ": unknown key \"" + key + "\"");
    }
}

}  // namespace

json weights_to_json(const WeightSet& weights) {
    json bases = json::array();
    for (const auto& b : weights.bases) {
        json jb;
        jb["base"] = to_string(b.base);
        jb["w"] = vector_to_json(b.w);
        jb["beta"] = b.beta;
        jb["sorted"] = b.sorted;
        if (b.u_mode.is_triangular())
            jb["u_mode"] = "fixed_triangular";
        else
            jb["u_mode"] = json{{"matrix", matrix_to_json(b.u_mode.matrix)},
                                {"trainable", b.u_mode.trainable}};
        bases.push_back(std::move(jb));
    }
    return json{{"bases", std::move(bases)}};
}

WeightSet weights_from_json(const json& j) {
    reject_unknown_keys(j, {"bases"}, "weight set");
    if (!j.contains("bases")) throw FormatError("weight set: missing \"bases\"");
    WeightSet ws;
    for (const auto& jb : j.at("bases")) {
        reject_unknown_keys(jb, {"base", "w", "beta", "sorted", "u_mode"}, "weight set base");
        BaseConfig b;
        const std::string base = jb.at("base").get<std::string>();
        if (base == "dis")
            b.base = BaseKind::Dis;
        else if (base == "dot")
            b.base = BaseKind::Dot;
        else
            throw FormatError("weight set: unknown base \"" + base + "\"");
        b.w = vector_from_json(jb.at("w"), "weight set w");
        b.beta = jb.at("beta").get<double>();
        b.sorted = jb.at("sorted").get<bool>();
        const auto& ju = jb.at("u_mode");
        if (ju.is_string()) {
            if (ju.get<std::string>() != "fixed_triangular")
                throw FormatError("weight set: unknown u_mode \"" + ju.get<std::string>() + "\"");
            b.u_mode = UMode::fixed_triangular();
        } else {
            reject_unknown_keys(ju, {"matrix", "trainable"}, "u_mode");
            b.u_mode = UMode::explicit_matrix(matrix_from_json(ju.at("matrix"), "u_mode matrix"),
                                              ju.at("trainable").get<bool>());
        }
        ws.bases.push_back(std::move(b));
    }
    ws.validate();
    return ws;
}

json variant_to_json(const VariantSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind);
    j["match_tol"] = spec.match_tol;
    switch (spec.kind) {
        case VariantKind::Noisy:
            j["sigma"] = vector_to_json(spec.sigma);
            break;
        case VariantKind::Masked:
            j["p_masked"] = spec.p_masked;
            j["mask_low"] = spec.mask_low;
            j["mask_high"] = spec.mask_high;
            break;
        case VariantKind::Biased:
            j["drift"] = vector_to_json(spec.drift);
            break;
        case VariantKind::Mixed:
            j["mixed_triplet"] = json::array({spec.mixed_triplet.mask, spec.mixed_triplet.noise, spec.mixed_triplet.bias});
            j["sign_vector"] = vector_to_json(spec.sign_vector);
            j["drift"] = vector_to_json(spec.drift);
            break;
    }
    return j;
}

VariantSpec variant_from_json(const json& j) {
    reject_unknown_keys(j,
                        {"kind", "sigma", "p_masked", "mask_low", "mask_high", "drift",
                         "mixed_triplet", "sign_vector", "match_tol"},
                        "variant spec");
    VariantSpec s;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "noisy") {
        s.kind = VariantKind::Noisy;
        s.sigma = vector_from_json(j.at("sigma"), "variant sigma");
    } else if (kind == "masked") {
        s.kind = VariantKind::Masked;
        s.p_masked = j.at("p_masked").get<double>();
        if (j.contains("mask_low")) s.mask_low = j.at("mask_low").get<double>();
        if (j.contains("mask_high")) s.mask_high = j.at("mask_high").get<double>();
    } else if (kind == "biased") {
        s.kind = VariantKind::Biased;
        s.drift = vector_from_json(j.at("drift"), "variant drift");
    } else if (kind == "mixed") {
        s.kind = VariantKind::Mixed;
        const auto& t = j.at("mixed_triplet");
        if (!t.is_array() || t.size() != 3)
            throw FormatError("variant spec: mixed_triplet must have 3 entries");
        s.mixed_triplet = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
        s.sign_vector = vector_from_json(j.at("sign_vector"), "variant sign_vector");
        s.drift = vector_from_json(j.at("drift"), "variant drift");
    } else {
        throw FormatError("variant spec: unknown kind \"" + kind + "\"");
    }
    if (j.contains("match_tol")) s.match_tol = j.at("match_tol").get<double>();
    return s;
}

}  // namespace ahop
