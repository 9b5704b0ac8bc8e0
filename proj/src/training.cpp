#include "ahop/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ahop/similarity.hpp"

namespace ahop {

namespace {

struct LseResult {
    double lse;
    Vector p;  // softmax
};

LseResult softmax_lse(const Vector& s) {
    const double m = s.maxCoeff();
    // clamp far-underflowing exponents; subnormal exp() is pathologically slow
    Vector p = (s.array() - m).max(-700.0).exp();
    const double z = p.sum();
    p /= z;
    return {m + std::log(z), std::move(p)};
}

// Coordinate-wise Adam with bias correction.
struct Adam {
    double lr, b1, b2, eps;
    int t = 0;

    void begin_step() { ++t; }

    void update(Vector& x, const Vector& g, Vector& m, Vector& v) const {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
        const double c1 = 1.0 - std::pow(b1, t);
        const double c2 = 1.0 - std::pow(b2, t);
        x -= lr * (m / c1).cwiseQuotient(((v / c2).cwiseSqrt().array() + eps).matrix());
    }

    void update(double& x, double g, double& m, double& v) const {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        const double c1 = 1.0 - std::pow(b1, t);
        const double c2 = 1.0 - std::pow(b2, t);
        x -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
    }

    void update(Matrix& x, const Matrix& g, Matrix& m, Matrix& v) const {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
        const double c1 = 1.0 - std::pow(b1, t);
        const double c2 = 1.0 - std::pow(b2, t);
        x -= lr * (m / c1).cwiseQuotient(((v / c2).cwiseSqrt().array() + eps).matrix());
    }
};

// Per-sample, per-base matrix of (optionally sorted) dimension-wise
// similarities; row k holds q(tilde) for pattern k. Everything the epoch
// loop needs is linear in these rows.
void fill_dimwise_matrix(const MemoryMatrix& memory, const Vector& query, const BaseConfig& base,
                         Matrix& out) {
    const int N = memory.count();
    const int d = memory.dim();
    out.resize(N, d);
    Vector q(d);
    for (int k = 0; k < N; ++k) {
        if (base.base == BaseKind::Dis)
            q = -(memory.data().col(k) - query).array().square().matrix();
        else
            q = memory.data().col(k).cwiseProduct(query);
        if (base.sorted) detail::sort_descending(q);
        out.row(k) = q.transpose();
    }
}

// U r for the given mode: prefix sums for the fixed triangle.
Vector u_times(const UMode& mode, const Vector& r) {
    if (mode.is_triangular()) {
        Vector out(r.size());
        double acc = 0.0;
        for (int i = 0; i < r.size(); ++i) {
            acc += r[i];
            out[i] = acc;
        }
        return out;
    }
    return mode.matrix * r;
}

void check_batch(const std::vector<VariantSample>& batch, const MemoryMatrix& memory) {
    if (batch.empty()) throw ConfigError("loss/gradient: empty batch");
    for (const auto& s : batch) {
        if (s.query.size() != memory.dim())
            throw DimensionError("loss/gradient: sample query length mismatch");
        if (s.origin < 0 || s.origin >= memory.count())
            throw DimensionError("loss/gradient: sample origin out of range");
    }
}

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("train config: epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("train config: learning rate must be positive");
    if (sample_count < 1) throw ConfigError("train config: sample count must be >= 1");
    if (batch_size < 0) throw ConfigError("train config: batch size must be >= 0");
}

TrainConfig TrainConfig::kernel_default() {
    TrainConfig c;
    c.learning_rate = 1e-2;
    return c;
}

double loss(const MemoryMatrix& memory, const std::vector<VariantSample>& batch,
            const WeightSet& weights) {
    check_batch(batch, memory);
    double total = 0.0;
    for (const auto& s : batch) {
        const Vector scores = adaptive_scores(memory, s.query, weights);
        const auto r = softmax_lse(scores);
        total += r.lse - scores[s.origin];
    }
    return total / static_cast<double>(batch.size());
}

GradientSet gradient(const MemoryMatrix& memory, const std::vector<VariantSample>& batch,
                     const WeightSet& weights) {
    check_batch(batch, memory);
    const int d = memory.dim();
    const int N = memory.count();
    weights.validate(d);
    const int B = static_cast<int>(weights.bases.size());

    GradientSet grads;
    grads.bases.resize(B);
    for (int b = 0; b < B; ++b) {
        grads.bases[b].dw = Vector::Zero(d);
        grads.bases[b].dbeta = 0.0;
        const auto& mode = weights.bases[b].u_mode;
        if (mode.kind == UMode::Kind::Matrix && mode.trainable) {
            grads.bases[b].dU = Matrix::Zero(d, d);
            grads.bases[b].has_dU = true;
        }
    }

    Matrix qmat;
    std::vector<Matrix> footprints(B);  // N x d per base, for one sample
    for (const auto& s : batch) {
        Vector scores = Vector::Zero(N);
        for (int b = 0; b < B; ++b) {
            const auto& base = weights.bases[b];
            fill_dimwise_matrix(memory, s.query, base, qmat);
            Matrix& F = footprints[b];
            F.resize(N, d);
            if (base.u_mode.is_triangular()) {
                for (int k = 0; k < N; ++k) {
                    double acc = 0.0;
                    for (int i = 0; i < d; ++i) {
                        acc += qmat(k, i);
                        F(k, i) = acc;
                    }
                }
            } else {
                F = qmat * base.u_mode.matrix.transpose();
            }
            scores += base.beta * (F * base.w);
        }
        const auto r = softmax_lse(scores);
        Vector g = r.p;
        g[s.origin] -= 1.0;
        g /= static_cast<double>(batch.size());

        for (int b = 0; b < B; ++b) {
            const auto& base = weights.bases[b];
            grads.bases[b].dw.noalias() += base.beta * (footprints[b].transpose() * g);
            grads.bases[b].dbeta += g.dot(footprints[b] * base.w);
            if (grads.bases[b].has_dU) {
                fill_dimwise_matrix(memory, s.query, base, qmat);
                grads.bases[b].dU.noalias() += base.beta * base.w * (qmat.transpose() * g).transpose();
            }
        }
    }
    return grads;
}

WeightSet train(const MemoryMatrix& memory, const VariantSpec& spec, WeightSet init,
                const TrainConfig& cfg, RngState& rng, std::vector<double>* loss_log) {
    cfg.validate();
    const int d = memory.dim();
    const int N = memory.count();
    spec.validate(d);
    init.validate(d);
    const int B = static_cast<int>(init.bases.size());
    const int S = cfg.sample_count;

    // Dimension-wise matrices are fixed per sample; cache them across epochs
    // (or per epoch draw when online) while the budget allows.
    const double cache_bytes = static_cast<double>(S) * B * N * d * sizeof(double);
    const bool cached = cache_bytes <= 3.0e9;

    std::vector<VariantSample> samples;
    std::vector<std::vector<Matrix>> cache;  // [sample][base] -> N x d
    auto draw_samples = [&] { samples = sample_many(spec, memory, S, rng); };
    auto build_cache = [&] {
        cache.resize(S);
        for (int i = 0; i < S; ++i) {
            cache[i].resize(B);
            for (int b = 0; b < B; ++b)
                fill_dimwise_matrix(memory, samples[i].query, init.bases[b], cache[i][b]);
        }
    };

    if (!cfg.online) {
        draw_samples();
        if (cached) build_cache();
    }

    Adam adam{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
    std::vector<Vector> mw(B, Vector::Zero(d)), vw(B, Vector::Zero(d));
    std::vector<double> mb(B, 0.0), vb(B, 0.0);
    std::vector<Matrix> mU(B), vU(B);
    for (int b = 0; b < B; ++b)
        if (init.bases[b].u_mode.kind == UMode::Kind::Matrix && init.bases[b].u_mode.trainable) {
            mU[b] = Matrix::Zero(d, d);
            vU[b] = Matrix::Zero(d, d);
        }

    std::vector<int> order(S);
    std::iota(order.begin(), order.end(), 0);
    Matrix qmat;
    std::vector<Vector> u(B), r(B), partial(B);
    Vector scores(N);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.online) {
            draw_samples();
            if (cached) build_cache();
        }
        if (cfg.batch_size > 0) {
            for (int i = 0; i < S; ++i) {  // Fisher-Yates with the shared stream
                const int j = i + rng.uniform_int(S - i);
                std::swap(order[i], order[j]);
            }
        }
        const int bs = cfg.batch_size > 0 ? cfg.batch_size : S;
        double epoch_loss = 0.0;

        for (int start = 0; start < S; start += bs) {
            const int stop = std::min(S, start + bs);
            const int bn = stop - start;
            for (int b = 0; b < B; ++b) {
                u[b] = detail::u_transpose_w(init.bases[b].u_mode, init.bases[b].w);
                r[b] = Vector::Zero(d);
            }
            std::vector<double> dbeta(B, 0.0);
            double batch_loss = 0.0;

            for (int pos = start; pos < stop; ++pos) {
                const int i = order[pos];
                scores.setZero();
                for (int b = 0; b < B; ++b) {
                    const Matrix* Q = cached ? &cache[i][b] : &qmat;
                    if (!cached) fill_dimwise_matrix(memory, samples[i].query, init.bases[b], qmat);
                    partial[b].noalias() = (*Q) * u[b];
                    scores.noalias() += init.bases[b].beta * partial[b];
                }
                const auto sm = softmax_lse(scores);
                batch_loss += sm.lse - scores[samples[i].origin];
                Vector g = sm.p;
                g[samples[i].origin] -= 1.0;
                g /= static_cast<double>(bn);
                for (int b = 0; b < B; ++b) {
                    const Matrix* Q = cached ? &cache[i][b] : &qmat;
                    if (!cached && B > 1)
                        fill_dimwise_matrix(memory, samples[i].query, init.bases[b], qmat);
                    r[b].noalias() += Q->transpose() * g;
                    dbeta[b] += g.dot(partial[b]);
                }
            }

            batch_loss /= static_cast<double>(bn);
            if (!std::isfinite(batch_loss)) {
                std::ostringstream msg;
                msg << "train: non-finite loss at epoch " << epoch << " (lr=" << cfg.learning_rate
                    << ", batch=" << bn << ")";
                throw TrainingError(msg.str());
            }
            epoch_loss += batch_loss * bn;

            adam.begin_step();
            for (int b = 0; b < B; ++b) {
                auto& base = init.bases[b];
                const Vector dw = base.beta * u_times(base.u_mode, r[b]);
                adam.update(base.w, dw, mw[b], vw[b]);
                adam.update(base.beta, dbeta[b], mb[b], vb[b]);
                if (base.u_mode.kind == UMode::Kind::Matrix && base.u_mode.trainable) {
                    const Matrix dU = base.beta * base.w * r[b].transpose();
                    adam.update(base.u_mode.matrix, dU, mU[b], vU[b]);
                }
            }
        }
        if (loss_log) loss_log->push_back(epoch_loss / S);
    }
    return init;
}

Matrix train_kernel(const MemoryMatrix& memory, const VariantSpec& spec, int d_phi,
                    const TrainConfig& cfg, RngState& rng, double beta,
                    std::vector<double>* loss_log) {
    cfg.validate();
    if (d_phi < 1) throw ConfigError("train_kernel: d_phi must be >= 1");
    const int d = memory.dim();
    const int N = memory.count();
    spec.validate(d);
    const int S = cfg.sample_count;

    Matrix phi(d_phi, d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d_phi; ++i)
        for (int j = 0; j < d; ++j) phi(i, j) = rng.normal() * scale;

    std::vector<VariantSample> samples;
    Matrix X;  // d x S query matrix
    std::vector<int> origin(S);
    auto draw = [&] {
        samples = sample_many(spec, memory, S, rng);
        X.resize(d, S);
        for (int i = 0; i < S; ++i) {
            X.col(i) = samples[i].query;
            origin[i] = samples[i].origin;
        }
    };
    if (!cfg.online) draw();

    Adam adam{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
    Matrix m = Matrix::Zero(d_phi, d), v = Matrix::Zero(d_phi, d);

    std::vector<int> order(S);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.online) draw();
        if (cfg.batch_size > 0) {
            for (int i = 0; i < S; ++i) {
                const int j = i + rng.uniform_int(S - i);
                std::swap(order[i], order[j]);
            }
        }
        const int bs = cfg.batch_size > 0 ? cfg.batch_size : S;
        double epoch_loss = 0.0;

        for (int start = 0; start < S; start += bs) {
            const int stop = std::min(S, start + bs);
            const int bn = stop - start;
            Matrix Xb(d, bn);
            for (int c = 0; c < bn; ++c) Xb.col(c) = X.col(order[start + c]);

            const Matrix P = phi * memory.data();       // d_phi x N
            const Matrix Z = phi * Xb;                  // d_phi x bn
            Matrix G = beta * (P.transpose() * Z);      // N x bn scores, then grads in place
            double batch_loss = 0.0;
            for (int c = 0; c < bn; ++c) {
                const auto sm = softmax_lse(G.col(c));
                batch_loss += sm.lse - G(origin[order[start + c]], c);
                G.col(c) = sm.p;
                G(origin[order[start + c]], c) -= 1.0;
            }
            G /= static_cast<double>(bn);
            batch_loss /= static_cast<double>(bn);
            if (!std::isfinite(batch_loss)) {
                std::ostringstream msg;
                msg << "train_kernel: non-finite loss at epoch " << epoch
                    << " (lr=" << cfg.learning_rate << ")";
                throw TrainingError(msg.str());
            }
            epoch_loss += batch_loss * bn;

            const Matrix R = memory.data() * G;  // d x bn
            const Matrix dphi = beta * phi * (Xb * R.transpose() + R * Xb.transpose());
            adam.begin_step();
            adam.update(phi, dphi, m, v);
        }
        if (loss_log) loss_log->push_back(epoch_loss / S);
    }
    return phi;
}

WeightSet optimal_weights_noisy(const Vector& sigma) {
    const int d = static_cast<int>(sigma.size());
    if (d < 1 || (sigma.array() <= 0.0).any())
        throw ConfigError("optimal_weights_noisy: sigma must be strictly positive");
    // (U' w)_i = u_i = 1/sigma_i via suffix differences
    Vector u = sigma.cwiseInverse();
    BaseConfig base;
    base.base = BaseKind::Dis;
    base.sorted = false;
    base.beta = 1.0;
    base.w = Vector(d);
    for (int i = 0; i < d - 1; ++i) base.w[i] = u[i] - u[i + 1];
    base.w[d - 1] = u[d - 1];
    return WeightSet{{base}};
}

Vector optimal_bias(const Vector& drift) {
    detail::require_finite(drift, "optimal_bias drift");
    return 2.0 * drift;
}

}  // namespace ahop
