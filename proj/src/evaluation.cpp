#include "ahop/evaluation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ahop/variants.hpp"

namespace ahop {

EvalStats evaluate_model(const ModelConfig& config, const MemoryMatrix& memory,
                         const VariantSpec& spec, int n_trials, RngState& rng) {
    if (n_trials < 1) throw ConfigError("evaluate_model: n_trials must be >= 1");
    const int d = memory.dim();
    EvalStats stats;
    int hits = 0;
    double err = 0.0;
    for (int t = 0; t < n_trials; ++t) {
        const VariantSample s = sample(spec, memory, rng);
        const Vector y = retrieve(config, memory, s.query);
        if (nearest_pattern(memory, y) == s.origin) ++hits;
        err += (y - memory.data().col(s.origin)).squaredNorm();
    }
    stats.accuracy = double(hits) / n_trials;
    stats.error_unnorm = err / n_trials;
    stats.error = stats.error_unnorm / d;
    return stats;
}

double empirical_accuracy(const ModelConfig& config, const MemoryMatrix& memory,
                          const VariantSpec& spec, int n_trials, RngState& rng) {
    return evaluate_model(config, memory, spec, n_trials, rng).accuracy;
}

std::pair<double, double> retrieval_error(const ModelConfig& config, const MemoryMatrix& memory,
                                          const VariantSpec& spec, int n_trials, RngState& rng) {
    const EvalStats s = evaluate_model(config, memory, spec, n_trials, rng);
    return {s.error, s.error_unnorm};
}

std::string ModelTemplate::display_name() const {
    if (!name.empty()) return name;
    switch (kind) {
        case Kind::AHop: return "A-Hop";
        case Kind::MHop: return "M-Hop";
        case Kind::UHop: return "U-Hop";
        case Kind::K2Hop: return "K2-Hop";
    }
    return "?";
}

WeightSet make_initial_weights(const ModelTemplate& tmpl, int d, RngState& rng) {
    if (tmpl.bases.empty()) throw ConfigError("model template: at least one base required");
    WeightSet ws;
    for (BaseKind kind : tmpl.bases) {
        BaseConfig b;
        b.base = kind;
        b.w = Vector::Zero(d);
        b.w[d - 1] = 1.0;
        b.beta = 1.0;
        b.sorted = tmpl.sorted;
        switch (tmpl.u_init) {
            case ModelTemplate::UInit::Triangular:
                b.u_mode = UMode::fixed_triangular();
                break;
            case ModelTemplate::UInit::Identity:
                b.u_mode = UMode::explicit_matrix(Matrix::Identity(d, d), tmpl.u_trainable);
                break;
            case ModelTemplate::UInit::Random: {
                Matrix u(d, d);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) u(i, j) = rng.normal();
                b.u_mode = UMode::explicit_matrix(std::move(u), tmpl.u_trainable);
                break;
            }
        }
        ws.bases.push_back(std::move(b));
    }
    return ws;
}

namespace {

// Stream layout per (setting, run): a 64-wide block keyed by the pair, with
// fixed offsets for each purpose. Training streams are additionally keyed
// by the model so they never collide with the shared evaluation stream.
constexpr uint64_t kBlock = 64;
constexpr uint64_t kMemoryOff = 0;
constexpr uint64_t kSpecOff = 1;
constexpr uint64_t kEvalOff = 2;
constexpr uint64_t kTrainOff = 8;

struct RunTask {
    int model = 0;
    int setting = 0;
    int run = 0;
};

}  // namespace

std::vector<ExperimentResult> run_experiment(const ExperimentPlan& plan) {
    if (plan.models.empty() || plan.settings.empty())
        throw ConfigError("run_experiment: empty grid");
    if (plan.runs < 1) throw ConfigError("run_experiment: runs must be >= 1");
    plan.train.validate();
    plan.kernel_train.validate();
    if (static_cast<uint64_t>(plan.models.size()) + kTrainOff > kBlock)
        throw ConfigError("run_experiment: too many models for the stream layout");

    const RngState root(plan.seed);

    // MNIST is loaded once and shared read-only; synthetic memories are
    // regenerated per task from the (setting, run) stream so tasks stay
    // independent.
    std::unique_ptr<MemoryMatrix> shared_memory;
    if (plan.dataset.source == DatasetSpec::Source::MnistTrain) {
        RngState unused(plan.seed);
        shared_memory = std::make_unique<MemoryMatrix>(load_dataset(plan.dataset, unused));
    }

    std::vector<RunTask> tasks;
    for (int m = 0; m < static_cast<int>(plan.models.size()); ++m)
        for (int s = 0; s < static_cast<int>(plan.settings.size()); ++s)
            for (int r = 0; r < plan.runs; ++r) tasks.push_back({m, s, r});

    struct RunOutcome {
        EvalStats stats;
        double wall_ms = 0.0;
        std::string error;
    };
    std::vector<RunOutcome> outcomes(tasks.size());

    auto run_one = [&](const RunTask& task) -> RunOutcome {
        const auto t0 = std::chrono::steady_clock::now();
        const ModelTemplate& tmpl = plan.models[task.model];
        const VariantTemplate& setting = plan.settings[task.setting];
        const uint64_t block =
            (static_cast<uint64_t>(task.setting) * plan.runs + task.run) * kBlock;

        MemoryMatrix memory = [&] {
            if (shared_memory) return *shared_memory;
            RngState mem_rng = root.at(block + kMemoryOff);
            return load_dataset(plan.dataset, mem_rng);
        }();
        const int d = memory.dim();

        RngState spec_rng = root.at(block + kSpecOff);
        const VariantSpec spec = VariantSpec::mixed(setting.triplet, d, spec_rng);

        ModelConfig config = [&]() -> ModelConfig {
            RngState train_rng = root.at(block + kTrainOff + task.model);
            switch (tmpl.kind) {
                case ModelTemplate::Kind::AHop: {
                    WeightSet init = make_initial_weights(tmpl, d, train_rng);
                    WeightSet fitted = train(memory, spec, std::move(init), plan.train, train_rng);
                    return AHopConfig{std::move(fitted), tmpl.sep};
                }
                case ModelTemplate::Kind::MHop:
                    return MHopConfig{tmpl.beta, tmpl.sep};
                case ModelTemplate::Kind::UHop:
                    return UHopConfig{};
                case ModelTemplate::Kind::K2Hop: {
                    const int d_phi = tmpl.d_phi > 0 ? tmpl.d_phi : d;
                    Matrix kernel =
                        train_kernel(memory, spec, d_phi, plan.kernel_train, train_rng, tmpl.beta);
                    return K2HopConfig{std::move(kernel), tmpl.beta, tmpl.sep};
                }
            }
            throw ConfigError("run_experiment: unknown model kind");
        }();

        RngState eval_rng = root.at(block + kEvalOff);
        RunOutcome out;
        out.stats = evaluate_model(config, memory, spec, plan.trials, eval_rng);
        out.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        return out;
    };

    const int jobs = plan.jobs > 0
                         ? plan.jobs
                         : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                outcomes[i] = run_one(tasks[i]);
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << plan.models[tasks[i].model].display_name() << " / "
                    << plan.settings[tasks[i].setting].label << " run " << tasks[i].run << ": "
                    << e.what();
                outcomes[i].error = msg.str();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& o : outcomes)
        if (!o.error.empty()) throw TrainingError("experiment cell failed: " + o.error);

    // fold (model, setting, run) outcomes into per-cell rows, grid order
    std::vector<ExperimentResult> results;
    size_t idx = 0;
    for (const auto& model : plan.models) {
        for (const auto& setting : plan.settings) {
            std::vector<double> acc, err;
            ExperimentResult row;
            row.model = model.display_name();
            row.setting = setting.label;
            row.runs = plan.runs;
            for (int r = 0; r < plan.runs; ++r, ++idx) {
                const auto& o = outcomes[idx];
                acc.push_back(o.stats.accuracy);
                err.push_back(o.stats.error);
                row.err_unnorm_mean += o.stats.error_unnorm;
                row.wall_ms += o.wall_ms;
            }
            row.acc_mean = std::accumulate(acc.begin(), acc.end(), 0.0) / plan.runs;
            row.err_mean = std::accumulate(err.begin(), err.end(), 0.0) / plan.runs;
            row.err_unnorm_mean /= plan.runs;
            row.acc_std = sample_std(acc);
            row.err_std = sample_std(err);
            row.acc_runs = std::move(acc);
            row.err_runs = std::move(err);
            results.push_back(std::move(row));
        }
    }
    return results;
}

const char* kResultsCsvHeader = "model,setting,runs,acc_mean,acc_std,err_mean,err_std,err_unnorm_mean,wall_ms";

std::string results_csv(const std::vector<ExperimentResult>& results) {
    std::ostringstream out;
    out << kResultsCsvHeader << '\n';
    for (const auto& r : results) {
        out << r.model << ',' << r.setting << ',' << r.runs << ',' << format_double(r.acc_mean)
            << ',' << format_double(r.acc_std) << ',' << format_double(r.err_mean) << ','
            << format_double(r.err_std) << ',' << format_double(r.err_unnorm_mean) << ','
            << format_double(r.wall_ms) << '\n';
    }
    return out.str();
}

std::string results_json(const std::vector<ExperimentResult>& results) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results) {
        arr.push_back({{"model", r.model},
                       {"setting", r.setting},
                       {"runs", r.runs},
                       {"acc_mean", r.acc_mean},
                       {"acc_std", r.acc_std},
                       {"err_mean", r.err_mean},
                       {"err_std", r.err_std},
                       {"err_unnorm_mean", r.err_unnorm_mean},
                       {"wall_ms", r.wall_ms}});
    }
    return arr.dump(2) + "\n";
}

std::vector<ExperimentResult> results_from_json(const std::string& text) {
    const nlohmann::json arr = nlohmann::json::parse(text);
    std::vector<ExperimentResult> out;
    for (const auto& j : arr) {
        ExperimentResult r;
        r.model = j.at("model").get<std::string>();
        r.setting = j.at("setting").get<std::string>();
        r.runs = j.at("runs").get<int>();
        r.acc_mean = j.at("acc_mean").get<double>();
        r.acc_std = j.at("acc_std").get<double>();
        r.err_mean = j.at("err_mean").get<double>();
        r.err_std = j.at("err_std").get<double>();
        r.err_unnorm_mean = j.at("err_unnorm_mean").get<double>();
        r.wall_ms = j.at("wall_ms").get<double>();
        out.push_back(std::move(r));
    }
    return out;
}

bool csv_equal_modulo_timing(const std::string& a, const std::string& b) {
    std::istringstream sa(a), sb(b);
    std::string la, lb;
    for (;;) {
        const bool ga = static_cast<bool>(std::getline(sa, la));
        const bool gb = static_cast<bool>(std::getline(sb, lb));
        if (ga != gb) return false;
        if (!ga) return true;
        const auto ca = la.rfind(',');
        const auto cb = lb.rfind(',');
        if (la.compare(0, ca, lb, 0, cb) != 0) return false;
    }
}

double sample_std(const std::vector<double>& xs) {
    const size_t n = xs.size();
    if (n < 2) return 0.0;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1));
}

}  // namespace ahop
