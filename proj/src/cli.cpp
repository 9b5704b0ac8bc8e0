#include "ahop/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "ahop/data_io.hpp"
#include "ahop/energy.hpp"
#include "ahop/evaluation.hpp"
#include "ahop/json_io.hpp"
#include "ahop/similarity.hpp"
#include "ahop/training.hpp"
#include "ahop/variants.hpp"

namespace ahop {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitIo = 4;
constexpr const char* kVersion = "1.0.0";

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError(std::string(what) + ": unknown key \"" + key + "\"");
    }
}

DatasetSpec parse_dataset(const json& j) {
    require_keys(j, {"source", "n", "d", "path", "take_n"}, "dataset");
    DatasetSpec ds;
    const std::string source = j.at("source").get<std::string>();
    if (source == "synthetic") {
        ds.source = DatasetSpec::Source::Synthetic;
        ds.n = j.at("n").get<int>();
        ds.d = j.at("d").get<int>();
    } else if (source == "mnist_train") {
        ds.source = DatasetSpec::Source::MnistTrain;
        ds.path = j.at("path").get<std::string>();
        ds.take_n = j.value("take_n", 0);
        if (fs::path(ds.path).is_relative()) {
            if (const char* root = std::getenv("AHOP_DATA_DIR"))
                ds.path = (fs::path(root) / ds.path).string();
        }
    } else {
        throw ConfigError("dataset: unknown source \"" + source + "\"");
    }
    return ds;
}

SeparationKind parse_sep(const std::string& s) {
    if (s == "softmax") return SeparationKind::Softmax;
    if (s == "argmax") return SeparationKind::Argmax;
    throw ConfigError("unknown separation \"" + s + "\"");
}

ModelTemplate parse_model(const json& j) {
    require_keys(j,
                 {"kind", "name", "sep", "bases", "sorted", "u_init", "u_trainable", "beta",
                  "d_phi"},
                 "model");
    ModelTemplate m;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ahop")
        m.kind = ModelTemplate::Kind::AHop;
    else if (kind == "mhop")
        m.kind = ModelTemplate::Kind::MHop;
    else if (kind == "uhop")
        m.kind = ModelTemplate::Kind::UHop;
    else if (kind == "k2hop")
        m.kind = ModelTemplate::Kind::K2Hop;
    else
        throw ConfigError("model: unknown kind \"" + kind + "\"");
    m.name = j.value("name", std::string());
    if (j.contains("sep")) m.sep = parse_sep(j.at("sep").get<std::string>());
    if (j.contains("bases")) {
        m.bases.clear();
        for (const auto& b : j.at("bases")) {
            const std::string s = b.get<std::string>();
            if (s == "dis")
                m.bases.push_back(BaseKind::Dis);
            else if (s == "dot")
                m.bases.push_back(BaseKind::Dot);
            else
                throw ConfigError("model: unknown base \"" + s + "\"");
        }
    }
    m.sorted = j.value("sorted", true);
    if (j.contains("u_init")) {
        const std::string u = j.at("u_init").get<std::string>();
        if (u == "triangular")
            m.u_init = ModelTemplate::UInit::Triangular;
        else if (u == "identity")
            m.u_init = ModelTemplate::UInit::Identity;
        else if (u == "random")
            m.u_init = ModelTemplate::UInit::Random;
        else
            throw ConfigError("model: unknown u_init \"" + u + "\"");
    }
    m.u_trainable = j.value("u_trainable", false);
    m.beta = j.value("beta", 1.0);
    m.d_phi = j.value("d_phi", 0);
    return m;
}

TrainConfig parse_train(const json& j, const TrainConfig& defaults) {
    require_keys(j,
                 {"epochs", "learning_rate", "batch_size", "online", "sample_count", "adam_beta1",
                  "adam_beta2", "adam_eps"},
                 "train");
    TrainConfig t = defaults;
    t.epochs = j.value("epochs", t.epochs);
    t.learning_rate = j.value("learning_rate", t.learning_rate);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.online = j.value("online", t.online);
    t.sample_count = j.value("sample_count", t.sample_count);
    t.adam_beta1 = j.value("adam_beta1", t.adam_beta1);
    t.adam_beta2 = j.value("adam_beta2", t.adam_beta2);
    t.adam_eps = j.value("adam_eps", t.adam_eps);
    t.validate();
    return t;
}

struct BenchOverrides {
    std::optional<uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<int> jobs;
    std::optional<int> runs;
    std::optional<int> trials;
    bool dry_run = false;
};

struct BenchConfig {
    ExperimentPlan plan;
    std::string output_dir = "out";
};

BenchConfig parse_bench_config(const std::string& text, const BenchOverrides& o) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    require_keys(j,
                 {"dataset", "models", "settings", "eval", "train", "kernel_train", "output_dir",
                  "seed"},
                 "config");
    BenchConfig c;
    c.plan.dataset = parse_dataset(j.at("dataset"));
    for (const auto& jm : j.at("models")) c.plan.models.push_back(parse_model(jm));
    for (const auto& js : j.at("settings")) {
        require_keys(js, {"label", "triplet"}, "setting");
        const auto& t = js.at("triplet");
        if (!t.is_array() || t.size() != 3)
            throw ConfigError("setting: triplet must have 3 entries");
        c.plan.settings.push_back(
            {js.at("label").get<std::string>(),
             {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()}});
    }
    if (j.contains("eval")) {
        require_keys(j.at("eval"), {"runs", "trials"}, "eval");
        c.plan.runs = j.at("eval").value("runs", c.plan.runs);
        c.plan.trials = j.at("eval").value("trials", c.plan.trials);
    }
    c.plan.train = TrainConfig::paper_default();
    if (j.contains("train")) c.plan.train = parse_train(j.at("train"), TrainConfig::paper_default());
    c.plan.kernel_train = TrainConfig::kernel_default();
    if (j.contains("kernel_train"))
        c.plan.kernel_train = parse_train(j.at("kernel_train"), TrainConfig::kernel_default());
    c.plan.seed = j.value("seed", 0ull);
    c.output_dir = j.value("output_dir", std::string("out"));

    if (o.seed) c.plan.seed = *o.seed;
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.jobs) c.plan.jobs = *o.jobs;
    if (o.runs) c.plan.runs = *o.runs;
    if (o.trials) c.plan.trials = *o.trials;
    if (c.plan.models.empty() || c.plan.settings.empty())
        throw ConfigError("config: models and settings must be nonempty");
    return c;
}

void write_manifest(const std::string& output_dir, const std::string& command,
                    const std::string& config_text, uint64_t seed) {
    json m;
    m["command"] = command;
    m["config_hash"] = hex64(fnv1a64(config_text));
    m["seed"] = seed;
    m["versions"] = {{"ahop", kVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                   std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__}};
    write_text_file((fs::path(output_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

void print_grid(const BenchConfig& c) {
    std::cout << "grid: " << c.plan.models.size() << " models x " << c.plan.settings.size()
              << " settings, " << c.plan.runs << " runs, " << c.plan.trials
              << " trials, seed " << c.plan.seed << "\n";
    for (const auto& m : c.plan.models)
        for (const auto& s : c.plan.settings)
            std::cout << "  " << m.display_name() << " / " << s.label << "\n";
    std::cout << "output_dir: " << c.output_dir << "\n";
}

int do_bench(const std::string& config_path, const BenchOverrides& o, const std::string& command) {
    const std::string text = read_text_file(config_path);
    BenchConfig c = parse_bench_config(text, o);
    if (o.dry_run) {
        print_grid(c);
        return kExitOk;
    }
    fs::create_directories(c.output_dir);
    const auto results = run_experiment(c.plan);
    write_text_file((fs::path(c.output_dir) / "results.csv").string(), results_csv(results));
    write_text_file((fs::path(c.output_dir) / "results.json").string(), results_json(results));
    write_manifest(c.output_dir, command, text, c.plan.seed);
    std::cout << results_csv(results);
    return kExitOk;
}

std::string find_preset(const std::string& name) {
    std::string file = "ablate_" + name + ".json";
    for (auto& c : file)
        if (c == '-') c = '_';
    std::vector<fs::path> roots;
    if (const char* env = std::getenv("AHOP_CONFIG_DIR")) roots.emplace_back(env);
    roots.emplace_back("configs");
#ifdef AHOP_SOURCE_CONFIG_DIR
    roots.emplace_back(AHOP_SOURCE_CONFIG_DIR);
#endif
    for (const auto& root : roots) {
        const fs::path p = root / file;
        if (fs::exists(p)) return p.string();
    }
    throw ConfigError("preset \"" + name + "\" not found (looked for " + file +
                      " under AHOP_CONFIG_DIR and ./configs)");
}

int do_train(const std::string& config_path, const BenchOverrides& o, const std::string& command) {
    const std::string text = read_text_file(config_path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    require_keys(j, {"dataset", "spec", "train", "seed", "output_dir"}, "train config");
    const DatasetSpec dataset = parse_dataset(j.at("dataset"));
    TrainConfig cfg = TrainConfig::paper_default();
    if (j.contains("train")) cfg = parse_train(j.at("train"), cfg);
    uint64_t seed = j.value("seed", 0ull);
    std::string output_dir = j.value("output_dir", std::string("out"));
    if (o.seed) seed = *o.seed;
    if (o.output_dir) output_dir = *o.output_dir;

    RngState root(seed);
    RngState mem_rng = root.at(0);
    const MemoryMatrix memory = load_dataset(dataset, mem_rng);

    // A mixed spec without a frozen sign vector is frozen here, seeded.
    VariantSpec spec = [&] {
        const json& js = j.at("spec");
        if (js.is_object() && js.value("kind", "") == "mixed" && !js.contains("sign_vector")) {
            require_keys(js, {"kind", "mixed_triplet"}, "mixed spec template");
            const auto& t = js.at("mixed_triplet");
            RngState spec_rng = root.at(1);
            return VariantSpec::mixed({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()},
                                      memory.dim(), spec_rng);
        }
        return variant_from_json(js);
    }();
    spec.validate(memory.dim());

    if (o.dry_run) {
        std::cout << "train: " << to_string(spec.kind) << " spec, " << memory.count()
                  << " patterns of dim " << memory.dim() << ", seed " << seed << "\n";
        return kExitOk;
    }

    fs::create_directories(output_dir);
    RngState train_rng = root.at(2);
    std::vector<double> losses;
    const WeightSet fitted = train(memory, spec, WeightSet::base_dis_dot(memory.dim()), cfg,
                                   train_rng, &losses);
    save_weights_json((fs::path(output_dir) / "weights.json").string(), fitted);
    save_variant_json((fs::path(output_dir) / "spec.json").string(), spec);
    write_training_log_csv((fs::path(output_dir) / "train_log.csv").string(), losses);
    write_manifest(output_dir, command, text, seed);
    std::cout << "trained " << fitted.bases.size() << " bases; final loss "
              << (losses.empty() ? 0.0 : losses.back()) << "\n";
    return kExitOk;
}

struct CheckReporter {
    int failures = 0;
    void check(bool ok, const std::string& label, const std::string& detail = "") {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << label;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!ok) ++failures;
    }
};

int do_energy_check(int trajectories, uint64_t seed, const std::string& output_dir) {
    RngState root(seed);
    const int N = 64, d = 16;
    CheckReporter rep;
    double worst_slack = 0.0, worst_bound = 0.0, worst_sum = 0.0, worst_rewrite = 0.0;
    bool all_converged = true;

    Trajectory sample_traj;
    for (int t = 0; t < trajectories; ++t) {
        RngState rng = root.at(t + 1);
        const MemoryMatrix memory = synth_patterns(N, d, rng);
        Vector b(d);
        for (int i = 0; i < d; ++i) b[i] = rng.normal();
        b *= rng.uniform(0.0, 4.0) / b.norm();
        Vector x0(d);
        for (int i = 0; i < d; ++i) x0[i] = rng.normal(0.0, 2.0);

        DescentConfig cfg;
        cfg.max_iters = 500;
        const Trajectory traj = descend(memory, x0, b, cfg);  // throws on violation
        if (t == 0) sample_traj = traj;
        all_converged = all_converged && traj.converged;

        const double bound = energy_lower_bound(N, b);
        double sum_steps = 0.0;
        for (size_t i = 1; i < traj.iterates.size(); ++i) {
            worst_slack = std::max(worst_slack, traj.energies[i] - traj.energies[i - 1]);
            worst_bound = std::max(worst_bound, bound - traj.energies[i]);
            sum_steps += (traj.iterates[i] - traj.iterates[i - 1]).squaredNorm();
        }
        worst_sum = std::max(worst_sum,
                             sum_steps - (traj.energies.front() - traj.energies.back()));
        for (int probe = 0; probe < 10; ++probe) {
            Vector x(d);
            for (int i = 0; i < d; ++i) x[i] = rng.normal(0.0, 5.0);
            worst_rewrite = std::max(
                worst_rewrite, std::abs(energy(memory, x, b) - energy_rewritten(memory, x, b)));
        }
    }
    rep.check(worst_slack <= 1e-10, "energy monotone descent",
              "worst increase " + format_double(worst_slack));
    rep.check(worst_bound <= 1e-10, "energy lower bound",
              "worst deficit " + format_double(worst_bound));
    rep.check(worst_sum <= 1e-9, "step-norm summability",
              "worst excess " + format_double(worst_sum));
    rep.check(worst_rewrite <= 1e-9, "energy rewrite identity",
              "worst gap " + format_double(worst_rewrite));
    rep.check(all_converged, "all trajectories converged");

    if (!output_dir.empty()) {
        fs::create_directories(output_dir);
        write_trajectory_csv((fs::path(output_dir) / "trajectory.csv").string(), sample_traj);
    }
    return rep.failures == 0 ? kExitOk : kExitInvariant;
}

int do_oracle_check(bool quick, uint64_t seed) {
    RngState root(seed);
    CheckReporter rep;

    {  // footprint vs subset enumeration
        const int pairs = quick ? 100 : 1000;
        const int dmax = quick ? 8 : 12;
        double worst = 0.0;
        for (int d = 2; d <= dmax; ++d) {
            RngState rng = root.at(1000 + d);
            for (int p = 0; p < pairs; ++p) {
                Vector xi(d), x(d);
                for (int i = 0; i < d; ++i) {
                    xi[i] = rng.uniform(-2.0, 2.0);
                    x[i] = rng.uniform(-2.0, 2.0);
                }
                for (BaseKind base : {BaseKind::Dis, BaseKind::Dot}) {
                    const Vector f = footprint(dimwise(base, xi, x), true);
                    for (int k = 1; k <= d; ++k)
                        worst = std::max(
                            worst, std::abs(f[k - 1] - k_optimal_bruteforce(base, xi, x, k)));
                }
            }
        }
        rep.check(worst <= 1e-9, "footprint equals k-optimal oracle",
                  "worst |diff| " + format_double(worst));
    }

    {  // analytic gradient vs central differences
        const int instances = quick ? 20 : 100;
        double worst = 0.0;
        for (int inst = 0; inst < instances; ++inst) {
            RngState rng = root.at(2000 + inst);
            const int N = 2 + rng.uniform_int(31);
            const int d = 2 + rng.uniform_int(15);
            const MemoryMatrix memory = synth_patterns(N, d, rng);
            RngState spec_rng = rng.at(7);
            VariantSpec spec = VariantSpec::mixed({0.3, 0.3, 0.3}, d, spec_rng);
            RngState sample_rng = rng.at(8);
            const auto batch = sample_many(spec, memory, 1 + rng.uniform_int(16), sample_rng);
            WeightSet ws = WeightSet::base_dis_dot(d);
            for (auto& base : ws.bases) {
                for (int i = 0; i < d; ++i) base.w[i] = rng.normal();
                base.beta = 0.5 + rng.uniform();
            }
            const GradientSet gs = gradient(memory, batch, ws);
            const double h = 1e-5;
            for (size_t b = 0; b < ws.bases.size(); ++b) {
                for (int i = 0; i < d; ++i) {
                    WeightSet plus = ws, minus = ws;
                    plus.bases[b].w[i] += h;
                    minus.bases[b].w[i] -= h;
                    const double fd =
                        (loss(memory, batch, plus) - loss(memory, batch, minus)) / (2 * h);
                    const double an = gs.bases[b].dw[i];
                    worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(fd)));
                }
                WeightSet plus = ws, minus = ws;
                plus.bases[b].beta += h;
                minus.bases[b].beta -= h;
                const double fd =
                    (loss(memory, batch, plus) - loss(memory, batch, minus)) / (2 * h);
                worst = std::max(worst,
                                 std::abs(fd - gs.bases[b].dbeta) / std::max(1.0, std::abs(fd)));
            }
        }
        rep.check(worst <= 1e-5, "analytic gradient vs finite differences",
                  "worst rel err " + format_double(worst));
    }

    {  // lemma-optimality: noisy
        RngState rng = root.at(3000);
        const int N = quick ? 64 : 256, d = 16, samples = quick ? 1000 : 10000;
        const MemoryMatrix memory = synth_patterns(N, d, rng);
        Vector sigma(d);
        for (int i = 0; i < d; ++i) sigma[i] = rng.uniform(0.25, 4.0);
        const VariantSpec spec = VariantSpec::noisy(sigma);
        const WeightSet ws = optimal_weights_noisy(sigma);
        int agree = 0;
        RngState srng = rng.at(1);
        for (int i = 0; i < samples; ++i) {
            const VariantSample s = sample(spec, memory, srng);
            const Vector scores = adaptive_scores(memory, s.query, ws);
            int best = 0;
            for (int k = 1; k < N; ++k)
                if (scores[k] > scores[best]) best = k;
            if (best == map_origin(spec, memory, s.query)) ++agree;
        }
        rep.check(agree == samples, "noisy lemma (optimal weights = MAP)",
                  std::to_string(agree) + "/" + std::to_string(samples));
    }

    {  // lemma-optimality: masked
        RngState rng = root.at(4000);
        const int N = quick ? 64 : 256, d = 16, samples = quick ? 1000 : 10000;
        const MemoryMatrix memory = synth_patterns(N, d, rng);
        const VariantSpec spec = VariantSpec::masked(0.5);
        int agree = 0, usable = 0;
        RngState srng = rng.at(1);
        for (int i = 0; i < samples; ++i) {
            const VariantSample s = sample(spec, memory, srng);
            const Vector scores = match_count_scores(memory, s.query, spec.match_tol);
            int best = 0, ties = 1;
            for (int k = 1; k < N; ++k) {
                if (scores[k] > scores[best]) {
                    best = k;
                    ties = 1;
                } else if (scores[k] == scores[best]) {
                    ++ties;
                }
            }
            if (ties != 1) continue;  // lemma speaks only to unique argmax
            ++usable;
            if (best == map_origin(spec, memory, s.query)) ++agree;
        }
        rep.check(agree == usable && usable > 0, "masked lemma (match count = MAP)",
                  std::to_string(agree) + "/" + std::to_string(usable) + " unique-argmax samples");
    }

    {  // lemma-optimality: biased
        RngState rng = root.at(5000);
        const int N = quick ? 64 : 256, d = 16, samples = quick ? 1000 : 10000;
        const MemoryMatrix memory = synth_patterns(N, d, rng);
        Vector drift(d);
        for (int i = 0; i < d; ++i) drift[i] = rng.normal();
        const VariantSpec spec = VariantSpec::biased(drift);
        const Vector b = optimal_bias(drift);
        int agree = 0;
        RngState srng = rng.at(1);
        for (int i = 0; i < samples; ++i) {
            const VariantSample s = sample(spec, memory, srng);
            const Vector scores = unified_scores(memory, s.query, b);
            int best = 0;
            for (int k = 1; k < N; ++k)
                if (scores[k] > scores[best]) best = k;
            if (best == map_origin(spec, memory, s.query)) ++agree;
        }
        rep.check(agree == samples, "biased lemma (unified score = MAP)",
                  std::to_string(agree) + "/" + std::to_string(samples));
    }

    return rep.failures == 0 ? kExitOk : kExitInvariant;
}

std::string join_args(int argc, const char* const* argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

int classify_exit(const std::exception& e) {
    if (dynamic_cast<const InvariantViolation*>(&e)) return kExitInvariant;
    if (dynamic_cast<const IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const FormatError*>(&e))
        return kExitConfig;
    if (dynamic_cast<const TrainingError*>(&e)) return kExitInvariant;
    return kExitConfig;
}

const char* classify_name(int code) {
    switch (code) {
        case kExitConfig: return "config";
        case kExitInvariant: return "invariant";
        case kExitIo: return "io";
    }
    return "error";
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"adaptive Hopfield network benchmark harness"};
    app.require_subcommand(1);

    BenchOverrides o;
    std::string config_path, preset, output_dir_flag;
    uint64_t seed_flag = 0;
    int jobs_flag = 0, runs_flag = 0, trials_flag = 0;

    auto add_common = [&](CLI::App* sub, bool with_grid) {
        sub->add_option("--seed", seed_flag, "seed override");
        sub->add_option("--output-dir", output_dir_flag, "output directory override");
        sub->add_flag("--dry-run", o.dry_run, "validate and print the resolved grid only");
        if (with_grid) {
            sub->add_option("--jobs", jobs_flag, "worker threads (default: hardware)");
            sub->add_option("--runs", runs_flag, "runs override");
            sub->add_option("--trials", trials_flag, "trials override");
        }
    };
    auto collect_overrides = [&](CLI::App* sub) {
        auto given = [&](const char* name) {
            const CLI::Option* opt = sub->get_option_no_throw(name);
            return opt && opt->count() > 0;
        };
        if (given("--seed")) o.seed = seed_flag;
        if (given("--output-dir")) o.output_dir = output_dir_flag;
        if (given("--jobs")) o.jobs = jobs_flag;
        if (given("--runs")) o.runs = runs_flag;
        if (given("--trials")) o.trials = trials_flag;
    };

    CLI::App* bench = app.add_subcommand("bench", "run a (models x settings) experiment grid");
    bench->add_option("--config", config_path, "grid config JSON")->required();
    add_common(bench, true);

    CLI::App* ablate = app.add_subcommand("ablate", "run a preset ablation grid");
    ablate->add_option("--preset", preset, "preset name (e.g. sorted-vs-unsorted)");
    ablate->add_option("--config", config_path, "explicit config JSON");
    add_common(ablate, true);

    CLI::App* train_cmd = app.add_subcommand("train", "fit and persist a weight set");
    train_cmd->add_option("--config", config_path, "train config JSON")->required();
    add_common(train_cmd, false);

    int trajectories = 100;
    CLI::App* energy_cmd = app.add_subcommand("energy-check", "descent/bound verification suite");
    energy_cmd->add_option("--trajectories", trajectories, "trajectory count");
    add_common(energy_cmd, false);

    bool quick = false;
    CLI::App* oracle_cmd =
        app.add_subcommand("oracle-check", "footprint, gradient and lemma oracles");
    oracle_cmd->add_flag("--quick", quick, "reduced sizes");
    add_common(oracle_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    const std::string command = join_args(argc, argv);
    for (CLI::App* sub : {bench, ablate, train_cmd, energy_cmd, oracle_cmd})
        if (sub->parsed()) collect_overrides(sub);
    try {
        if (bench->parsed()) return do_bench(config_path, o, command);
        if (ablate->parsed()) {
            if (config_path.empty()) {
                if (preset.empty()) throw ConfigError("ablate: need --preset or --config");
                config_path = find_preset(preset);
            }
            return do_bench(config_path, o, command);
        }
        if (train_cmd->parsed()) return do_train(config_path, o, command);
        if (energy_cmd->parsed())
            return do_energy_check(trajectories, o.seed.value_or(7), o.output_dir.value_or(""));
        if (oracle_cmd->parsed()) return do_oracle_check(quick, o.seed.value_or(7));
        throw ConfigError("no subcommand");
    } catch (const std::exception& e) {
        const int code = classify_exit(e);
        json err{{"error", e.what()}, {"class", classify_name(code)}, {"exit_code", code}};
        std::cerr << err.dump() << "\n";
        if (o.output_dir) {
            std::error_code ec;
            fs::create_directories(*o.output_dir, ec);
            if (!ec) {
                try {
                    write_text_file((fs::path(*o.output_dir) / "error_report.json").string(),
                                    err.dump(2) + "\n");
                } catch (...) {
                }
            }
        }
        return code;
    }
}

}  // namespace ahop
