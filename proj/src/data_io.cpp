#include "ahop/data_io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "ahop/json_io.hpp"

namespace ahop {

MemoryMatrix synth_patterns(int N, int d, RngState& rng) {
    if (N < 1 || d < 1) throw ConfigError("synth_patterns: N and d must be >= 1");
    Matrix m(d, N);
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < d; ++i) m(i, k) = rng.uniform(-1.0, 1.0);
    return MemoryMatrix(std::move(m));
}

namespace {

uint32_t read_be32(const std::string& bytes, size_t offset, const std::string& path) {
    if (offset + 4 > bytes.size()) {
        std::ostringstream msg;
        msg << path << ": truncated at byte " << bytes.size() << " (need 4 bytes at offset "
            << offset << ")";
        throw FormatError(msg.str());
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

}  // namespace

MemoryMatrix load_mnist(const std::string& path, int take_n) {
    const std::string bytes = read_text_file(path);
    const uint32_t magic = read_be32(bytes, 0, path);
    if (magic == 0x00000801)
        throw FormatError(path + ": this is an IDX1 label file (magic 0x00000801), not images");
    if (magic != 0x00000803) {
        std::ostringstream msg;
        msg << path << ": bad IDX3 magic 0x" << std::hex << magic << " at byte 0";
        throw FormatError(msg.str());
    }
    const uint32_t count = read_be32(bytes, 4, path);
    const uint32_t rows = read_be32(bytes, 8, path);
    const uint32_t cols = read_be32(bytes, 12, path);
    const size_t d = size_t(rows) * cols;
    const size_t need = 16 + size_t(count) * d;
    if (bytes.size() < need) {
        std::ostringstream msg;
        msg << path << ": truncated at byte " << bytes.size() << " (header promises " << need
            << " bytes)";
        throw FormatError(msg.str());
    }
    uint32_t keep = count;
    if (take_n > 0) {
        if (static_cast<uint32_t>(take_n) > count) {
            std::ostringstream msg;
            msg << path << ": take_n " << take_n << " exceeds stored image count " << count;
            throw ConfigError(msg.str());
        }
        keep = static_cast<uint32_t>(take_n);
    }
    Matrix m(d, keep);
    const auto* px = reinterpret_cast<const unsigned char*>(bytes.data() + 16);
    for (uint32_t k = 0; k < keep; ++k)
        for (size_t i = 0; i < d; ++i)
            m(static_cast<int>(i), k) = double(px[size_t(k) * d + i]) / 127.5 - 1.0;
    return MemoryMatrix(std::move(m));
}

MemoryMatrix load_dataset(const DatasetSpec& spec, RngState& rng) {
    if (spec.source == DatasetSpec::Source::Synthetic) return synth_patterns(spec.n, spec.d, rng);
    return load_mnist(spec.path, spec.take_n);
}

void save_weights_json(const std::string& path, const WeightSet& weights) {
    write_text_file(path, weights_to_json(weights).dump(2) + "\n");
}

WeightSet load_weights_json(const std::string& path) {
    return weights_from_json(nlohmann::json::parse(read_text_file(path)));
}

void save_variant_json(const std::string& path, const VariantSpec& spec) {
    write_text_file(path, variant_to_json(spec).dump(2) + "\n");
}

VariantSpec load_variant_json(const std::string& path) {
    return variant_from_json(nlohmann::json::parse(read_text_file(path)));
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(const std::string& path, const Trajectory& trajectory) {
    std::ostringstream out;
    out << "iteration,energy,step_norm\n";
    for (size_t i = 0; i < trajectory.energies.size(); ++i) {
        out << i << ',' << format_double(trajectory.energies[i]) << ',';
        if (i > 0) out << format_double((trajectory.iterates[i] - trajectory.iterates[i - 1]).norm());
        out << '\n';
    }
    write_text_file(path, out.str());
}

Trajectory load_trajectory_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "iteration,energy,step_norm")
        throw FormatError(path + ": unexpected trajectory header");
    Trajectory t;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw FormatError(path + ": malformed trajectory row");
        t.energies.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    }
    t.steps = static_cast<int>(t.energies.size()) - 1;
    return t;
}

void write_training_log_csv(const std::string& path, const std::vector<double>& losses) {
    std::ostringstream out;
    out << "epoch,loss\n";
    for (size_t i = 0; i < losses.size(); ++i)
        out << i << ',' << format_double(losses[i]) << '\n';
    write_text_file(path, out.str());
}

void write_samples_csv(const std::string& path, const std::vector<VariantSample>& samples) {
    std::ostringstream out;
    out << "origin";
    if (!samples.empty())
        for (int i = 0; i < samples.front().query.size(); ++i) out << ",q_" << i;
    out << '\n';
    for (const auto& s : samples) {
        out << s.origin;
        for (int i = 0; i < s.query.size(); ++i) out << ',' << format_double(s.query[i]);
        out << '\n';
    }
    write_text_file(path, out.str());
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("read failed for " + path);
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out.good()) throw IoError("write failed for " + path);
}

}  // namespace ahop
