#include "cspace/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cspace {

double LabeledDataset::collision_fraction() const {
    if (labels.empty()) return 0.0;
    std::size_t hits = 0;
    for (int y : labels)
        if (y > 0) ++hits;
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

void LabeledDataset::validate() const {
    if (labels.size() != configurations.rows)
        throw input_error("dataset row count mismatch between configurations and labels");
    for (int y : labels)
        if (y != -1 && y != 1) throw input_error("labels must be -1 or +1");
    if (fk_features.rows != 0 && fk_features.rows != configurations.rows)
        throw input_error("fk feature cache row count mismatch");
}

std::string environment_ref(const Environment& env) {
    const std::string j = environment_to_json(env);
    return hex64(fnv1a64(j.data(), j.size()));
}

LabeledDataset sample_dataset(const Environment& env, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw input_error("sample count must be >= 1");
    const std::size_t dof = env.total_dof();
    LabeledDataset ds;
    ds.configurations.resize(n, dof);
    ds.labels.assign(n, -1);
    ds.env_ref = environment_ref(env);

    const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < nn; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        Rng rng = substream(seed, "sample", ii);
        std::span<double> row(ds.configurations.row(ii), dof);
        sample_configuration(env, rng, row);
        ds.labels[ii] = check_collision(env, row).value;
    }
    return ds;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds,
                                                const SplitSpec& spec) {
    ds.validate();
    const std::size_t n = ds.size();
    if (n == 0) throw input_error("cannot split an empty dataset");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw input_error("train_fraction must be in (0, 1)");
    const std::size_t n_train = static_cast<std::size_t>(
        std::ceil(spec.train_fraction * static_cast<double>(n)));
    if (n_train >= n)
        throw input_error("validation split is empty at this size and fraction");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng = substream(spec.shuffle_seed, "split");
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.next_below(i + 1)]);

    auto take = [&](std::size_t lo, std::size_t hi) {
        LabeledDataset out;
        out.env_ref = ds.env_ref;
        out.configurations.resize(hi - lo, ds.configurations.cols);
        out.labels.resize(hi - lo);
        const bool feats = ds.has_features();
        if (feats) out.fk_features.resize(hi - lo, ds.fk_features.cols);
        for (std::size_t i = lo; i < hi; ++i) {
            const std::size_t src = perm[i];
            std::memcpy(out.configurations.row(i - lo), ds.configurations.row(src),
                        ds.configurations.cols * sizeof(double));
            out.labels[i - lo] = ds.labels[src];
            if (feats)
                std::memcpy(out.fk_features.row(i - lo), ds.fk_features.row(src),
                            ds.fk_features.cols * sizeof(double));
        }
        return out;
    };
    return {take(0, n_train), take(n_train, n)};
}

std::vector<double> scale_targets(const std::vector<int>& labels, double beta) {
    if (!(beta > 0.0)) throw input_error("bias beta must be positive");
    std::vector<double> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        out[i] = labels[i] > 0 ? beta : -1.0;
    return out;
}

void ensure_fk_features(LabeledDataset& ds, const Environment& env) {
    if (ds.has_features()) return;
    fk_feature_batch(env.robots, ds.configurations, ds.fk_features);
}

void save_dataset_csv(const LabeledDataset& ds, const std::string& path) {
    ds.validate();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open for writing: " + path);
    for (std::size_t j = 0; j < ds.configurations.cols; ++j) f << "q" << j << ",";
    f << "y\n";
    char buf[40];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double* row = ds.configurations.row(i);
        for (std::size_t j = 0; j < ds.configurations.cols; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", row[j]);
            f << buf << ",";
        }
        f << ds.labels[i] << "\n";
    }
}

LabeledDataset load_dataset_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open dataset file: " + path);
    std::string header;
    if (!std::getline(f, header)) throw input_error("empty dataset file: " + path);
    std::size_t cols = static_cast<std::size_t>(std::count(header.begin(), header.end(), ','));
    const bool has_label = header.size() >= 2 && header.compare(header.size() - 1, 1, "y") == 0;
    if (!has_label) throw input_error("dataset CSV must end with a y column: " + path);

    std::vector<double> values;
    std::vector<int> labels;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t k = 0;
        while (std::getline(ss, cell, ',')) {
            if (k < cols)
                values.push_back(std::strtod(cell.c_str(), nullptr));
            else
                labels.push_back(std::stoi(cell));
            ++k;
        }
        if (k != cols + 1) throw input_error("ragged CSV row in " + path);
    }
    LabeledDataset ds;
    ds.configurations.rows = labels.size();
    ds.configurations.cols = cols;
    ds.configurations.data = std::move(values);
    ds.labels = std::move(labels);
    ds.validate();
    return ds;
}

namespace {

void write_u32(std::ofstream& f, std::uint32_t v) {
    f.write(reinterpret_cast<const char*>(&v), 4);
}
void write_u64(std::ofstream& f, std::uint64_t v) {
    f.write(reinterpret_cast<const char*>(&v), 8);
}
std::uint32_t read_u32(std::ifstream& f) {
    std::uint32_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
std::uint64_t read_u64(std::ifstream& f) {
    std::uint64_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

}  // namespace

void save_dataset_binary(const LabeledDataset& ds, const std::string& path) {
    ds.validate();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open for writing: " + path);
    f.write("CSL1", 4);
    write_u32(f, 1);  // format version
    write_u32(f, static_cast<std::uint32_t>(ds.configurations.cols));
    write_u64(f, ds.size());
    f.write(reinterpret_cast<const char*>(ds.configurations.data.data()),
            static_cast<std::streamsize>(ds.configurations.data.size() * sizeof(double)));
    std::vector<std::int8_t> lab(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) lab[i] = static_cast<std::int8_t>(ds.labels[i]);
    f.write(reinterpret_cast<const char*>(lab.data()),
            static_cast<std::streamsize>(lab.size()));
}

LabeledDataset load_dataset_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open dataset file: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "CSL1", 4) != 0)
        throw input_error("bad magic in dataset file: " + path);
    const std::uint32_t version = read_u32(f);
    if (version != 1) throw input_error("unsupported dataset format version");
    const std::uint32_t cols = read_u32(f);
    const std::uint64_t n = read_u64(f);
    LabeledDataset ds;
    ds.configurations.resize(n, cols);
    f.read(reinterpret_cast<char*>(ds.configurations.data.data()),
           static_cast<std::streamsize>(ds.configurations.data.size() * sizeof(double)));
    std::vector<std::int8_t> lab(n);
    f.read(reinterpret_cast<char*>(lab.data()), static_cast<std::streamsize>(n));
    if (!f) throw input_error("truncated dataset file: " + path);
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) ds.labels[i] = lab[i];
    ds.validate();
    return ds;
}

namespace {
bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}
}  // namespace

void save_dataset(const LabeledDataset& ds, const std::string& path) {
    if (ends_with(path, ".csv"))
        save_dataset_csv(ds, path);
    else
        save_dataset_binary(ds, path);
}

LabeledDataset load_dataset(const std::string& path) {
    return ends_with(path, ".csv") ? load_dataset_csv(path) : load_dataset_binary(path);
}

void save_features_binary(const Mat& features, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open for writing: " + path);
    f.write("CSF1", 4);
    write_u32(f, 1);
    write_u32(f, static_cast<std::uint32_t>(features.cols));
    write_u64(f, features.rows);
    f.write(reinterpret_cast<const char*>(features.data.data()),
            static_cast<std::streamsize>(features.data.size() * sizeof(double)));
}

Mat load_features_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open feature file: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "CSF1", 4) != 0)
        throw input_error("bad magic in feature file: " + path);
    if (read_u32(f) != 1) throw input_error("unsupported feature format version");
    const std::uint32_t cols = read_u32(f);
    const std::uint64_t n = read_u64(f);
    Mat m(n, cols);
    f.read(reinterpret_cast<char*>(m.data.data()),
           static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (!f) throw input_error("truncated feature file: " + path);
    return m;
}

}  // namespace cspace
