#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cspace/geometry.hpp"
#include "cspace/mat.hpp"

namespace cspace {

// Sampled configurations with labels in {-1, +1} (-1 free, +1 collision).
struct LabeledDataset {
    Mat configurations;           // n x J, radians
    std::vector<int> labels;      // n, each -1 or +1
    Mat fk_features;              // n x d cache; empty until computed
    std::string env_ref;          // identifier of the generating environment

    std::size_t size() const { return configurations.rows; }
    bool has_features() const { return fk_features.rows == configurations.rows; }
    double collision_fraction() const;
    void validate() const;
};

struct SplitSpec {
    double train_fraction = 0.95;
    std::uint64_t shuffle_seed = 0;
};

// Identifier used to tie datasets/models back to their environment:
// FNV-1a hash of the environment JSON.
std::string environment_ref(const Environment& env);

// Uniform C-space sampling with labels from check_collision; row i draws
// from substream (seed, "sample", i), so the result is independent of
// thread count.
LabeledDataset sample_dataset(const Environment& env, std::size_t n, std::uint64_t seed);

// Seeded permutation, first ceil(train_fraction * n) rows to train.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, const SplitSpec& spec);

// +1 -> +beta, -1 -> -1.
std::vector<double> scale_targets(const std::vector<int>& labels, double beta);

// Computes and caches FK features if not already present.
void ensure_fk_features(LabeledDataset& ds, const Environment& env);

// CSV: header q0..q{J-1},y; 17 significant digits.
void save_dataset_csv(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_dataset_csv(const std::string& path);

// Packed little-endian binary with magic "CSL1".
void save_dataset_binary(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_dataset_binary(const std::string& path);

// Either format, chosen by extension (.csv vs anything else).
void save_dataset(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_dataset(const std::string& path);

// FK feature cache file, magic "CSF1".
void save_features_binary(const Mat& features, const std::string& path);
Mat load_features_binary(const std::string& path);

}  // namespace cspace
