#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cspace/dataset.hpp"
#include "cspace/mat.hpp"

namespace cspace {

struct PositionalEncodingSpec {
    int L = 12;          // frequency count
    double sigma = 1.0;  // frequency step width
    void validate() const;
};

// Sinusoidal expansion of a single feature vector (coordinate-major,
// frequency-minor), output length 2 * L * d.
std::vector<double> positional_encode(std::span<const double> features,
                                      const PositionalEncodingSpec& spec);

struct TrainingConfig {
    int epochs = 50;
    int batch_size = 512;
    double lr_max = 1e-3;
    double lr_min = 1e-7;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double bias_beta = 1.0;        // +1 targets are scaled to +beta
    int early_stop_patience = 10;  // epochs without validation improvement
    double train_fraction = 0.95;
    std::uint64_t seed = 0;
    void validate() const;
};

// lr_min + 0.5 * (lr_max - lr_min) * (1 + cos(pi * epoch / epochs)).
double cosine_lr(int epoch, const TrainingConfig& cfg);

struct DenseParams {
    Mat W;                  // out x in
    std::vector<double> b;  // out
};

struct NormParams {
    std::vector<double> scale, shift;              // learned affine
    std::vector<double> running_mean, running_var; // eval-mode statistics
};

enum class Mode { Train, Eval };

struct DenseGrad {
    Mat dW;
    std::vector<double> db;
};
struct NormGrad {
    std::vector<double> dscale, dshift;
};

struct Gradients {
    std::vector<DenseGrad> fc;
    std::vector<NormGrad> norm;
};

// Per-batch intermediate state kept by the train-mode forward pass for
// backpropagation through the batch statistics.
struct ForwardCache {
    Mat encoded;                    // B x 2Ld
    std::vector<Mat> fc_in;         // input of each fully-connected layer
    std::vector<Mat> preact;        // FC output, before normalization
    std::vector<Mat> xhat;          // normalized, before scale/shift
    std::vector<Mat> out;           // layer output (after activation)
    std::vector<std::vector<double>> mean, var;  // batch statistics used
};

struct AdamMoments {
    std::vector<std::vector<double>> m, v;
    long step = 0;
};

// Standard bias-corrected Adam update over a flat list of parameter tensors.
void adam_step(const std::vector<std::span<double>>& params,
               const std::vector<std::span<const double>>& grads, AdamMoments& moments,
               double lr, const TrainingConfig& cfg);

// Scalar-score network over FK features: positional encoding, three
// FC+Norm+ReLU blocks, concatenative skip of the encoding into the fourth
// block, two more blocks, then FC(1)+Norm(1). Negative score means free
// space, positive means collision.
class DeepCollideModel {
public:
    static constexpr std::size_t kLayers = 6;  // 5 hidden + output

    DeepCollideModel() = default;
    DeepCollideModel(const PositionalEncodingSpec& enc, std::size_t input_dim,
                     std::size_t hidden, std::uint64_t init_seed);

    const PositionalEncodingSpec& encoding() const { return enc_; }
    std::size_t input_dim() const { return input_dim_; }
    std::size_t hidden_dim() const { return hidden_; }
    std::size_t encoded_dim() const { return 2 * static_cast<std::size_t>(enc_.L) * input_dim_; }
    bool trained() const { return trained_; }
    void set_trained(bool t) { trained_ = t; }
    std::size_t parameter_count() const;

    // features: n x input_dim (raw) or n x encoded_dim (pre-encoded).
    // Train mode uses batch statistics (n >= 2) and, unless update_running
    // is false, folds them into the running statistics.
    std::vector<double> forward(const Mat& features, Mode mode, ForwardCache* cache = nullptr,
                                bool update_running = true);

    // Mean L1 loss and gradients for every parameter; expects the cache of
    // the immediately preceding train-mode forward call.
    double backward(const ForwardCache& cache, std::span<const double> scores,
                    std::span<const double> targets, Gradients& grads) const;

    Gradients make_gradients() const;
    std::vector<std::span<double>> parameter_tensors();
    std::vector<std::span<const double>> gradient_tensors(const Gradients& g) const;

    // All parameters and running statistics, for snapshots and checkpoints.
    std::vector<double> state_flat() const;
    void load_state_flat(const std::vector<double>& state);

    std::vector<DenseParams> fc;
    std::vector<NormParams> norm;

    double norm_eps = 1e-5;
    double norm_momentum = 0.1;

private:
    PositionalEncodingSpec enc_;
    std::size_t input_dim_ = 0;
    std::size_t hidden_ = 0;
    bool trained_ = false;
};

struct ModelConfig {
    PositionalEncodingSpec encoding;
    std::size_t hidden = 256;
};

struct EpochStats {
    double mean_loss = 0.0;
    double val_accuracy = 0.0;
    double lr = 0.0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;
    double best_val_accuracy = 0.0;
    bool stopped_early = false;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
    std::string env_ref;
};

struct TrainedDeepCollide {
    DeepCollideModel model;
    TrainReport report;
};

// Full training loop: 95/5 split, L1 loss, Adam, per-epoch cosine decay,
// early stopping on validation accuracy, best-epoch snapshot restore.
TrainedDeepCollide train_deepcollide(const LabeledDataset& data, const Environment& env,
                                     const ModelConfig& mc, const TrainingConfig& tc);

struct Predictions {
    std::vector<int> labels;  // +1 iff score >= 0
    std::vector<double> scores;
};

// Eval-mode prediction over FK features; requires a trained model.
Predictions predict(const DeepCollideModel& model, const Mat& features);
// Convenience: configurations -> FK features -> prediction.
Predictions predict_configurations(const DeepCollideModel& model, const Environment& env,
                                   const Mat& configurations);

// Versioned binary checkpoint; round-trip exact.
void save_checkpoint(const DeepCollideModel& model, const TrainingConfig& tc,
                     const std::string& env_ref, const std::string& path);
struct LoadedCheckpoint {
    DeepCollideModel model;
    TrainingConfig config;
    std::string env_ref;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace cspace
