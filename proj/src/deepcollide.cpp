#include "cspace/deepcollide.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "cspace/kernels.hpp"
#include "cspace/rng.hpp"

namespace cspace {

void PositionalEncodingSpec::validate() const {
    if (L < 1) throw input_error("encoding frequency count L must be >= 1");
    if (!(sigma > 0.0)) throw input_error("encoding sigma must be positive");
}

void TrainingConfig::validate() const {
    if (epochs < 1) throw input_error("epochs must be >= 1");
    if (batch_size < 2) throw input_error("batch_size must be >= 2 (batch statistics)");
    if (!(lr_min > 0.0 && lr_min <= lr_max)) throw input_error("need 0 < lr_min <= lr_max");
    if (!(bias_beta > 0.0)) throw input_error("bias beta must be positive");
    if (early_stop_patience < 1) throw input_error("early_stop_patience must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw input_error("train_fraction must be in (0, 1)");
}

std::vector<double> positional_encode(std::span<const double> features,
                                      const PositionalEncodingSpec& spec) {
    spec.validate();
    Mat in(1, features.size());
    std::copy(features.begin(), features.end(), in.data.begin());
    Mat out;
    kern::serial::encode_batch(in, spec.L, spec.sigma, out);
    return out.data;
}

double cosine_lr(int epoch, const TrainingConfig& cfg) {
    if (epoch < 0 || epoch > cfg.epochs) throw input_error("epoch out of schedule range");
    constexpr double pi = 3.14159265358979323846;
    return cfg.lr_min + 0.5 * (cfg.lr_max - cfg.lr_min) *
                            (1.0 + std::cos(pi * static_cast<double>(epoch) /
                                            static_cast<double>(cfg.epochs)));
}

DeepCollideModel::DeepCollideModel(const PositionalEncodingSpec& enc, std::size_t input_dim,
                                   std::size_t hidden, std::uint64_t init_seed)
    : enc_(enc), input_dim_(input_dim), hidden_(hidden) {
    enc.validate();
    if (input_dim < 1 || hidden < 1) throw input_error("model dimensions must be >= 1");

    const std::size_t e = encoded_dim();
    const std::size_t H = hidden;
    const std::size_t in_dims[kLayers] = {e, H, H, H + e, H, H};
    const std::size_t out_dims[kLayers] = {H, H, H, H, H, 1};

    fc.resize(kLayers);
    norm.resize(kLayers);
    for (std::size_t k = 0; k < kLayers; ++k) {
        Rng rng = substream(init_seed, "init", k);
        const double bound = 1.0 / std::sqrt(static_cast<double>(in_dims[k]));
        fc[k].W.resize(out_dims[k], in_dims[k]);
        for (double& w : fc[k].W.data) w = rng.uniform(-bound, bound);
        fc[k].b.resize(out_dims[k]);
        for (double& b : fc[k].b) b = rng.uniform(-bound, bound);
        norm[k].scale.assign(out_dims[k], 1.0);
        norm[k].shift.assign(out_dims[k], 0.0);
        norm[k].running_mean.assign(out_dims[k], 0.0);
        norm[k].running_var.assign(out_dims[k], 1.0);
    }
}

std::size_t DeepCollideModel::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < fc.size(); ++k)
        n += fc[k].W.data.size() + fc[k].b.size() + norm[k].scale.size() + norm[k].shift.size();
    return n;
}

namespace {

void check_finite(const Mat& m, std::size_t layer) {
    for (double v : m.data)
        if (!std::isfinite(v))
            throw numeric_error("non-finite value in layer " + std::to_string(layer));
}

// xhat = (A - mean) * istd, row-parallel broadcast.
void normalize(const Mat& A, const std::vector<double>& mean, const std::vector<double>& istd,
               Mat& xhat) {
    xhat.resize(A.rows, A.cols);
    const std::int64_t m = static_cast<std::int64_t>(A.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) {
        const double* a = A.row(static_cast<std::size_t>(i));
        double* x = xhat.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < A.cols; ++j) x[j] = (a[j] - mean[j]) * istd[j];
    }
}

void affine(const Mat& xhat, const std::vector<double>& scale, const std::vector<double>& shift,
            Mat& out) {
    out.resize(xhat.rows, xhat.cols);
    const std::int64_t m = static_cast<std::int64_t>(xhat.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) {
        const double* x = xhat.row(static_cast<std::size_t>(i));
        double* o = out.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < xhat.cols; ++j) o[j] = scale[j] * x[j] + shift[j];
    }
}

void concat_cols(const Mat& A, const Mat& B, Mat& out) {
    out.resize(A.rows, A.cols + B.cols);
    const std::int64_t m = static_cast<std::int64_t>(A.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        std::memcpy(out.row(ii), A.row(ii), A.cols * sizeof(double));
        std::memcpy(out.row(ii) + A.cols, B.row(ii), B.cols * sizeof(double));
    }
}

}  // namespace

std::vector<double> DeepCollideModel::forward(const Mat& features, Mode mode,
                                              ForwardCache* cache, bool update_running) {
    const std::size_t e = encoded_dim();
    Mat encoded_local;
    const Mat* enc_ptr = nullptr;
    Mat* enc_store = cache ? &cache->encoded : &encoded_local;
    if (features.cols == input_dim_) {
        kern::encode_batch(features, enc_.L, enc_.sigma, *enc_store);
        enc_ptr = enc_store;
    } else if (features.cols == e) {
        *enc_store = features;
        enc_ptr = enc_store;
    } else {
        throw input_error("feature matrix has " + std::to_string(features.cols) +
                          " columns; expected " + std::to_string(input_dim_) + " raw or " +
                          std::to_string(e) + " encoded");
    }
    if (mode == Mode::Train && features.rows < 2)
        throw input_error("train-mode forward needs batch size >= 2");

    if (cache) {
        cache->fc_in.assign(kLayers, Mat());
        cache->preact.assign(kLayers, Mat());
        cache->xhat.assign(kLayers, Mat());
        cache->out.assign(kLayers, Mat());
        cache->mean.assign(kLayers, {});
        cache->var.assign(kLayers, {});
    }

    Mat cur;            // output of the previous block
    Mat in_k, preact, xhat, bn_out;
    std::vector<double> mean, var, istd;
    for (std::size_t k = 0; k < kLayers; ++k) {
        if (k == 0)
            in_k = *enc_ptr;
        else if (k == 3)
            concat_cols(cur, *enc_ptr, in_k);
        else
            in_k = std::move(cur);

        kern::gemm_nt(in_k, fc[k].W, preact);
        kern::add_bias_rows(preact, fc[k].b);
        check_finite(preact, k);

        if (mode == Mode::Train) {
            kern::batch_mean_var(preact, mean, var);
            if (update_running) {
                for (std::size_t j = 0; j < mean.size(); ++j) {
                    norm[k].running_mean[j] =
                        (1.0 - norm_momentum) * norm[k].running_mean[j] + norm_momentum * mean[j];
                    norm[k].running_var[j] =
                        (1.0 - norm_momentum) * norm[k].running_var[j] + norm_momentum * var[j];
                }
            }
        } else {
            mean = norm[k].running_mean;
            var = norm[k].running_var;
        }
        istd.resize(var.size());
        for (std::size_t j = 0; j < var.size(); ++j) istd[j] = 1.0 / std::sqrt(var[j] + norm_eps);
        normalize(preact, mean, istd, xhat);
        affine(xhat, norm[k].scale, norm[k].shift, bn_out);
        if (k + 1 < kLayers) kern::relu(bn_out);

        if (cache) {
            cache->fc_in[k] = std::move(in_k);
            in_k = Mat();
            cache->preact[k] = preact;
            cache->xhat[k] = xhat;
            cache->out[k] = bn_out;
            cache->mean[k] = mean;
            cache->var[k] = var;
        }
        cur = std::move(bn_out);
        bn_out = Mat();
    }
    check_finite(cur, kLayers - 1);

    std::vector<double> scores(cur.rows);
    for (std::size_t i = 0; i < cur.rows; ++i) scores[i] = cur.at(i, 0);
    return scores;
}

namespace {

// Gradient through batch normalization, per feature, fixed summation order.
void bn_backward(const Mat& dY, const Mat& preact, const Mat& xhat,
                 const std::vector<double>& mean, const std::vector<double>& var, double eps,
                 const std::vector<double>& scale, std::vector<double>& dscale,
                 std::vector<double>& dshift, Mat& dA) {
    const std::size_t B = dY.rows, F = dY.cols;
    const double m = static_cast<double>(B);
    dscale.assign(F, 0.0);
    dshift.assign(F, 0.0);
    dA.resize(B, F);
    const std::int64_t nf = static_cast<std::int64_t>(F);
#pragma omp parallel for schedule(static)
    for (std::int64_t j64 = 0; j64 < nf; ++j64) {
        const std::size_t j = static_cast<std::size_t>(j64);
        const double istd = 1.0 / std::sqrt(var[j] + eps);
        double dsc = 0.0, dsh = 0.0, dvar = 0.0, sum_dxhat = 0.0, sum_dev = 0.0;
        for (std::size_t i = 0; i < B; ++i) {
            const double dy = dY.at(i, j);
            dsc += dy * xhat.at(i, j);
            dsh += dy;
            const double dxhat = dy * scale[j];
            const double dev = preact.at(i, j) - mean[j];
            dvar += dxhat * dev;
            sum_dxhat += dxhat;
            sum_dev += dev;
        }
        dvar *= -0.5 * istd * istd * istd;
        const double dmean = -istd * sum_dxhat + dvar * (-2.0 / m) * sum_dev;
        for (std::size_t i = 0; i < B; ++i) {
            const double dxhat = dY.at(i, j) * scale[j];
            const double dev = preact.at(i, j) - mean[j];
            dA.at(i, j) = dxhat * istd + dvar * (2.0 / m) * dev + dmean / m;
        }
        dscale[j] = dsc;
        dshift[j] = dsh;
    }
}

}  // namespace

Gradients DeepCollideModel::make_gradients() const {
    Gradients g;
    g.fc.resize(kLayers);
    g.norm.resize(kLayers);
    for (std::size_t k = 0; k < kLayers; ++k) {
        g.fc[k].dW.resize(fc[k].W.rows, fc[k].W.cols);
        g.fc[k].db.assign(fc[k].b.size(), 0.0);
        g.norm[k].dscale.assign(norm[k].scale.size(), 0.0);
        g.norm[k].dshift.assign(norm[k].shift.size(), 0.0);
    }
    return g;
}

double DeepCollideModel::backward(const ForwardCache& cache, std::span<const double> scores,
                                  std::span<const double> targets, Gradients& grads) const {
    const std::size_t B = scores.size();
    if (targets.size() != B) throw input_error("scores/targets size mismatch");
    if (cache.out.empty() || cache.out.back().rows != B)
        throw state_error("backward requires the cache of the preceding train-mode forward");

    // Mean L1 loss; subgradient at zero residual is 0.
    double loss = 0.0;
    Mat dY(B, 1);
    for (std::size_t i = 0; i < B; ++i) {
        const double r = scores[i] - targets[i];
        loss += std::abs(r);
        dY.at(i, 0) = (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0)) / static_cast<double>(B);
    }
    loss /= static_cast<double>(B);

    Mat dA, dIn;
    const std::size_t H = hidden_;
    for (std::size_t k = kLayers; k-- > 0;) {
        if (k + 1 < kLayers) kern::relu_backward(cache.out[k], dY);
        bn_backward(dY, cache.preact[k], cache.xhat[k], cache.mean[k], cache.var[k], norm_eps,
                    norm[k].scale, grads.norm[k].dscale, grads.norm[k].dshift, dA);
        kern::gemm_tn(dA, cache.fc_in[k], grads.fc[k].dW);
        kern::col_sums(dA, grads.fc[k].db);
        if (k == 0) break;  // gradient into the encoding is not needed
        kern::gemm_nn(dA, fc[k].W, dIn);
        if (k == 3) {
            // The concat input splits: first H columns flow back to block 2,
            // the encoded part has no parameters upstream.
            dY.resize(dIn.rows, H);
            for (std::size_t i = 0; i < dIn.rows; ++i)
                std::memcpy(dY.row(i), dIn.row(i), H * sizeof(double));
        } else {
            dY = std::move(dIn);
            dIn = Mat();
        }
    }
    return loss;
}

std::vector<std::span<double>> DeepCollideModel::parameter_tensors() {
    std::vector<std::span<double>> out;
    for (std::size_t k = 0; k < kLayers; ++k) {
        out.emplace_back(fc[k].W.data);
        out.emplace_back(fc[k].b);
        out.emplace_back(norm[k].scale);
        out.emplace_back(norm[k].shift);
    }
    return out;
}

std::vector<std::span<const double>> DeepCollideModel::gradient_tensors(
    const Gradients& g) const {
    std::vector<std::span<const double>> out;
    for (std::size_t k = 0; k < kLayers; ++k) {
        out.emplace_back(g.fc[k].dW.data);
        out.emplace_back(g.fc[k].db);
        out.emplace_back(g.norm[k].dscale);
        out.emplace_back(g.norm[k].dshift);
    }
    return out;
}

std::vector<double> DeepCollideModel::state_flat() const {
    std::vector<double> s;
    for (std::size_t k = 0; k < kLayers; ++k) {
        s.insert(s.end(), fc[k].W.data.begin(), fc[k].W.data.end());
        s.insert(s.end(), fc[k].b.begin(), fc[k].b.end());
        s.insert(s.end(), norm[k].scale.begin(), norm[k].scale.end());
        s.insert(s.end(), norm[k].shift.begin(), norm[k].shift.end());
        s.insert(s.end(), norm[k].running_mean.begin(), norm[k].running_mean.end());
        s.insert(s.end(), norm[k].running_var.begin(), norm[k].running_var.end());
    }
    return s;
}

void DeepCollideModel::load_state_flat(const std::vector<double>& state) {
    std::size_t off = 0;
    auto take = [&](std::vector<double>& dst) {
        if (off + dst.size() > state.size()) throw input_error("model state size mismatch");
        std::copy(state.begin() + static_cast<std::ptrdiff_t>(off),
                  state.begin() + static_cast<std::ptrdiff_t>(off + dst.size()), dst.begin());
        off += dst.size();
    };
    for (std::size_t k = 0; k < kLayers; ++k) {
        take(fc[k].W.data);
        take(fc[k].b);
        take(norm[k].scale);
        take(norm[k].shift);
        take(norm[k].running_mean);
        take(norm[k].running_var);
    }
    if (off != state.size()) throw input_error("model state size mismatch");
}

void adam_step(const std::vector<std::span<double>>& params,
               const std::vector<std::span<const double>>& grads, AdamMoments& moments,
               double lr, const TrainingConfig& cfg) {
    if (params.size() != grads.size()) throw input_error("params/grads tensor count mismatch");
    if (moments.m.empty()) {
        moments.m.resize(params.size());
        moments.v.resize(params.size());
        for (std::size_t t = 0; t < params.size(); ++t) {
            moments.m[t].assign(params[t].size(), 0.0);
            moments.v[t].assign(params[t].size(), 0.0);
        }
    }
    moments.step += 1;
    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(moments.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(moments.step));
    for (std::size_t t = 0; t < params.size(); ++t) {
        if (params[t].size() != grads[t].size())
            throw input_error("param/grad tensor shape mismatch");
        double* p = params[t].data();
        const double* g = grads[t].data();
        double* m = moments.m[t].data();
        double* v = moments.v[t].data();
        const std::int64_t n = static_cast<std::int64_t>(params[t].size());
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
        }
    }
}

namespace {

Mat rows_slice(const Mat& src, std::size_t lo, std::size_t hi) {
    Mat out(hi - lo, src.cols);
    std::memcpy(out.data.data(), src.row(lo), (hi - lo) * src.cols * sizeof(double));
    return out;
}

double eval_accuracy(DeepCollideModel& model, const Mat& features,
                     const std::vector<int>& labels) {
    const std::vector<double> scores = model.forward(features, Mode::Eval);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const int pred = scores[i] >= 0.0 ? +1 : -1;
        if (pred == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(scores.size());
}

}  // namespace

TrainedDeepCollide train_deepcollide(const LabeledDataset& data, const Environment& env,
                                     const ModelConfig& mc, const TrainingConfig& tc) {
    tc.validate();
    mc.encoding.validate();
    if (data.size() < 40)
        throw input_error("training needs at least 40 rows (validation split and batching)");

    const auto t0 = std::chrono::steady_clock::now();

    LabeledDataset working = data;
    ensure_fk_features(working, env);
    auto [train_set, val_set] = split(working, SplitSpec{tc.train_fraction, tc.seed});
    const std::vector<double> targets = scale_targets(train_set.labels, tc.bias_beta);

    const std::size_t d = env.feature_dim();
    DeepCollideModel model(mc.encoding, d, mc.hidden, tc.seed);
    Gradients grads = model.make_gradients();
    AdamMoments moments;

    TrainReport report;
    report.seed = tc.seed;
    report.env_ref = working.env_ref;

    std::vector<double> best_state;
    double best_acc = -1.0;
    int stale = 0;
    const std::size_t n = train_set.size();
    const std::size_t B = static_cast<std::size_t>(tc.batch_size);

    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        const double lr = cosine_lr(epoch, tc);
        double abs_sum = 0.0;
        std::size_t row_count = 0;
        ForwardCache cache;
        for (std::size_t j = 0; j < n; j += B) {
            const std::size_t hi = std::min(j + B, n);
            if (hi - j < 2) break;  // a trailing single row has no batch statistics
            const Mat batch = rows_slice(train_set.fk_features, j, hi);
            std::vector<double> scores;
            try {
                scores = model.forward(batch, Mode::Train, &cache);
                const std::span<const double> tgt(targets.data() + j, hi - j);
                const double loss = model.backward(cache, scores, tgt, grads);
                abs_sum += loss * static_cast<double>(hi - j);
                row_count += hi - j;
            } catch (const numeric_error& e) {
                throw numeric_error(std::string(e.what()) + " at epoch " +
                                    std::to_string(epoch) + ", batch row " + std::to_string(j));
            }
            adam_step(model.parameter_tensors(), model.gradient_tensors(grads), moments, lr, tc);
        }

        const double val_acc = eval_accuracy(model, val_set.fk_features, val_set.labels);
        report.epochs.push_back(
            {row_count ? abs_sum / static_cast<double>(row_count) : 0.0, val_acc, lr});

        if (val_acc > best_acc) {
            best_acc = val_acc;
            best_state = model.state_flat();
            report.best_epoch = epoch;
            stale = 0;
        } else if (++stale >= tc.early_stop_patience) {
            report.stopped_early = true;
            break;
        }
    }

    model.load_state_flat(best_state);
    model.set_trained(true);
    report.best_val_accuracy = best_acc;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(model), std::move(report)};
}

Predictions predict(const DeepCollideModel& model, const Mat& features) {
    if (!model.trained()) throw state_error("predict requires a trained model");
    // Eval-mode forward reads running statistics and mutates nothing.
    DeepCollideModel& m = const_cast<DeepCollideModel&>(model);
    Predictions p;
    p.scores = m.forward(features, Mode::Eval);
    p.labels.resize(p.scores.size());
    for (std::size_t i = 0; i < p.scores.size(); ++i)
        p.labels[i] = p.scores[i] >= 0.0 ? +1 : -1;
    return p;
}

Predictions predict_configurations(const DeepCollideModel& model, const Environment& env,
                                   const Mat& configurations) {
    Mat feats;
    fk_feature_batch(env.robots, configurations, feats);
    return predict(model, feats);
}

void save_checkpoint(const DeepCollideModel& model, const TrainingConfig& tc,
                     const std::string& env_ref, const std::string& path) {
    nlohmann::ordered_json h;
    h["format"] = "dck";
    h["tool_version"] = kVersion;
    h["precision"] = "f64";
    h["L"] = model.encoding().L;
    h["sigma"] = model.encoding().sigma;
    h["input_dim"] = model.input_dim();
    h["hidden"] = model.hidden_dim();
    h["trained"] = model.trained();
    h["norm_eps"] = model.norm_eps;
    h["norm_momentum"] = model.norm_momentum;
    h["env_ref"] = env_ref;
    h["config"] = {{"epochs", tc.epochs},
                   {"batch_size", tc.batch_size},
                   {"lr_max", tc.lr_max},
                   {"lr_min", tc.lr_min},
                   {"adam_beta1", tc.adam_beta1},
                   {"adam_beta2", tc.adam_beta2},
                   {"adam_eps", tc.adam_eps},
                   {"bias_beta", tc.bias_beta},
                   {"early_stop_patience", tc.early_stop_patience},
                   {"train_fraction", tc.train_fraction},
                   {"seed", tc.seed}};
    const std::string header = h.dump();

    std::ofstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open for writing: " + path);
    f.write("DCK1", 4);
    const std::uint32_t version = 1;
    f.write(reinterpret_cast<const char*>(&version), 4);
    const std::uint32_t hlen = static_cast<std::uint32_t>(header.size());
    f.write(reinterpret_cast<const char*>(&hlen), 4);
    f.write(header.data(), static_cast<std::streamsize>(header.size()));
    const std::vector<double> state = model.state_flat();
    const std::uint64_t count = state.size();
    f.write(reinterpret_cast<const char*>(&count), 8);
    f.write(reinterpret_cast<const char*>(state.data()),
            static_cast<std::streamsize>(state.size() * sizeof(double)));
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open checkpoint: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "DCK1", 4) != 0)
        throw input_error("bad magic in checkpoint: " + path);
    std::uint32_t version = 0, hlen = 0;
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&hlen), 4);
    if (version != 1) throw input_error("unsupported checkpoint version");
    std::string header(hlen, '\0');
    f.read(header.data(), hlen);
    const nlohmann::json h = nlohmann::json::parse(header);

    PositionalEncodingSpec enc{h.at("L").get<int>(), h.at("sigma").get<double>()};
    LoadedCheckpoint out;
    out.model = DeepCollideModel(enc, h.at("input_dim").get<std::size_t>(),
                                 h.at("hidden").get<std::size_t>(), 0);
    out.model.norm_eps = h.at("norm_eps").get<double>();
    out.model.norm_momentum = h.at("norm_momentum").get<double>();
    out.model.set_trained(h.at("trained").get<bool>());
    const auto& c = h.at("config");
    out.config = TrainingConfig{c.at("epochs").get<int>(),
                                c.at("batch_size").get<int>(),
                                c.at("lr_max").get<double>(),
                                c.at("lr_min").get<double>(),
                                c.at("adam_beta1").get<double>(),
                                c.at("adam_beta2").get<double>(),
                                c.at("adam_eps").get<double>(),
                                c.at("bias_beta").get<double>(),
                                c.at("early_stop_patience").get<int>(),
                                c.at("train_fraction").get<double>(),
                                c.at("seed").get<std::uint64_t>()};
    out.env_ref = h.at("env_ref").get<std::string>();

    std::uint64_t count = 0;
    f.read(reinterpret_cast<char*>(&count), 8);
    std::vector<double> state(count);
    f.read(reinterpret_cast<char*>(state.data()),
           static_cast<std::streamsize>(count * sizeof(double)));
    if (!f) throw input_error("truncated checkpoint: " + path);
    out.model.load_state_flat(state);
    return out;
}

}  // namespace cspace
