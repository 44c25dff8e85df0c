#include "cspace/fastron.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace cspace {

void FastronConfig::validate() const {
    if (!(gamma > 0.0)) throw input_error("fastron gamma must be positive");
    if (!(beta >= 1.0)) throw input_error("fastron beta must be >= 1");
    if (i_max < 1) throw input_error("fastron i_max must be >= 1");
    if (s_max < 1) throw input_error("fastron s_max must be >= 1");
}

const char* to_string(FastronTermination t) {
    switch (t) {
        case FastronTermination::Converged: return "converged";
        case FastronTermination::IterationCap: return "iteration_cap";
        case FastronTermination::SupportCapBlocked: return "support_cap_blocked";
    }
    return "unknown";
}

double rq_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    if (a.size() != b.size()) throw input_error("kernel arguments must have equal dimension");
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    const double t = 1.0 + 0.5 * gamma * d2;
    return 1.0 / (t * t);
}

GramCache::GramCache(const Mat& features, double gamma, std::size_t budget_bytes)
    : features_(features), gamma_(gamma) {
    const std::size_t col_bytes = std::max<std::size_t>(1, features.rows * sizeof(double));
    max_columns_ = std::max<std::size_t>(1, budget_bytes / col_bytes);
}

const std::vector<double>& GramCache::column(std::size_t i) {
    if (auto it = map_.find(i); it != map_.end()) {
        lru_.splice(lru_.begin(), lru_, it->second);
        return it->second->second;
    }
    const std::size_t n = features_.rows;
    std::vector<double> col(n);
    const std::span<const double> xi(features_.row(i), features_.cols);
    const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < nn; ++j) {
        const std::size_t jj = static_cast<std::size_t>(j);
        col[jj] = rq_kernel(xi, std::span<const double>(features_.row(jj), features_.cols),
                            gamma_);
    }
    ++computed_;
    lru_.emplace_front(i, std::move(col));
    map_[i] = lru_.begin();
    while (map_.size() > max_columns_) {
        map_.erase(lru_.back().first);
        lru_.pop_back();
    }
    return lru_.front().second;
}

std::size_t FastronModel::support_count() const {
    std::size_t c = 0;
    for (double a : alpha)
        if (a != 0.0) ++c;
    return c;
}

std::vector<std::size_t> FastronModel::support_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] != 0.0) idx.push_back(i);
    return idx;
}

std::vector<double> FastronModel::recompute_hypothesis() const {
    const std::size_t n = features.rows;
    std::vector<double> F(n, 0.0);
    const std::vector<std::size_t> sup = support_indices();
    const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < nn; ++j) {
        const std::size_t jj = static_cast<std::size_t>(j);
        const std::span<const double> xj(features.row(jj), features.cols);
        double acc = 0.0;
        for (std::size_t i : sup)
            acc += alpha[i] *
                   rq_kernel(std::span<const double>(features.row(i), features.cols), xj,
                             config.gamma);
        F[jj] = acc;
    }
    return F;
}

void remove_redundant_supports(FastronModel& model, GramCache& cache) {
    const std::size_t n = model.features.rows;
    for (;;) {
        std::size_t best = n;
        double best_val = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (model.alpha[i] == 0.0) continue;
            // Margin of i with its own unit self-kernel contribution removed.
            const double val = model.labels[i] * (model.hypothesis[i] - model.alpha[i]);
            if (val > best_val) {
                best_val = val;
                best = i;
            }
        }
        if (best == n) return;
        const std::vector<double>& col = cache.column(best);
        const double a = model.alpha[best];
        for (std::size_t j = 0; j < n; ++j) model.hypothesis[j] -= a * col[j];
        model.alpha[best] = 0.0;
    }
}

void remove_redundant_supports(FastronModel& model) {
    GramCache cache(model.features, model.config.gamma,
                    model.config.gram_cache_mb * std::size_t(1024 * 1024));
    remove_redundant_supports(model, cache);
}

FastronModel fastron_train(const Mat& features, const std::vector<int>& labels,
                           const FastronConfig& cfg,
                           const std::function<void(const FastronModel&)>& on_update) {
    cfg.validate();
    const std::size_t n = features.rows;
    if (n < 1) throw input_error("fastron needs at least one training point");
    if (labels.size() != n) throw input_error("fastron features/labels size mismatch");

    FastronModel model;
    model.features = features;
    model.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != -1 && labels[i] != 1) throw input_error("labels must be -1 or +1");
        model.labels[i] = static_cast<double>(labels[i]);
    }
    model.alpha.assign(n, 0.0);
    model.hypothesis.assign(n, 0.0);
    model.config = cfg;
    model.config.s_max = std::min(cfg.s_max, n);  // a cap beyond n cannot bind

    GramCache cache(model.features, cfg.gamma, cfg.gram_cache_mb * std::size_t(1024 * 1024));
    std::size_t supports = 0;
    model.iterations = 0;

    for (;;) {
        // Convergence check: every margin strictly positive.
        double min_margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
            min_margin = std::min(min_margin, model.labels[i] * model.hypothesis[i]);
        if (min_margin > 0.0) {
            remove_redundant_supports(model, cache);
            supports = model.support_count();
            double after = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i)
                after = std::min(after, model.labels[i] * model.hypothesis[i]);
            if (after > 0.0) {
                model.termination = FastronTermination::Converged;
                break;
            }
            // Removal disturbed another point's margin; keep correcting
            // within the remaining iteration budget.
        }
        if (model.iterations >= model.config.i_max) {
            model.termination = FastronTermination::IterationCap;
            break;
        }

        // Worst admissible margin; ties resolve to the lowest index. Points
        // that would grow the support set past the cap are skipped.
        std::size_t worst = n;
        double worst_margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double m = model.labels[i] * model.hypothesis[i];
            if (m > 0.0) continue;
            if (model.alpha[i] == 0.0 && supports >= model.config.s_max) continue;
            if (m < worst_margin) {
                worst_margin = m;
                worst = i;
            }
        }
        if (worst == n) {
            model.termination = FastronTermination::SupportCapBlocked;
            break;
        }

        const double y = model.labels[worst];
        const double target = y > 0.0 ? model.config.beta : 1.0;
        const double dalpha = target * y - model.hypothesis[worst];
        const double before = model.alpha[worst];
        model.alpha[worst] += dalpha;
        if (before == 0.0 && model.alpha[worst] != 0.0) ++supports;
        if (before != 0.0 && model.alpha[worst] == 0.0) --supports;

        const std::vector<double>& col = cache.column(worst);
        for (std::size_t j = 0; j < n; ++j) model.hypothesis[j] += dalpha * col[j];
        ++model.iterations;
        if (on_update) on_update(model);
    }
    return model;
}

FastronModel fastron_train(const LabeledDataset& data, const Environment& env,
                           const FastronConfig& cfg) {
    LabeledDataset working = data;
    ensure_fk_features(working, env);
    FastronModel model = fastron_train(working.fk_features, working.labels, cfg);
    model.env_ref = working.env_ref;
    return model;
}

double fastron_score(const FastronModel& model, std::span<const double> query) {
    if (query.size() != model.features.cols)
        throw input_error("query dimension " + std::to_string(query.size()) +
                          " does not match model feature dimension " +
                          std::to_string(model.features.cols));
    double acc = 0.0;
    for (std::size_t i = 0; i < model.alpha.size(); ++i) {
        if (model.alpha[i] == 0.0) continue;
        acc += model.alpha[i] *
               rq_kernel(std::span<const double>(model.features.row(i), model.features.cols),
                         query, model.config.gamma);
    }
    return acc;
}

FastronPredictions fastron_predict(const FastronModel& model, const Mat& queries) {
    if (queries.cols != model.features.cols)
        throw input_error("query dimension does not match model feature dimension");
    FastronPredictions out;
    out.scores.assign(queries.rows, 0.0);
    out.labels.assign(queries.rows, -1);
    // Compact support list once; prediction cost is O(supports * d) per query.
    const std::vector<std::size_t> sup = model.support_indices();
    const std::int64_t n = static_cast<std::int64_t>(queries.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t qi = 0; qi < n; ++qi) {
        const std::size_t q = static_cast<std::size_t>(qi);
        const std::span<const double> x(queries.row(q), queries.cols);
        double acc = 0.0;
        for (std::size_t i : sup)
            acc += model.alpha[i] *
                   rq_kernel(std::span<const double>(model.features.row(i), model.features.cols),
                             x, model.config.gamma);
        out.scores[q] = acc;
        out.labels[q] = acc >= 0.0 ? +1 : -1;
    }
    return out;
}

void save_fastron(const FastronModel& model, const std::string& path) {
    nlohmann::ordered_json h;
    h["format"] = "fastron";
    h["tool_version"] = kVersion;
    h["precision"] = "f64";
    h["gamma"] = model.config.gamma;
    h["beta"] = model.config.beta;
    h["i_max"] = model.config.i_max;
    h["s_max"] = model.config.s_max;
    h["gram_cache_mb"] = model.config.gram_cache_mb;
    h["termination"] = to_string(model.termination);
    h["iterations"] = model.iterations;
    h["env_ref"] = model.env_ref;
    const std::string header = h.dump();

    std::ofstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open for writing: " + path);
    f.write("FSM1", 4);
    const std::uint32_t version = 1;
    f.write(reinterpret_cast<const char*>(&version), 4);
    const std::uint32_t hlen = static_cast<std::uint32_t>(header.size());
    f.write(reinterpret_cast<const char*>(&hlen), 4);
    f.write(header.data(), static_cast<std::streamsize>(header.size()));

    const std::uint64_t n = model.features.rows, d = model.features.cols;
    f.write(reinterpret_cast<const char*>(&n), 8);
    f.write(reinterpret_cast<const char*>(&d), 8);
    f.write(reinterpret_cast<const char*>(model.features.data.data()),
            static_cast<std::streamsize>(model.features.data.size() * sizeof(double)));
    f.write(reinterpret_cast<const char*>(model.labels.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    f.write(reinterpret_cast<const char*>(model.hypothesis.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    // alpha is sparse: (index, value) pairs.
    const std::vector<std::size_t> sup = model.support_indices();
    const std::uint64_t nsup = sup.size();
    f.write(reinterpret_cast<const char*>(&nsup), 8);
    for (std::size_t i : sup) {
        const std::uint64_t idx = i;
        f.write(reinterpret_cast<const char*>(&idx), 8);
        f.write(reinterpret_cast<const char*>(&model.alpha[i]), 8);
    }
}

FastronModel load_fastron(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open model file: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "FSM1", 4) != 0)
        throw input_error("bad magic in model file: " + path);
    std::uint32_t version = 0, hlen = 0;
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&hlen), 4);
    if (version != 1) throw input_error("unsupported fastron model version");
    std::string header(hlen, '\0');
    f.read(header.data(), hlen);
    const nlohmann::json h = nlohmann::json::parse(header);

    FastronModel model;
    model.config.gamma = h.at("gamma").get<double>();
    model.config.beta = h.at("beta").get<double>();
    model.config.i_max = h.at("i_max").get<std::size_t>();
    model.config.s_max = h.at("s_max").get<std::size_t>();
    model.config.gram_cache_mb = h.at("gram_cache_mb").get<std::size_t>();
    const std::string term = h.at("termination").get<std::string>();
    model.termination = term == "converged"      ? FastronTermination::Converged
                        : term == "iteration_cap" ? FastronTermination::IterationCap
                                                  : FastronTermination::SupportCapBlocked;
    model.iterations = h.at("iterations").get<std::size_t>();
    model.env_ref = h.at("env_ref").get<std::string>();

    std::uint64_t n = 0, d = 0;
    f.read(reinterpret_cast<char*>(&n), 8);
    f.read(reinterpret_cast<char*>(&d), 8);
    model.features.resize(n, d);
    f.read(reinterpret_cast<char*>(model.features.data.data()),
           static_cast<std::streamsize>(model.features.data.size() * sizeof(double)));
    model.labels.resize(n);
    f.read(reinterpret_cast<char*>(model.labels.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
    model.hypothesis.resize(n);
    f.read(reinterpret_cast<char*>(model.hypothesis.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
    std::uint64_t nsup = 0;
    f.read(reinterpret_cast<char*>(&nsup), 8);
    model.alpha.assign(n, 0.0);
    for (std::uint64_t s = 0; s < nsup; ++s) {
        std::uint64_t idx = 0;
        double val = 0.0;
        f.read(reinterpret_cast<char*>(&idx), 8);
        f.read(reinterpret_cast<char*>(&val), 8);
        if (idx >= n) throw input_error("corrupt support index in model file");
        model.alpha[idx] = val;
    }
    if (!f) throw input_error("truncated model file: " + path);
    return model;
}

}  // namespace cspace
