#pragma once

#include <cstdint>
#include <functional>
#include <list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cspace/dataset.hpp"
#include "cspace/mat.hpp"

namespace cspace {

struct FastronConfig {
    double gamma = 5.0;        // kernel width
    double beta = 500.0;       // positive bias: target margin for +1 corrections
    std::size_t i_max = 5000;  // update cap
    std::size_t s_max = 10000; // support point cap
    std::size_t gram_cache_mb = 256;
    void validate() const;
};

enum class FastronTermination { Converged, IterationCap, SupportCapBlocked };

const char* to_string(FastronTermination t);

// Rational quadratic kernel, k(a, b) = (1 + (gamma/2) * ||a-b||^2)^-2.
double rq_kernel(std::span<const double> a, std::span<const double> b, double gamma);

// Bounded cache of Gram columns; at most one fresh column is computed per
// update, and evicted columns are recomputed on demand.
class GramCache {
public:
    GramCache(const Mat& features, double gamma, std::size_t budget_bytes);
    const std::vector<double>& column(std::size_t i);
    std::size_t columns_cached() const { return map_.size(); }
    std::size_t columns_computed() const { return computed_; }

private:
    const Mat& features_;
    double gamma_;
    std::size_t max_columns_;
    std::size_t computed_ = 0;
    std::list<std::pair<std::size_t, std::vector<double>>> lru_;
    std::unordered_map<std::size_t, decltype(lru_)::iterator> map_;
};

struct FastronModel {
    Mat features;                   // n x d training FK features
    std::vector<double> labels;     // +-1
    std::vector<double> alpha;      // nonzero entries are the support points
    std::vector<double> hypothesis; // F = K * alpha, maintained incrementally
    FastronConfig config;
    FastronTermination termination = FastronTermination::Converged;
    std::size_t iterations = 0;
    std::string env_ref;

    std::size_t support_count() const;
    std::vector<std::size_t> support_indices() const;
    // Recomputes F = K * alpha from scratch (consistency checks).
    std::vector<double> recompute_hypothesis() const;
};

// Kernel perceptron training: greedy one-step corrections of the worst
// margin, lazy Gram columns, conditional positive bias, iteration/support
// caps, redundant support removal at convergence. The optional observer
// fires after every update (used by tests to watch the support count).
FastronModel fastron_train(const Mat& features, const std::vector<int>& labels,
                           const FastronConfig& cfg,
                           const std::function<void(const FastronModel&)>& on_update = {});

FastronModel fastron_train(const LabeledDataset& data, const Environment& env,
                           const FastronConfig& cfg);

// In-place redundant support removal: while any support would keep a
// positive margin without its own contribution, drop the one with the
// largest such excess.
void remove_redundant_supports(FastronModel& model, GramCache& cache);
void remove_redundant_supports(FastronModel& model);

double fastron_score(const FastronModel& model, std::span<const double> query);

struct FastronPredictions {
    std::vector<int> labels;  // +1 iff score >= 0
    std::vector<double> scores;
};
FastronPredictions fastron_predict(const FastronModel& model, const Mat& queries);

void save_fastron(const FastronModel& model, const std::string& path);
FastronModel load_fastron(const std::string& path);

}  // namespace cspace
