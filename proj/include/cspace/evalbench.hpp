#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cspace/dataset.hpp"
#include "cspace/deepcollide.hpp"
#include "cspace/fastron.hpp"

namespace cspace {

struct ConfusionCounts {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    std::size_t total() const { return tp + tn + fp + fn; }
};

ConfusionCounts confusion_counts(const std::vector<int>& predicted,
                                 const std::vector<int>& actual);

// Ratios with empty denominators are absent, never reported as 0.
struct Metrics {
    std::optional<double> accuracy;
    std::optional<double> tpr;
    std::optional<double> tnr;
};

Metrics compute_metrics(const ConfusionCounts& c);

// Majority-label accuracy plus the expected TPR/TNR of guessing +1 with
// probability equal to the collision fraction.
struct DummyBaselines {
    double majority_accuracy = 0.0;
    double chance_tpr = 0.0;
    double chance_tnr = 0.0;
};

DummyBaselines dummy_baselines(const std::vector<int>& labels);

struct TimingReport {
    double per_inference_mean_s = 0.0;
    double per_inference_std_s = 0.0;
    double per_inference_median_s = 0.0;  // headline number
    double batch_median_s = 0.0;
    std::size_t query_count = 0;
    int warmup_count = 0;
    int repeat_count = 0;
    int thread_count = 1;
    double clock_resolution_s = 0.0;
    bool clock_quality_warning = false;
};

using BatchPredictor = std::function<void(const Mat& queries)>;

// Times `repeats` single-threaded passes over the full query batch after
// `warmup` unclocked passes, on the monotonic clock. Queries are FK feature
// rows; feature computation is never inside the clock.
TimingReport time_inference(const BatchPredictor& predictor, const Mat& queries, int warmup = 3,
                            int repeats = 5);

struct ParetoPoint {
    double time = 0.0;
    double error = 0.0;
};

// Indices of points not strictly dominated in both coordinates (minimize
// both), in stable input order.
std::vector<std::size_t> pareto_indices(const std::vector<ParetoPoint>& points);
std::vector<ParetoPoint> pareto_frontier(const std::vector<ParetoPoint>& points);

// ---- sweep experiments -------------------------------------------------

enum class SweepAxis { Dof, Density, SampleSize };

const char* to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

struct DeepCollideHp {
    int L = 12;
    double beta = 1.0;
    double sigma = 1.0;
};

// Hyperparameter preset grids (54 Fastron combinations, 27 DeepCollide).
std::vector<FastronConfig> fastron_preset_grid();
std::vector<DeepCollideHp> deepcollide_preset_grid();
FastronConfig fastron_recommended();
DeepCollideHp deepcollide_recommended();

struct SweepProtocol {
    std::size_t n_train = 30000;
    std::size_t n_test = 5000;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    Placement placement = Placement::Far;
    double scale = 1.0;  // CI shrink factor applied to n_train/n_test
    int jobs = 1;
    std::string out_dir = "sweep_out";
    std::vector<FastronConfig> fastron_grid = {fastron_recommended()};
    std::vector<DeepCollideHp> deepcollide_grid = {deepcollide_recommended()};
    // DeepCollide training knobs shared across cells.
    int dc_epochs = 50;
    int dc_batch = 512;
    std::size_t dc_hidden = 256;
    int timing_warmup = 3;
    int timing_repeats = 5;
};

struct SweepCellResult {
    std::string cell_id;
    SweepAxis axis = SweepAxis::Dof;
    double axis_value = 0.0;
    std::string model;
    std::string hyperparameters;
    std::uint64_t seed = 0;
    Metrics metrics;
    TimingReport timing;
    double train_seconds = 0.0;
    std::string termination_reason;
    std::string env_ref;
    bool failed = false;
    std::string error;
};

struct SweepSummary {
    std::size_t total = 0, run = 0, skipped = 0, failed = 0;
    std::vector<SweepCellResult> results;
};

// Runs every (axis value x hyperparameter x seed x model) cell, resumable
// through per-cell completion files under <out_dir>/cells/. Single-cell
// failures are recorded, never fatal. Cells may run on several worker
// threads; timing sections hold a global lock so only one cell measures at
// a time.
SweepSummary run_sweep(SweepAxis axis, const std::vector<double>& values,
                       const SweepProtocol& protocol,
                       const std::function<void(const std::string&)>& progress = {});

// results.csv with the fixed column set; absent metrics stay empty.
void write_sweep_csv(const SweepSummary& summary, const std::string& path);
void write_sweep_index(const SweepSummary& summary, SweepAxis axis,
                       const std::vector<double>& values, const SweepProtocol& protocol,
                       const std::string& path);

}  // namespace cspace
