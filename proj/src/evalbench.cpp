#include "cspace/evalbench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cspace {

namespace fs = std::filesystem;

ConfusionCounts confusion_counts(const std::vector<int>& predicted,
                                 const std::vector<int>& actual) {
    if (predicted.size() != actual.size())
        throw input_error("prediction/label count mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (actual[i] > 0)
            (predicted[i] > 0 ? c.tp : c.fn)++;
        else
            (predicted[i] > 0 ? c.fp : c.tn)++;
    }
    return c;
}

Metrics compute_metrics(const ConfusionCounts& c) {
    Metrics m;
    if (c.total() > 0)
        m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    if (c.tp + c.fn > 0)
        m.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (c.tn + c.fp > 0)
        m.tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    return m;
}

DummyBaselines dummy_baselines(const std::vector<int>& labels) {
    if (labels.empty()) throw input_error("dummy baselines need a nonempty label set");
    std::size_t pos = 0;
    for (int y : labels)
        if (y > 0) ++pos;
    const double p = static_cast<double>(pos) / static_cast<double>(labels.size());
    DummyBaselines d;
    d.majority_accuracy = std::max(p, 1.0 - p);
    d.chance_tpr = p;        // expected value of guessing +1 with probability p
    d.chance_tnr = 1.0 - p;
    return d;
}

namespace {

double steady_clock_resolution() {
    using clock = std::chrono::steady_clock;
    double best = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 5; ++trial) {
        const auto t0 = clock::now();
        auto t1 = clock::now();
        while (t1 == t0) t1 = clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

struct ThreadLimiter {
    // Pins OpenMP parallel regions issued by this thread to one thread for
    // the duration of a timing section.
#ifdef _OPENMP
    int saved;
    ThreadLimiter() : saved(omp_get_max_threads()) { omp_set_num_threads(1); }
    ~ThreadLimiter() { omp_set_num_threads(saved); }
#else
    ThreadLimiter() = default;
#endif
};

}  // namespace

TimingReport time_inference(const BatchPredictor& predictor, const Mat& queries, int warmup,
                            int repeats) {
    if (queries.rows == 0) throw input_error("timing needs a nonempty query batch");
    if (repeats < 3) throw input_error("timing needs repeat_count >= 3");
    if (warmup < 0) throw input_error("warmup count must be >= 0");

    TimingReport rep;
    rep.query_count = queries.rows;
    rep.warmup_count = warmup;
    rep.repeat_count = repeats;
    rep.thread_count = 1;
    rep.clock_resolution_s = steady_clock_resolution();

    ThreadLimiter single_threaded;
    for (int w = 0; w < warmup; ++w) predictor(queries);

    std::vector<double> batch_s(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        predictor(queries);
        const auto t1 = std::chrono::steady_clock::now();
        batch_s[static_cast<std::size_t>(r)] = std::chrono::duration<double>(t1 - t0).count();
    }

    std::vector<double> sorted = batch_s;
    std::sort(sorted.begin(), sorted.end());
    rep.batch_median_s = sorted[sorted.size() / 2];
    const double n = static_cast<double>(queries.rows);
    rep.per_inference_median_s = rep.batch_median_s / n;

    double mean = 0.0;
    for (double b : batch_s) mean += b / n;
    mean /= static_cast<double>(repeats);
    double var = 0.0;
    for (double b : batch_s) {
        const double d = b / n - mean;
        var += d * d;
    }
    var /= static_cast<double>(repeats - 1);
    rep.per_inference_mean_s = mean;
    rep.per_inference_std_s = std::sqrt(var);
    rep.clock_quality_warning = rep.clock_resolution_s > 0.01 * sorted.front();
    return rep;
}

std::vector<std::size_t> pareto_indices(const std::vector<ParetoPoint>& points) {
    for (const auto& p : points)
        if (!std::isfinite(p.time) || !std::isfinite(p.error))
            throw input_error("pareto points must be finite");
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j)
            if (points[j].time < points[i].time && points[j].error < points[i].error)
                dominated = true;
        if (!dominated) keep.push_back(i);
    }
    return keep;
}

std::vector<ParetoPoint> pareto_frontier(const std::vector<ParetoPoint>& points) {
    std::vector<ParetoPoint> out;
    for (std::size_t i : pareto_indices(points)) out.push_back(points[i]);
    return out;
}

// ---- sweep experiments -------------------------------------------------

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::Dof: return "dof";
        case SweepAxis::Density: return "density";
        case SweepAxis::SampleSize: return "sample_size";
    }
    return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "dof") return SweepAxis::Dof;
    if (s == "density") return SweepAxis::Density;
    if (s == "sample-size" || s == "sample_size") return SweepAxis::SampleSize;
    throw input_error("unknown sweep axis: " + s + " (expected dof|density|sample-size)");
}

std::vector<FastronConfig> fastron_preset_grid() {
    std::vector<FastronConfig> grid;
    for (std::size_t smax : {3000u, 10000u, 30000u})
        for (std::size_t imax : {5000u, 30000u})
            for (double gamma : {1.0, 5.0, 10.0})
                for (double beta : {1.0, 500.0, 1000.0}) {
                    FastronConfig c;
                    c.s_max = smax;
                    c.i_max = imax;
                    c.gamma = gamma;
                    c.beta = beta;
                    grid.push_back(c);
                }
    return grid;
}

std::vector<DeepCollideHp> deepcollide_preset_grid() {
    std::vector<DeepCollideHp> grid;
    for (int L : {4, 8, 12})
        for (double beta : {1.0, 2.0, 5.0})
            for (double sigma : {0.5, 1.0, 2.0}) grid.push_back({L, beta, sigma});
    return grid;
}

FastronConfig fastron_recommended() {
    FastronConfig c;
    c.gamma = 5.0;
    c.beta = 500.0;
    c.i_max = 5000;
    c.s_max = 10000;
    return c;
}

DeepCollideHp deepcollide_recommended() { return {12, 1.0, 1.0}; }

namespace {

std::string fastron_hp_string(const FastronConfig& c) {
    std::ostringstream ss;
    ss << "gamma=" << c.gamma << ";beta=" << c.beta << ";imax=" << c.i_max
       << ";smax=" << c.s_max;
    return ss.str();
}

std::string dc_hp_string(const DeepCollideHp& h) {
    std::ostringstream ss;
    ss << "L=" << h.L << ";beta=" << h.beta << ";sigma=" << h.sigma;
    return ss.str();
}

struct CellSpec {
    double axis_value;
    std::uint64_t seed;
    std::string model;  // "deepcollide" | "fastron"
    std::string hp;
    FastronConfig fastron;
    DeepCollideHp dc;
};

std::string cell_file_id(SweepAxis axis, const CellSpec& cell) {
    std::ostringstream ss;
    ss << to_string(axis) << "_" << cell.axis_value << "_" << cell.model << "_"
       << hex64(fnv1a64(cell.hp)).substr(8) << "_s" << cell.seed;
    return ss.str();
}

std::mutex g_timing_lock;

nlohmann::ordered_json timing_json(const TimingReport& t) {
    return {{"per_inference_mean_s", t.per_inference_mean_s},
            {"per_inference_std_s", t.per_inference_std_s},
            {"per_inference_median_s", t.per_inference_median_s},
            {"batch_median_s", t.batch_median_s},
            {"query_count", t.query_count},
            {"warmup_count", t.warmup_count},
            {"repeat_count", t.repeat_count},
            {"thread_count", t.thread_count},
            {"clock_resolution_s", t.clock_resolution_s},
            {"clock_quality_warning", t.clock_quality_warning}};
}

SweepCellResult run_cell(SweepAxis axis, const CellSpec& cell, const SweepProtocol& proto) {
    SweepCellResult res;
    res.cell_id = cell_file_id(axis, cell);
    res.axis = axis;
    res.axis_value = cell.axis_value;
    res.model = cell.model;
    res.hyperparameters = cell.hp;
    res.seed = cell.seed;

    std::size_t robots = 3, obstacles = 25;
    std::size_t n_train = std::max<std::size_t>(
        100, static_cast<std::size_t>(static_cast<double>(proto.n_train) * proto.scale));
    const std::size_t n_test = std::max<std::size_t>(
        50, static_cast<std::size_t>(static_cast<double>(proto.n_test) * proto.scale));
    switch (axis) {
        case SweepAxis::Dof: {
            const auto dof = static_cast<std::size_t>(cell.axis_value);
            if (dof == 0 || dof % 7 != 0)
                throw input_error("dof axis values must be positive multiples of 7");
            robots = dof / 7;
            break;
        }
        case SweepAxis::Density:
            obstacles = static_cast<std::size_t>(cell.axis_value);
            break;
        case SweepAxis::SampleSize:
            n_train = std::max<std::size_t>(
                40, static_cast<std::size_t>(static_cast<double>(cell.axis_value) * proto.scale));
            break;
    }

    const Environment env = generate_environment(robots, obstacles, cell.seed, proto.placement);
    res.env_ref = environment_ref(env);
    LabeledDataset train =
        sample_dataset(env, n_train, substream_state(cell.seed, "train-data"));
    LabeledDataset test = sample_dataset(env, n_test, substream_state(cell.seed, "test-data"));
    ensure_fk_features(train, env);
    ensure_fk_features(test, env);

    std::vector<int> predicted;
    if (cell.model == "fastron") {
        FastronConfig cfg = cell.fastron;
        if (axis == SweepAxis::SampleSize) cfg.i_max = cfg.s_max = 50000;  // raised caps
        const auto t0 = std::chrono::steady_clock::now();
        FastronModel model = fastron_train(train.fk_features, train.labels, cfg);
        res.train_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        model.env_ref = res.env_ref;
        res.termination_reason = to_string(model.termination);
        predicted = fastron_predict(model, test.fk_features).labels;
        {
            std::lock_guard<std::mutex> lock(g_timing_lock);
            res.timing = time_inference(
                [&](const Mat& q) { (void)fastron_predict(model, q); }, test.fk_features,
                proto.timing_warmup, proto.timing_repeats);
        }
    } else if (cell.model == "deepcollide") {
        ModelConfig mc;
        mc.encoding = {cell.dc.L, cell.dc.sigma};
        mc.hidden = proto.dc_hidden;
        TrainingConfig tc;
        tc.epochs = proto.dc_epochs;
        tc.batch_size = proto.dc_batch;
        tc.bias_beta = cell.dc.beta;
        tc.seed = cell.seed;
        TrainedDeepCollide trained = train_deepcollide(train, env, mc, tc);
        res.train_seconds = trained.report.wall_seconds;
        res.termination_reason = trained.report.stopped_early ? "early_stop" : "completed";
        predicted = predict(trained.model, test.fk_features).labels;
        {
            std::lock_guard<std::mutex> lock(g_timing_lock);
            res.timing = time_inference(
                [&](const Mat& q) { (void)predict(trained.model, q); }, test.fk_features,
                proto.timing_warmup, proto.timing_repeats);
        }
    } else {
        throw input_error("unknown model in sweep cell: " + cell.model);
    }
    res.metrics = compute_metrics(confusion_counts(predicted, test.labels));
    return res;
}

nlohmann::ordered_json cell_json(const SweepCellResult& r) {
    nlohmann::ordered_json j;
    j["cell_id"] = r.cell_id;
    j["axis"] = to_string(r.axis);
    j["axis_value"] = r.axis_value;
    j["model"] = r.model;
    j["hyperparameters"] = r.hyperparameters;
    j["seed"] = r.seed;
    j["failed"] = r.failed;
    if (r.failed) {
        j["error"] = r.error;
        return j;
    }
    if (r.metrics.accuracy) j["accuracy"] = *r.metrics.accuracy;
    if (r.metrics.tpr) j["tpr"] = *r.metrics.tpr;
    if (r.metrics.tnr) j["tnr"] = *r.metrics.tnr;
    j["train_s"] = r.train_seconds;
    j["timing"] = timing_json(r.timing);
    j["termination_reason"] = r.termination_reason;
    j["env_ref"] = r.env_ref;
    j["tool_version"] = kVersion;
    j["precision"] = "f64";
    return j;
}

SweepCellResult cell_from_json(const nlohmann::json& j) {
    SweepCellResult r;
    r.cell_id = j.at("cell_id").get<std::string>();
    r.axis = sweep_axis_from_string(j.at("axis").get<std::string>());
    r.axis_value = j.at("axis_value").get<double>();
    r.model = j.at("model").get<std::string>();
    r.hyperparameters = j.at("hyperparameters").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.failed = j.value("failed", false);
    if (r.failed) {
        r.error = j.value("error", "");
        return r;
    }
    if (j.contains("accuracy")) r.metrics.accuracy = j["accuracy"].get<double>();
    if (j.contains("tpr")) r.metrics.tpr = j["tpr"].get<double>();
    if (j.contains("tnr")) r.metrics.tnr = j["tnr"].get<double>();
    r.train_seconds = j.at("train_s").get<double>();
    const auto& t = j.at("timing");
    r.timing.per_inference_mean_s = t.at("per_inference_mean_s").get<double>();
    r.timing.per_inference_std_s = t.at("per_inference_std_s").get<double>();
    r.timing.per_inference_median_s = t.at("per_inference_median_s").get<double>();
    r.timing.batch_median_s = t.at("batch_median_s").get<double>();
    r.timing.query_count = t.at("query_count").get<std::size_t>();
    r.timing.warmup_count = t.at("warmup_count").get<int>();
    r.timing.repeat_count = t.at("repeat_count").get<int>();
    r.timing.thread_count = t.at("thread_count").get<int>();
    r.timing.clock_resolution_s = t.at("clock_resolution_s").get<double>();
    r.timing.clock_quality_warning = t.at("clock_quality_warning").get<bool>();
    r.termination_reason = j.at("termination_reason").get<std::string>();
    r.env_ref = j.at("env_ref").get<std::string>();
    return r;
}

}  // namespace

SweepSummary run_sweep(SweepAxis axis, const std::vector<double>& values,
                       const SweepProtocol& protocol,
                       const std::function<void(const std::string&)>& progress) {
    if (values.empty()) throw input_error("sweep needs at least one axis value");
    if (protocol.seeds.empty()) throw input_error("sweep needs at least one seed");

    std::vector<CellSpec> cells;
    for (double v : values) {
        for (std::uint64_t seed : protocol.seeds) {
            std::vector<std::string> seen_hp;
            for (const FastronConfig& fc : protocol.fastron_grid) {
                FastronConfig eff = fc;
                if (axis == SweepAxis::SampleSize) eff.i_max = eff.s_max = 50000;
                CellSpec c{v, seed, "fastron", fastron_hp_string(eff), eff, {}};
                // The sample-size override can collapse grid entries; drop
                // duplicates rather than recomputing identical cells.
                if (std::find(seen_hp.begin(), seen_hp.end(), c.hp) != seen_hp.end()) continue;
                seen_hp.push_back(c.hp);
                cells.push_back(std::move(c));
            }
            for (const DeepCollideHp& h : protocol.deepcollide_grid)
                cells.push_back({v, seed, "deepcollide", dc_hp_string(h), {}, h});
        }
    }

    const fs::path out_dir(protocol.out_dir);
    const fs::path cell_dir = out_dir / "cells";
    fs::create_directories(cell_dir);

    SweepSummary summary;
    summary.total = cells.size();
    summary.results.resize(cells.size());
    std::vector<int> status(cells.size(), 0);  // 0 run, 1 skipped, 2 failed

    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;
    auto worker = [&]() {
#ifdef _OPENMP
        if (protocol.jobs > 1) omp_set_num_threads(1);
#endif
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= cells.size()) return;
            const CellSpec& cell = cells[idx];
            const std::string id = cell_file_id(axis, cell);
            const fs::path done = cell_dir / (id + ".json");
            if (fs::exists(done)) {
                std::ifstream f(done);
                std::ostringstream ss;
                ss << f.rdbuf();
                summary.results[idx] = cell_from_json(nlohmann::json::parse(ss.str()));
                status[idx] = 1;
                if (progress) {
                    std::lock_guard<std::mutex> lock(progress_mutex);
                    progress("skip " + id);
                }
                continue;
            }
            SweepCellResult res;
            try {
                res = run_cell(axis, cell, protocol);
            } catch (const std::exception& e) {
                res.cell_id = id;
                res.axis = axis;
                res.axis_value = cell.axis_value;
                res.model = cell.model;
                res.hyperparameters = cell.hp;
                res.seed = cell.seed;
                res.failed = true;
                res.error = e.what();
                status[idx] = 2;
            }
            // Completion marker: failed cells get a .failed.json and are
            // retried on the next run.
            const fs::path target = res.failed ? cell_dir / (id + ".failed.json") : done;
            std::ofstream f(target);
            f << cell_json(res).dump(2) << "\n";
            summary.results[idx] = std::move(res);
            if (progress) {
                std::lock_guard<std::mutex> lock(progress_mutex);
                progress((summary.results[idx].failed ? "fail " : "done ") + id);
            }
        }
    };

    const int jobs = std::max(1, protocol.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (int s : status) {
        if (s == 1)
            ++summary.skipped;
        else if (s == 2)
            ++summary.failed;
        else
            ++summary.run;
    }
    return summary;
}

void write_sweep_csv(const SweepSummary& summary, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw input_error("cannot open for writing: " + path);
    f << "axis,value,model,hyperparameters,accuracy,tpr,tnr,train_s,infer_s_mean,"
         "infer_s_std,seed,termination_reason\n";
    char buf[64];
    auto opt = [&](const std::optional<double>& v) -> std::string {
        if (!v) return "";
        std::snprintf(buf, sizeof buf, "%.17g", *v);
        return buf;
    };
    auto num = [&](double v) -> std::string {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    };
    for (const auto& r : summary.results) {
        if (r.failed) continue;
        f << to_string(r.axis) << "," << num(r.axis_value) << "," << r.model << ","
          << r.hyperparameters << "," << opt(r.metrics.accuracy) << "," << opt(r.metrics.tpr)
          << "," << opt(r.metrics.tnr) << "," << num(r.train_seconds) << ","
          << num(r.timing.per_inference_mean_s) << "," << num(r.timing.per_inference_std_s)
          << "," << r.seed << "," << r.termination_reason << "\n";
    }
}

void write_sweep_index(const SweepSummary& summary, SweepAxis axis,
                       const std::vector<double>& values, const SweepProtocol& protocol,
                       const std::string& path) {
    nlohmann::ordered_json j;
    j["tool_version"] = kVersion;
    j["precision"] = "f64";
    j["axis"] = to_string(axis);
    j["values"] = values;
    j["seeds"] = protocol.seeds;
    j["n_train"] = protocol.n_train;
    j["n_test"] = protocol.n_test;
    j["scale"] = protocol.scale;
    j["placement"] = protocol.placement == Placement::Far ? "far" : "close";
    j["cells_total"] = summary.total;
    j["cells_run"] = summary.run;
    j["cells_skipped"] = summary.skipped;
    j["cells_failed"] = summary.failed;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : summary.results)
        arr.push_back({{"cell_id", r.cell_id}, {"failed", r.failed}});
    j["cells"] = std::move(arr);
    std::ofstream f(path);
    if (!f) throw input_error("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

}  // namespace cspace
