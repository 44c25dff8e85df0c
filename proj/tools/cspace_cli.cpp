// Command-line surface: gen-env, sample, train, eval, predict, sweep, pareto.
// All subcommands take an explicit --seed where randomness is involved and
// write artifacts that embed the tool version, resolved config, seed, and
// precision mode. Exit codes: 0 success, 2 usage/config error, 1 runtime
// failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cspace/evalbench.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_json(const ordered_json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw cspace::input_error("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

std::uint64_t file_hash(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw cspace::input_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    const std::string bytes = ss.str();
    return cspace::fnv1a64(bytes.data(), bytes.size());
}

ordered_json common_stamp(std::uint64_t seed) {
    return {{"tool_version", cspace::kVersion}, {"seed", seed}, {"precision", "f64"}};
}

// JSON config file whose keys mirror the long flag names; explicit flags win.
void apply_config_file(CLI::App& app, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("--config", "cannot open config file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--config", std::string("bad JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        CLI::Option* opt = app.get_option_no_throw("--" + key);
        if (!opt) throw CLI::ValidationError("--config", "unknown key: " + key);
        if (opt->count() > 0) continue;  // explicit flag wins
        if (value.is_string())
            opt->add_result(value.get<std::string>());
        else if (value.is_array())
            for (const auto& item : value) opt->add_result(item.dump());
        else
            opt->add_result(value.dump());
        opt->run_callback();
    }
}

struct GenEnvArgs {
    std::size_t robots = 3, obstacles = 25;
    std::uint64_t seed = 0;
    std::string placement = "far";
    std::string out = "env.json";
    std::size_t density_samples = 2000;
};

int cmd_gen_env(const GenEnvArgs& a) {
    const cspace::Placement placement =
        a.placement == "far" ? cspace::Placement::Far : cspace::Placement::Close;
    const cspace::Environment env =
        cspace::generate_environment(a.robots, a.obstacles, a.seed, placement);
    cspace::save_environment(env, a.out);

    const double density = cspace::measure_collision_density(
        env, a.density_samples, cspace::substream_state(a.seed, "density-estimate"));
    ordered_json meta = common_stamp(a.seed);
    meta["config"] = {{"robots", a.robots},
                      {"obstacles", a.obstacles},
                      {"placement", a.placement},
                      {"density_samples", a.density_samples},
                      {"out", a.out}};
    meta["env_ref"] = cspace::environment_ref(env);
    meta["dof"] = env.total_dof();
    meta["density_estimate"] = density;
    write_json(meta, a.out + ".meta.json");
    std::cout << "wrote " << a.out << " (dof=" << env.total_dof()
              << ", density~" << density << ")\n";
    return 0;
}

struct SampleArgs {
    std::string env_path;
    std::size_t n_train = 30000, n_test = 5000;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::string format = "csv";
    bool fk_cache = false;
};

int cmd_sample(const SampleArgs& a) {
    const cspace::Environment env = cspace::load_environment(a.env_path);
    fs::create_directories(a.out_dir);
    const std::string ext = a.format == "csv" ? ".csv" : ".bin";

    auto emit = [&](const char* tag, std::size_t n, std::uint64_t stream_seed) {
        cspace::LabeledDataset ds = cspace::sample_dataset(env, n, stream_seed);
        const std::string path = (fs::path(a.out_dir) / (std::string(tag) + ext)).string();
        cspace::save_dataset(ds, path);
        if (a.fk_cache) {
            cspace::ensure_fk_features(ds, env);
            cspace::save_features_binary(ds.fk_features,
                                         (fs::path(a.out_dir) / (std::string(tag) + ".fk")).string());
        }
        ordered_json meta = common_stamp(a.seed);
        meta["env_ref"] = ds.env_ref;
        meta["n"] = n;
        meta["stream_seed"] = stream_seed;
        meta["density_estimate"] = ds.collision_fraction();
        meta["config"] = {{"env", a.env_path}, {"format", a.format}, {"fk_cache", a.fk_cache}};
        write_json(meta, path + ".meta.json");
        std::cout << "wrote " << path << " (n=" << n
                  << ", collision fraction=" << ds.collision_fraction() << ")\n";
    };
    emit("train", a.n_train, cspace::substream_state(a.seed, "train-data"));
    emit("test", a.n_test, cspace::substream_state(a.seed, "test-data"));
    return 0;
}

struct TrainArgs {
    std::string model = "deepcollide";
    std::string env_path, train_path;
    std::string out = "model.ckpt";
    std::uint64_t seed = 0;
    // shared: meaning depends on the model (default 1 for deepcollide,
    // 500 for fastron when not given)
    double beta = -1.0;
    // deepcollide
    int L = 12;
    double sigma = 1.0;
    int epochs = 50;
    int batch = 512;
    std::size_t hidden = 256;
    double lr_max = 1e-3, lr_min = 1e-7;
    int patience = 10;
    // fastron
    double gamma = 5.0;
    std::size_t imax = 5000, smax = 10000;
};

int cmd_train(const TrainArgs& a) {
    const cspace::Environment env = cspace::load_environment(a.env_path);
    cspace::LabeledDataset train = cspace::load_dataset(a.train_path);
    if (train.configurations.cols != env.total_dof())
        throw cspace::input_error("dataset DoF does not match environment");
    train.env_ref = cspace::environment_ref(env);

    ordered_json report = common_stamp(a.seed);
    report["model"] = a.model;
    report["env_ref"] = train.env_ref;

    if (a.model == "deepcollide") {
        const double beta = a.beta < 0.0 ? 1.0 : a.beta;
        cspace::ModelConfig mc;
        mc.encoding = {a.L, a.sigma};
        mc.hidden = a.hidden;
        cspace::TrainingConfig tc;
        tc.epochs = a.epochs;
        tc.batch_size = a.batch;
        tc.lr_max = a.lr_max;
        tc.lr_min = a.lr_min;
        tc.bias_beta = beta;
        tc.early_stop_patience = a.patience;
        tc.seed = a.seed;
        cspace::TrainedDeepCollide trained = cspace::train_deepcollide(train, env, mc, tc);
        cspace::save_checkpoint(trained.model, tc, train.env_ref, a.out);

        report["config"] = {{"L", a.L},         {"sigma", a.sigma},
                            {"beta", beta},     {"epochs", a.epochs},
                            {"batch", a.batch}, {"hidden", a.hidden},
                            {"lr_max", a.lr_max}, {"lr_min", a.lr_min},
                            {"patience", a.patience}};
        ordered_json curve = ordered_json::array();
        for (const auto& e : trained.report.epochs)
            curve.push_back(
                {{"loss", e.mean_loss}, {"val_accuracy", e.val_accuracy}, {"lr", e.lr}});
        report["epochs"] = std::move(curve);
        report["best_epoch"] = trained.report.best_epoch;
        report["best_val_accuracy"] = trained.report.best_val_accuracy;
        report["stopped_early"] = trained.report.stopped_early;
        report["wall_seconds"] = trained.report.wall_seconds;
        report["parameter_count"] = trained.model.parameter_count();
    } else if (a.model == "fastron") {
        const double beta = a.beta < 0.0 ? 500.0 : a.beta;
        cspace::FastronConfig cfg;
        cfg.gamma = a.gamma;
        cfg.beta = beta;
        cfg.i_max = a.imax;
        cfg.s_max = a.smax;
        const auto t0 = std::chrono::steady_clock::now();
        cspace::FastronModel model = cspace::fastron_train(train, env, cfg);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        cspace::save_fastron(model, a.out);

        report["config"] = {{"gamma", a.gamma},
                            {"beta", beta},
                            {"imax", a.imax},
                            {"smax", a.smax}};
        report["termination_reason"] = cspace::to_string(model.termination);
        report["iterations"] = model.iterations;
        report["support_count"] = model.support_count();
        report["wall_seconds"] = wall;
    } else {
        throw CLI::ValidationError("--model", "expected deepcollide or fastron");
    }
    report["checkpoint"] = a.out;
    report["checkpoint_hash"] = cspace::hex64(file_hash(a.out));
    write_json(report, a.out + ".report.json");
    std::cout << "wrote " << a.out << " and " << a.out << ".report.json\n";
    return 0;
}

struct EvalArgs {
    std::string model_path, env_path, test_path;
    std::string out = "eval.json";
    int warmup = 3, repeats = 5;
};

int cmd_eval(const EvalArgs& a) {
    const cspace::Environment env = cspace::load_environment(a.env_path);
    cspace::LabeledDataset test = cspace::load_dataset(a.test_path);
    if (test.configurations.cols != env.total_dof())
        throw cspace::input_error("dataset DoF does not match environment");
    cspace::ensure_fk_features(test, env);

    std::vector<int> predicted;
    cspace::TimingReport timing;
    ordered_json model_info;

    std::ifstream probe(a.model_path, std::ios::binary);
    char magic[4] = {0, 0, 0, 0};
    probe.read(magic, 4);
    probe.close();
    if (std::string(magic, 4) == "DCK1") {
        cspace::LoadedCheckpoint ck = cspace::load_checkpoint(a.model_path);
        if (ck.model.input_dim() != env.feature_dim())
            throw cspace::input_error("model feature dimension does not match environment");
        predicted = cspace::predict(ck.model, test.fk_features).labels;
        timing = cspace::time_inference(
            [&](const cspace::Mat& q) { (void)cspace::predict(ck.model, q); },
            test.fk_features, a.warmup, a.repeats);
        model_info = {{"kind", "deepcollide"},
                      {"parameter_count", ck.model.parameter_count()},
                      {"env_ref", ck.env_ref}};
    } else if (std::string(magic, 4) == "FSM1") {
        const cspace::FastronModel model = cspace::load_fastron(a.model_path);
        if (model.features.cols != env.feature_dim())
            throw cspace::input_error("model feature dimension does not match environment");
        predicted = cspace::fastron_predict(model, test.fk_features).labels;
        timing = cspace::time_inference(
            [&](const cspace::Mat& q) { (void)cspace::fastron_predict(model, q); },
            test.fk_features, a.warmup, a.repeats);
        model_info = {{"kind", "fastron"},
                      {"support_count", model.support_count()},
                      {"termination", cspace::to_string(model.termination)},
                      {"env_ref", model.env_ref}};
    } else {
        throw cspace::input_error("unrecognized model file: " + a.model_path);
    }

    const cspace::ConfusionCounts counts = cspace::confusion_counts(predicted, test.labels);
    const cspace::Metrics m = cspace::compute_metrics(counts);
    const cspace::DummyBaselines dummy = cspace::dummy_baselines(test.labels);

    ordered_json j = common_stamp(0);
    j.erase("seed");
    j["model"] = std::move(model_info);
    j["config"] = {{"model_file", a.model_path},
                   {"env", a.env_path},
                   {"test", a.test_path},
                   {"warmup", a.warmup},
                   {"repeats", a.repeats}};
    j["confusion"] = {{"tp", counts.tp}, {"tn", counts.tn}, {"fp", counts.fp}, {"fn", counts.fn}};
    j["metrics"] = ordered_json::object();
    if (m.accuracy) j["metrics"]["accuracy"] = *m.accuracy;
    if (m.tpr) j["metrics"]["tpr"] = *m.tpr;
    if (m.tnr) j["metrics"]["tnr"] = *m.tnr;
    j["dummy_baselines"] = {{"majority_accuracy", dummy.majority_accuracy},
                            {"chance_tpr", dummy.chance_tpr},
                            {"chance_tnr", dummy.chance_tnr}};
    j["timing"] = {{"per_inference_mean_s", timing.per_inference_mean_s},
                   {"per_inference_std_s", timing.per_inference_std_s},
                   {"per_inference_median_s", timing.per_inference_median_s},
                   {"query_count", timing.query_count},
                   {"warmup_count", timing.warmup_count},
                   {"repeat_count", timing.repeat_count},
                   {"thread_count", timing.thread_count},
                   {"clock_quality_warning", timing.clock_quality_warning}};
    write_json(j, a.out);
    std::cout << "wrote " << a.out;
    if (m.accuracy) std::cout << " (accuracy=" << *m.accuracy << ")";
    std::cout << "\n";
    return 0;
}

struct PredictArgs {
    std::string model_path, env_path, input_path;
    std::string out = "predictions.csv";
};

int cmd_predict(const PredictArgs& a) {
    const cspace::Environment env = cspace::load_environment(a.env_path);
    const cspace::LabeledDataset in = cspace::load_dataset(a.input_path);
    if (in.configurations.cols != env.total_dof())
        throw cspace::input_error("input DoF does not match environment");
    cspace::Mat feats;
    cspace::fk_feature_batch(env.robots, in.configurations, feats);

    std::vector<int> labels;
    std::vector<double> scores;
    std::ifstream probe(a.model_path, std::ios::binary);
    char magic[4] = {0, 0, 0, 0};
    probe.read(magic, 4);
    probe.close();
    if (std::string(magic, 4) == "DCK1") {
        const cspace::LoadedCheckpoint ck = cspace::load_checkpoint(a.model_path);
        cspace::Predictions p = cspace::predict(ck.model, feats);
        labels = std::move(p.labels);
        scores = std::move(p.scores);
    } else if (std::string(magic, 4) == "FSM1") {
        const cspace::FastronModel model = cspace::load_fastron(a.model_path);
        cspace::FastronPredictions p = cspace::fastron_predict(model, feats);
        labels = std::move(p.labels);
        scores = std::move(p.scores);
    } else {
        throw cspace::input_error("unrecognized model file: " + a.model_path);
    }

    std::ofstream f(a.out);
    if (!f) throw cspace::input_error("cannot open for writing: " + a.out);
    f << "index,score,label\n";
    char buf[40];
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", scores[i]);
        f << i << "," << buf << "," << labels[i] << "\n";
    }
    std::cout << "wrote " << a.out << " (" << labels.size() << " rows)\n";
    return 0;
}

struct SweepArgs {
    std::string axis = "dof";
    std::vector<double> values;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::string out_dir = "sweep_out";
    std::string placement = "far";
    std::string grid = "recommended";  // recommended | presets
    std::size_t n_train = 30000, n_test = 5000;
    double scale = 1.0;
    int jobs = 1;
    int dc_epochs = 50;
};

int cmd_sweep(const SweepArgs& a) {
    cspace::SweepProtocol proto;
    proto.n_train = a.n_train;
    proto.n_test = a.n_test;
    proto.seeds = a.seeds;
    proto.placement = a.placement == "far" ? cspace::Placement::Far : cspace::Placement::Close;
    proto.scale = a.scale;
    proto.jobs = a.jobs;
    proto.out_dir = a.out_dir;
    proto.dc_epochs = a.dc_epochs;
    if (a.grid == "presets") {
        proto.fastron_grid = cspace::fastron_preset_grid();
        proto.deepcollide_grid = cspace::deepcollide_preset_grid();
    } else if (a.grid != "recommended") {
        throw CLI::ValidationError("--grid", "expected recommended or presets");
    }
    const cspace::SweepAxis axis = cspace::sweep_axis_from_string(a.axis);

    const cspace::SweepSummary summary = cspace::run_sweep(
        axis, a.values, proto, [](const std::string& line) { std::cout << line << "\n"; });

    fs::create_directories(a.out_dir);
    cspace::write_sweep_csv(summary, (fs::path(a.out_dir) / "results.csv").string());
    cspace::write_sweep_index(summary, axis, a.values, proto,
                              (fs::path(a.out_dir) / "index.json").string());
    std::cout << "cells: " << summary.total << " total, " << summary.run << " run, "
              << summary.skipped << " skipped, " << summary.failed << " failed\n";
    return summary.failed == summary.total && summary.total > 0 ? 1 : 0;
}

struct ParetoArgs {
    std::string in_path;
    std::string out = "frontier.csv";
    std::string time_col = "infer_s_mean";
    std::string error_col;  // default: 1 - accuracy
};

int cmd_pareto(const ParetoArgs& a) {
    std::ifstream f(a.in_path);
    if (!f) throw cspace::input_error("cannot open: " + a.in_path);
    std::string header;
    if (!std::getline(f, header)) throw cspace::input_error("empty CSV: " + a.in_path);
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    auto col_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return i;
        throw cspace::input_error("column not found in CSV: " + name);
    };
    const std::size_t time_idx = col_index(a.time_col);
    const std::size_t err_idx = col_index(a.error_col.empty() ? "accuracy" : a.error_col);
    const bool err_is_accuracy = a.error_col.empty();

    std::vector<cspace::ParetoPoint> points;
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> row;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        if (row.size() < cols.size()) row.resize(cols.size());
        if (row[time_idx].empty() || row[err_idx].empty()) continue;
        const double t = std::strtod(row[time_idx].c_str(), nullptr);
        const double v = std::strtod(row[err_idx].c_str(), nullptr);
        points.push_back({t, err_is_accuracy ? 1.0 - v : v});
        lines.push_back(line);
    }
    const std::vector<std::size_t> keep = cspace::pareto_indices(points);

    std::ofstream out(a.out);
    if (!out) throw cspace::input_error("cannot open for writing: " + a.out);
    out << header << ",pareto_time,pareto_error\n";
    for (std::size_t i : keep)
        out << lines[i] << "," << points[i].time << "," << points[i].error << "\n";
    std::cout << "wrote " << a.out << " (" << keep.size() << " of " << points.size()
              << " points on the frontier)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learned collision detection workbench"};
    app.set_version_flag("--version", cspace::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; explicit flags override it");
    std::string precision = "f64-test";
    app.add_option("--precision", precision, "numeric mode (this build is f64 only)")
        ->check(CLI::IsMember({"f64-test"}));
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP thread cap (0 = library default)");

    GenEnvArgs ge;
    CLI::App* gen = app.add_subcommand("gen-env", "generate a random environment");
    gen->add_option("--robots", ge.robots, "number of 7-DoF arms")->check(CLI::PositiveNumber);
    gen->add_option("--obstacles", ge.obstacles, "number of obstacles");
    gen->add_option("--seed", ge.seed, "generation seed");
    gen->add_option("--placement", ge.placement, "far|close")
        ->check(CLI::IsMember({"far", "close"}));
    gen->add_option("--out", ge.out, "output environment JSON path");
    gen->add_option("--density-samples", ge.density_samples,
                    "Monte Carlo samples for the density estimate");

    SampleArgs sa;
    CLI::App* smp = app.add_subcommand("sample", "sample and label train/test datasets");
    smp->add_option("--env", sa.env_path, "environment JSON")->required();
    smp->add_option("--n-train", sa.n_train, "training rows");
    smp->add_option("--n-test", sa.n_test, "test rows");
    smp->add_option("--seed", sa.seed, "sampling seed");
    smp->add_option("--out-dir", sa.out_dir, "output directory");
    smp->add_option("--format", sa.format, "csv|bin")->check(CLI::IsMember({"csv", "bin"}));
    smp->add_flag("--fk-cache", sa.fk_cache, "also write FK feature cache files");

    TrainArgs ta;
    CLI::App* trn = app.add_subcommand("train", "train a model on a sampled dataset");
    trn->add_option("--model", ta.model, "deepcollide|fastron")
        ->check(CLI::IsMember({"deepcollide", "fastron"}));
    trn->add_option("--env", ta.env_path, "environment JSON")->required();
    trn->add_option("--train", ta.train_path, "training dataset")->required();
    trn->add_option("--out", ta.out, "checkpoint path");
    trn->add_option("--seed", ta.seed, "training seed");
    trn->add_option("--L", ta.L, "encoding frequency count");
    trn->add_option("--sigma", ta.sigma, "encoding frequency step");
    trn->add_option("--beta", ta.beta, "positive bias (both models)");
    trn->add_option("--epochs", ta.epochs, "epoch cap");
    trn->add_option("--batch", ta.batch, "batch size");
    trn->add_option("--hidden", ta.hidden, "hidden width");
    trn->add_option("--lr-max", ta.lr_max, "initial learning rate");
    trn->add_option("--lr-min", ta.lr_min, "final learning rate");
    trn->add_option("--patience", ta.patience, "early stop patience (epochs)");
    trn->add_option("--gamma", ta.gamma, "fastron kernel width");
    trn->add_option("--imax", ta.imax, "fastron update cap");
    trn->add_option("--smax", ta.smax, "fastron support cap");

    EvalArgs ea;
    CLI::App* evl = app.add_subcommand("eval", "metrics and timing on a test set");
    evl->add_option("--model-file", ea.model_path, "trained model file")->required();
    evl->add_option("--env", ea.env_path, "environment JSON")->required();
    evl->add_option("--test", ea.test_path, "test dataset")->required();
    evl->add_option("--out", ea.out, "output report JSON");
    evl->add_option("--warmup", ea.warmup, "warmup passes");
    evl->add_option("--repeats", ea.repeats, "timed passes (>= 3)");

    PredictArgs pa;
    CLI::App* prd = app.add_subcommand("predict", "score configurations with a trained model");
    prd->add_option("--model-file", pa.model_path, "trained model file")->required();
    prd->add_option("--env", pa.env_path, "environment JSON")->required();
    prd->add_option("--input", pa.input_path, "configurations CSV/bin")->required();
    prd->add_option("--out", pa.out, "output CSV");

    SweepArgs swa;
    CLI::App* swp = app.add_subcommand("sweep", "axis experiments over env/hyperparam grids");
    swp->add_option("--axis", swa.axis, "dof|density|sample-size")->required();
    swp->add_option("--values", swa.values, "axis values")->required()->delimiter(',');
    swp->add_option("--seeds", swa.seeds, "environment seeds")->delimiter(',');
    swp->add_option("--out-dir", swa.out_dir, "results directory (resumable)");
    swp->add_option("--placement", swa.placement, "far|close")
        ->check(CLI::IsMember({"far", "close"}));
    swp->add_option("--grid", swa.grid, "recommended|presets");
    swp->add_option("--n-train", swa.n_train, "training rows per cell");
    swp->add_option("--n-test", swa.n_test, "test rows per cell");
    swp->add_option("--scale", swa.scale, "shrink factor for CI runs");
    swp->add_option("--jobs", swa.jobs, "parallel cells (timing stays exclusive)");
    swp->add_option("--dc-epochs", swa.dc_epochs, "deepcollide epoch cap per cell");

    ParetoArgs pta;
    CLI::App* par = app.add_subcommand("pareto", "extract the non-dominated frontier");
    par->add_option("--in", pta.in_path, "results CSV")->required();
    par->add_option("--out", pta.out, "frontier CSV");
    par->add_option("--time-col", pta.time_col, "time column name");
    par->add_option("--error-col", pta.error_col,
                    "error column name (default: 1 - accuracy)");

    try {
        app.parse(argc, argv);
        if (!config_path.empty()) {
            CLI::App* sub = app.get_subcommands().front();
            apply_config_file(*sub, config_path);
        }
#ifdef _OPENMP
        if (threads > 0) omp_set_num_threads(threads);
#endif
        if (*gen) return cmd_gen_env(ge);
        if (*smp) return cmd_sample(sa);
        if (*trn) return cmd_train(ta);
        if (*evl) return cmd_eval(ea);
        if (*prd) return cmd_predict(pa);
        if (*swp) return cmd_sweep(swa);
        if (*par) return cmd_pareto(pta);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // --help/--version exit 0, usage errors exit 2
    } catch (const cspace::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cspace::spec_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 1;
    }
}
