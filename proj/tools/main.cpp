#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rmh/classifiers.hpp"
#include "rmh/dataset.hpp"
#include "rmh/distance_correlation.hpp"
#include "rmh/experiment.hpp"
#include "rmh/selection.hpp"
#include "rmh/synthetic.hpp"

namespace {

rmh::DcorEngine engine_from_name(const std::string& name) {
    if (name == "naive") return rmh::DcorEngine::naive;
    if (name == "fast") return rmh::DcorEngine::fast;
    throw CLI::ValidationError("--engine", "must be 'naive' or 'fast'");
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct BenchFlags {
    std::string config_path;
    std::string problem;
    std::string dataset;
    std::vector<std::string> preprocess;
    std::vector<std::string> methods;
    std::vector<std::size_t> n_train;
    std::optional<std::size_t> n_test;
    std::optional<std::size_t> grid_size;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<double> r;
    std::vector<double> s_grid;
    std::optional<std::size_t> c_max;
    std::string engine;
    std::string out;
    std::string format = "csv";

    rmh::ExperimentConfig to_config() const {
        rmh::ExperimentConfig config;
        if (!config_path.empty()) {
            config = rmh::ExperimentConfig::from_json_file(config_path);
        }
        if (!problem.empty()) config.problem = problem;
        if (!dataset.empty()) config.dataset_path = dataset;
        if (!preprocess.empty()) config.preprocess = preprocess;
        if (!methods.empty()) {
            config.methods.clear();
            for (const auto& m : methods) {
                config.methods.push_back(rmh::method_from_name(m));
            }
        }
        if (!n_train.empty()) config.n_train = n_train;
        if (n_test) config.n_test = *n_test;
        if (grid_size) config.grid_size = *grid_size;
        if (reps) config.repetitions = *reps;
        if (seed) config.seed = *seed;
        if (threads) config.threads = *threads;
        if (r) config.policy.r = *r;
        if (!s_grid.empty()) config.policy.s_grid = s_grid;
        if (c_max) config.policy.c_max = *c_max;
        if (!engine.empty()) config.policy.engine = engine_from_name(engine);
        return config;
    }

    rmh::ResultFormat result_format() const {
        if (format == "csv") return rmh::ResultFormat::csv;
        if (format == "json") return rmh::ResultFormat::json;
        throw CLI::ValidationError("--format", "must be 'csv' or 'json'");
    }
};

void add_bench_flags(CLI::App* cmd, BenchFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file; flags override");
    cmd->add_option("--methods", flags.methods,
                    "methods to run (base, mh, rmh, pca, pls)")
        ->delimiter(',');
    cmd->add_option("--reps", flags.reps, "independent repetitions");
    cmd->add_option("--seed", flags.seed, "master seed");
    cmd->add_option("--threads", flags.threads, "worker threads");
    cmd->add_option("--r", flags.r, "redundancy threshold");
    cmd->add_option("--s", flags.s_grid, "relevance threshold grid for CV")
        ->delimiter(',');
    cmd->add_option("--c-max", flags.c_max, "max selected variables/components");
    cmd->add_option("--engine", flags.engine, "dcor engine: naive|fast");
    cmd->add_option("--out", flags.out, "output file ('-' for stdout)");
    cmd->add_option("--format", flags.format, "output format: csv|json");
}

void emit_experiment(const rmh::ExperimentResult& result, const BenchFlags& flags) {
    const std::string text = flags.result_format() == rmh::ResultFormat::csv
                                 ? rmh::render_results_csv(result)
                                 : rmh::render_results_json(result);
    write_text(flags.out, text);
    std::cerr << "records: " << result.records.size() << "\n";
    for (const auto& agg : result.aggregates()) {
        std::cerr << "  " << rmh::method_name(agg.method) << " n_train=" << agg.n_train
                  << " mean_error=" << agg.mean_error << " (std " << agg.std_error
                  << ") mean_vars=" << agg.mean_n_vars << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Recursive maxima hunting for functional data classification"};
    app.require_subcommand(1);

    // --- simulate ---------------------------------------------------------
    std::string sim_problem = "peak";
    std::size_t sim_n = 200, sim_grid = 200;
    std::uint64_t sim_seed = 0;
    std::string sim_out;
    auto* simulate = app.add_subcommand(
        "simulate", "Generate a synthetic Brownian-plus-trend dataset CSV");
    simulate->add_option("--problem", sim_problem,
                         "trend name: peak, peak2, square, sin, zero");
    simulate->add_option("--n", sim_n, "number of trajectories (even)");
    simulate->add_option("--grid-size", sim_grid, "equidistant grid size");
    simulate->add_option("--seed", sim_seed, "generator seed");
    simulate->add_option("--out", sim_out, "output CSV path")->required();
    simulate->callback([&] {
        const rmh::SyntheticProblem problem{rmh::TrendSpec::by_name(sim_problem),
                                            rmh::Grid::uniform(sim_grid), 0.5};
        const auto data = rmh::generate_problem(problem, sim_n, sim_seed);
        rmh::save_dataset(data, sim_out);
        std::cerr << "wrote " << data.n() << " x " << data.p() << " dataset to "
                  << sim_out << "\n";
    });

    // --- dcor -------------------------------------------------------------
    std::string dcor_data, dcor_out, dcor_engine = "naive";
    auto* dcor = app.add_subcommand(
        "dcor", "Relevance curve: squared distance correlation with the label");
    dcor->add_option("--data", dcor_data, "dataset CSV")->required();
    dcor->add_option("--engine", dcor_engine, "dcor engine: naive|fast");
    dcor->add_option("--out", dcor_out, "output CSV ('-' for stdout)");
    dcor->callback([&] {
        const auto data = rmh::load_dataset(dcor_data);
        const auto curve = rmh::relevance_curve(data, engine_from_name(dcor_engine));
        std::string text = "t,dcor_sq\n";
        for (std::size_t j = 0; j < curve.grid.size(); ++j) {
            text += format_g17(curve.grid[j]) + "," + format_g17(curve.values[j]) + "\n";
        }
        write_text(dcor_out, text);
    });

    // --- select -----------------------------------------------------------
    std::string sel_method = "rmh", sel_data, sel_out, sel_engine = "naive";
    double sel_r = 0.8, sel_s = 0.05;
    std::size_t sel_d = 3;
    auto* select = app.add_subcommand("select", "Run variable selection (mh or rmh)");
    select->add_option("--method", sel_method, "mh|rmh");
    select->add_option("--data", sel_data, "dataset CSV")->required();
    select->add_option("--r", sel_r, "redundancy threshold (rmh)");
    select->add_option("--s", sel_s, "relevance threshold (rmh)");
    select->add_option("--d", sel_d, "number of maxima (mh)");
    select->add_option("--engine", sel_engine, "dcor engine: naive|fast");
    select->add_option("--out", sel_out, "output JSON ('-' for stdout)");
    select->callback([&] {
        const auto data = rmh::load_dataset(sel_data);
        const auto engine = engine_from_name(sel_engine);
        rmh::SelectionResult result;
        if (sel_method == "rmh") {
            result = rmh::rmh_select(data, sel_r, sel_s, engine);
        } else if (sel_method == "mh") {
            result = rmh::maxima_hunting_select(data, sel_d, engine);
        } else {
            throw CLI::ValidationError("--method", "must be 'mh' or 'rmh'");
        }
        write_text(sel_out, result.to_json() + "\n");
        std::cerr << "selected " << result.times.size() << " points\n";
    });

    // --- classify ----------------------------------------------------------
    std::string cls_train, cls_test, cls_selection, cls_out;
    std::size_t cls_k = 0;
    std::uint64_t cls_seed = 0;
    auto* classify = app.add_subcommand(
        "classify", "kNN classification of a test CSV, optionally on selected points");
    classify->add_option("--train", cls_train, "training CSV")->required();
    classify->add_option("--test", cls_test, "test CSV")->required();
    classify->add_option("--selection", cls_selection,
                         "selection JSON from `select` (default: all points)");
    classify->add_option("--k", cls_k, "neighbor count (0 = choose by 10-fold CV)");
    classify->add_option("--seed", cls_seed, "CV seed");
    classify->add_option("--out", cls_out, "write per-row predictions CSV");
    classify->callback([&] {
        const auto train = rmh::load_dataset(cls_train);
        const auto test = rmh::load_dataset(cls_test);
        Eigen::MatrixXd train_X = train.values, test_X = test.values;
        if (!cls_selection.empty()) {
            std::ifstream in(cls_selection);
            if (!in) throw std::runtime_error("cannot open " + cls_selection);
            std::stringstream buf;
            buf << in.rdbuf();
            const auto sel = rmh::SelectionResult::from_json(buf.str());
            train_X = rmh::reduce_dataset(train, sel).first;
            test_X = rmh::reduce_dataset(test, sel).first;
        }
        std::size_t k = cls_k;
        if (k == 0) k = rmh::select_k_cv(train_X, train.labels, 10, cls_seed);
        const auto predicted = rmh::knn_classify(train_X, train.labels, test_X, k);
        std::cout << "k: " << k << "\n";
        std::cout << "test_error: " << rmh::error_rate(predicted, test.labels) << "\n";
        if (!cls_out.empty()) {
            std::string text = "row,predicted\n";
            for (std::size_t i = 0; i < predicted.size(); ++i) {
                text += std::to_string(i) + "," + std::to_string(predicted[i]) + "\n";
            }
            write_text(cls_out, text);
        }
    });

    // --- bench -------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "Benchmark protocols");
    bench->require_subcommand(1);

    BenchFlags syn_flags;
    auto* bench_syn = bench->add_subcommand(
        "synthetic", "Repeated train/test runs on a synthetic problem");
    bench_syn->add_option("--problem", syn_flags.problem,
                          "trend name: peak, peak2, square, sin, zero");
    bench_syn->add_option("--n-train", syn_flags.n_train, "training sizes")
        ->delimiter(',');
    bench_syn->add_option("--n-test", syn_flags.n_test, "test size");
    bench_syn->add_option("--grid-size", syn_flags.grid_size, "grid size");
    add_bench_flags(bench_syn, syn_flags);
    bench_syn->callback([&] {
        emit_experiment(rmh::run_synthetic(syn_flags.to_config()), syn_flags);
    });

    BenchFlags real_flags;
    auto* bench_real = bench->add_subcommand(
        "real", "Repeated stratified splits of an on-disk dataset");
    bench_real->add_option("--data", real_flags.dataset, "dataset CSV");
    bench_real
        ->add_option("--preprocess", real_flags.preprocess,
                     "steps: second_derivative, smooth:<bw>, truncate:<k>, "
                     "drop_zero_rows")
        ->delimiter(',');
    add_bench_flags(bench_real, real_flags);
    bench_real->callback([&] {
        emit_experiment(rmh::run_real(real_flags.to_config()), real_flags);
    });

    try {
        CLI11_PARSE(app, argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
