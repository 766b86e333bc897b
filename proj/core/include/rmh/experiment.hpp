#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmh/classifiers.hpp"
#include "rmh/dataset.hpp"
#include "rmh/distance_correlation.hpp"
#include "rmh/selection.hpp"

namespace rmh {

enum class Method { base, mh, rmh, pca, pls };

std::string method_name(Method method);
Method method_from_name(const std::string& name);

/// Hyperparameter policies for the benchmark pipelines. Defaults: fixed
/// redundancy threshold r = 0.8; relevance threshold s cross-validated over
/// {0.025, 0.05, 0.1}; at most 30 selected variables / components for the
/// non-recursive methods; k for the final kNN from [1, floor(sqrt(N))] by
/// 10-fold CV. The probe classifier scores candidate dimensionalities inside
/// the inner CV loops.
struct HyperPolicy {
    double r = 0.8;
    std::vector<double> s_grid = {0.025, 0.05, 0.1};
    std::size_t c_max = 30;
    std::size_t cv_folds = 10;
    std::size_t probe_k = 5;
    DcorEngine engine = DcorEngine::fast;
};

/// Declarative benchmark description. A non-empty dataset_path selects the
/// real-data protocol (repeated stratified splits of the file); otherwise
/// `problem` names a synthetic generator.
struct ExperimentConfig {
    std::string problem = "peak";
    std::vector<std::size_t> n_train = {50, 100, 200, 500, 1000};
    std::size_t n_test = 1000;
    std::size_t grid_size = 200;

    std::string dataset_path;
    std::vector<std::string> preprocess;  // see apply_preprocess_chain
    double train_fraction = 2.0 / 3.0;

    std::vector<Method> methods = {Method::rmh};
    std::size_t repetitions = 200;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    HyperPolicy policy;

    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
};

struct RepetitionRecord {
    Method method = Method::base;
    std::size_t n_train = 0;
    std::size_t repetition = 0;
    double error = 0.0;
    std::size_t n_vars = 0;
    std::vector<double> selected_times;  // mh/rmh only
    double seconds = 0.0;

    // Hyperparameters fixed inside the training data; recorded so leakage
    // checks can verify they never react to test labels.
    std::size_t chosen_k = 0;
    std::size_t chosen_c = 0;  // components (pca/pls) or variable count d (mh)
    double chosen_s = 0.0;     // rmh only
};

struct AggregateRecord {
    Method method = Method::base;
    std::size_t n_train = 0;
    std::size_t repetitions = 0;
    double mean_error = 0.0;
    double std_error = 0.0;
    double mean_n_vars = 0.0;
};

struct ExperimentResult {
    std::vector<RepetitionRecord> records;
    std::vector<AggregateRecord> aggregates() const;
};

enum class ResultFormat { csv, json };

/// Synthetic protocol: per repetition, fresh train/test sets from derived
/// seeds, every method fitted on the training set only.
ExperimentResult run_synthetic(const ExperimentConfig& config);

/// Real-data protocol: load once, apply the fit-free preprocessing chain,
/// then repeat stratified train/test splits.
ExperimentResult run_real(const ExperimentConfig& config);

/// Long-format CSV (columns method,n_train,repetition,error,n_vars,seconds,
/// selected_times) or JSON with an `aggregates` block.
void emit_results(const ExperimentResult& result, const std::string& path,
                  ResultFormat format);
std::string render_results_csv(const ExperimentResult& result);
std::string render_results_json(const ExperimentResult& result);

/// One method applied to one train/test pair, CV confined to the training
/// data. Exposed so tests can drive the pipeline directly.
RepetitionRecord run_method_pipeline(Method method, const FunctionalDataset& train,
                                     const FunctionalDataset& test,
                                     const HyperPolicy& policy, std::uint64_t seed);

/// Applies preprocessing steps in order. Supported: "second_derivative",
/// "smooth:<bandwidth>", "truncate:<keep>". ("drop_zero_rows" acts at load
/// time and is handled by run_real.)
FunctionalDataset apply_preprocess_chain(FunctionalDataset data,
                                         const std::vector<std::string>& steps);

}  // namespace rmh
