#include "rmh/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "rmh/cv.hpp"
#include "rmh/preprocess.hpp"
#include "rmh/projection.hpp"
#include "rmh/synthetic.hpp"

namespace rmh {

namespace {

using nlohmann::json;

constexpr std::uint64_t kKnnSeedStream = 11;
constexpr std::uint64_t kInnerCvSeedStream = 12;

FunctionalDataset subset_rows(const FunctionalDataset& data,
                              const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd v(static_cast<Eigen::Index>(idx.size()), data.values.cols());
    std::vector<int> y(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        v.row(static_cast<Eigen::Index>(i)) =
            data.values.row(static_cast<Eigen::Index>(idx[i]));
        y[i] = data.labels[idx[i]];
    }
    return FunctionalDataset(data.grid, std::move(v), std::move(y));
}

struct FoldViews {
    FunctionalDataset train;
    FunctionalDataset val;
};

FoldViews make_fold(const FunctionalDataset& data, const std::vector<std::size_t>& fold) {
    std::vector<char> in_fold(data.n(), 0);
    for (std::size_t i : fold) in_fold[i] = 1;
    std::vector<std::size_t> train_idx;
    train_idx.reserve(data.n() - fold.size());
    for (std::size_t i = 0; i < data.n(); ++i) {
        if (!in_fold[i]) train_idx.push_back(i);
    }
    return {subset_rows(data, train_idx), subset_rows(data, fold)};
}

std::size_t count_errors(const std::vector<int>& predicted,
                         const std::vector<int>& actual) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] != actual[i]) ++bad;
    }
    return bad;
}

/// Final classification step shared by every pipeline: k by stratified CV on
/// the training features, then kNN on the test features.
void classify_and_score(const Eigen::MatrixXd& train_X, const std::vector<int>& train_y,
                        const Eigen::MatrixXd& test_X, const std::vector<int>& test_y,
                        const HyperPolicy& policy, std::uint64_t knn_seed,
                        RepetitionRecord& record) {
    record.chosen_k = select_k_cv(train_X, train_y, policy.cv_folds, knn_seed);
    const auto predicted = knn_classify(train_X, train_y, test_X, record.chosen_k);
    record.error = error_rate(predicted, test_y);
}

SelectionResult rmh_with_fallback(const RmhSelectionTree& tree, double s) {
    SelectionResult sel = tree.select_at(s);
    if (sel.times.empty()) {
        // Nothing cleared the threshold: fall back to the global argmax of
        // the relevance curve so the classifier still gets one feature.
        sel.times.push_back(tree.root_time());
        sel.relevances.push_back(tree.root_relevance());
    }
    return sel;
}

double cv_select_s(const FunctionalDataset& train, const HyperPolicy& policy,
                   std::uint64_t seed) {
    std::vector<double> s_grid = policy.s_grid;
    std::sort(s_grid.begin(), s_grid.end());
    if (s_grid.empty()) throw std::invalid_argument("rmh pipeline: empty s grid");
    if (s_grid.size() == 1) return s_grid.front();

    RandomEngine rng(seed);
    const auto folds = stratified_folds(train.labels, policy.cv_folds, rng);
    const ClassifierHandle probe = make_knn_handle(policy.probe_k);

    std::vector<std::size_t> mistakes(s_grid.size(), 0);
    for (const auto& fold : folds) {
        const FoldViews views = make_fold(train, fold);
        const RmhSelectionTree tree =
            rmh_select_tree(views.train, policy.r, s_grid.front(), policy.engine);
        for (std::size_t si = 0; si < s_grid.size(); ++si) {
            const SelectionResult sel = rmh_with_fallback(tree, s_grid[si]);
            const auto [train_X, train_y] = reduce_dataset(views.train, sel);
            const auto [val_X, val_y] = reduce_dataset(views.val, sel);
            mistakes[si] += count_errors(probe(train_X, train_y, val_X), val_y);
        }
    }
    std::size_t best = 0;
    for (std::size_t si = 1; si < s_grid.size(); ++si) {
        if (mistakes[si] < mistakes[best]) best = si;  // ties keep the smaller s
    }
    return s_grid[best];
}

std::size_t cv_select_d(const FunctionalDataset& train, const HyperPolicy& policy,
                        std::uint64_t seed) {
    RandomEngine rng(seed);
    const auto folds = stratified_folds(train.labels, policy.cv_folds, rng);
    const ClassifierHandle probe = make_knn_handle(policy.probe_k);

    const std::size_t d_hi = std::min(policy.c_max, train.p());
    std::vector<std::size_t> mistakes(d_hi + 1, 0);
    for (const auto& fold : folds) {
        const FoldViews views = make_fold(train, fold);
        // The ranked maxima are nested in d, so one full selection serves
        // every candidate count.
        const SelectionResult ranked =
            maxima_hunting_select(views.train, d_hi, policy.engine);
        for (std::size_t d = 1; d <= d_hi; ++d) {
            SelectionResult prefix = ranked;
            const std::size_t use = std::min(d, ranked.times.size());
            prefix.times.resize(use);
            prefix.relevances.resize(use);
            const auto [train_X, train_y] = reduce_dataset(views.train, prefix);
            const auto [val_X, val_y] = reduce_dataset(views.val, prefix);
            mistakes[d] += count_errors(probe(train_X, train_y, val_X), val_y);
        }
    }
    std::size_t best = 1;
    for (std::size_t d = 2; d <= d_hi; ++d) {
        if (mistakes[d] < mistakes[best]) best = d;
    }
    return best;
}

}  // namespace

std::string method_name(Method method) {
    switch (method) {
        case Method::base: return "base";
        case Method::mh: return "mh";
        case Method::rmh: return "rmh";
        case Method::pca: return "pca";
        case Method::pls: return "pls";
    }
    throw std::logic_error("method_name: unreachable");
}

Method method_from_name(const std::string& name) {
    if (name == "base") return Method::base;
    if (name == "mh") return Method::mh;
    if (name == "rmh") return Method::rmh;
    if (name == "pca") return Method::pca;
    if (name == "pls") return Method::pls;
    throw std::invalid_argument("unknown method: " + name);
}

RepetitionRecord run_method_pipeline(Method method, const FunctionalDataset& train,
                                     const FunctionalDataset& test,
                                     const HyperPolicy& policy, std::uint64_t seed) {
    const auto started = std::chrono::steady_clock::now();
    const std::uint64_t knn_seed = derive_seed(seed, kKnnSeedStream);
    const std::uint64_t inner_seed = derive_seed(seed, kInnerCvSeedStream);

    RepetitionRecord record;
    record.method = method;
    record.n_train = train.n();

    switch (method) {
        case Method::base: {
            record.n_vars = train.p();
            classify_and_score(train.values, train.labels, test.values, test.labels,
                               policy, knn_seed, record);
            break;
        }
        case Method::mh: {
            record.chosen_c = cv_select_d(train, policy, inner_seed);
            const SelectionResult sel =
                maxima_hunting_select(train, record.chosen_c, policy.engine);
            record.selected_times = sel.times;
            record.n_vars = sel.times.size();
            const auto [train_X, train_y] = reduce_dataset(train, sel);
            const auto [test_X, test_y] = reduce_dataset(test, sel);
            classify_and_score(train_X, train_y, test_X, test_y, policy, knn_seed,
                               record);
            break;
        }
        case Method::rmh: {
            record.chosen_s = cv_select_s(train, policy, inner_seed);
            const RmhSelectionTree tree =
                rmh_select_tree(train, policy.r, record.chosen_s, policy.engine);
            const SelectionResult sel = rmh_with_fallback(tree, record.chosen_s);
            record.selected_times = sel.times;
            record.n_vars = sel.times.size();
            const auto [train_X, train_y] = reduce_dataset(train, sel);
            const auto [test_X, test_y] = reduce_dataset(test, sel);
            classify_and_score(train_X, train_y, test_X, test_y, policy, knn_seed,
                               record);
            break;
        }
        case Method::pca:
        case Method::pls: {
            const auto kind = method == Method::pca ? ProjectionModel::Kind::pca
                                                    : ProjectionModel::Kind::pls;
            record.chosen_c =
                select_components_cv(train, kind, policy.cv_folds, policy.c_max,
                                     make_knn_handle(policy.probe_k), inner_seed);
            const ProjectionModel model = kind == ProjectionModel::Kind::pca
                                              ? pca_fit(train, record.chosen_c)
                                              : pls_fit(train, record.chosen_c);
            record.n_vars = model.components();
            classify_and_score(model.transform(train.values), train.labels,
                               model.transform(test.values), test.labels, policy,
                               knn_seed, record);
            break;
        }
    }

    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    return record;
}

namespace {

/// Runs `tasks` indices through `work` on the requested number of threads;
/// each task writes to its own output slot, so results are schedule
/// independent.
void parallel_tasks(std::size_t count, std::size_t threads,
                    const std::function<void(std::size_t)>& work) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min(threads, count == 0 ? 1 : count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto runner = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                work(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(runner);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

void validate_common(const ExperimentConfig& config) {
    if (config.methods.empty()) {
        throw std::invalid_argument("experiment: method list is empty");
    }
    if (config.repetitions < 1) {
        throw std::invalid_argument("experiment: repetitions must be >= 1");
    }
}

}  // namespace

ExperimentResult run_synthetic(const ExperimentConfig& config) {
    validate_common(config);
    if (config.n_train.empty()) {
        throw std::invalid_argument("run_synthetic: n_train list is empty");
    }
    const TrendSpec trend = TrendSpec::by_name(config.problem);
    const Grid grid = Grid::uniform(config.grid_size);
    const SyntheticProblem problem{trend, grid, 0.5};

    const std::size_t n_methods = config.methods.size();
    const std::size_t n_sizes = config.n_train.size();
    const std::size_t tasks = n_sizes * config.repetitions;

    ExperimentResult result;
    result.records.resize(tasks * n_methods);

    parallel_tasks(tasks, config.threads, [&](std::size_t task) {
        const std::size_t size_idx = task / config.repetitions;
        const std::size_t rep = task % config.repetitions;
        const std::size_t n = config.n_train[size_idx];

        const std::uint64_t rep_seed = derive_seed(config.seed, rep);
        const FunctionalDataset train =
            generate_problem(problem, n, derive_seed(rep_seed, 1000 + size_idx));
        const FunctionalDataset test = generate_problem(
            problem, config.n_test, derive_seed(rep_seed, 2000 + size_idx));

        for (std::size_t mi = 0; mi < n_methods; ++mi) {
            RepetitionRecord record = run_method_pipeline(
                config.methods[mi], train, test, config.policy,
                derive_seed(rep_seed, 3000 + size_idx * 64 + mi));
            record.repetition = rep;
            result.records[task * n_methods + mi] = std::move(record);
        }
    });
    return result;
}

ExperimentResult run_real(const ExperimentConfig& config) {
    validate_common(config);
    if (config.dataset_path.empty()) {
        throw std::invalid_argument("run_real: dataset_path is empty");
    }
    const bool drop_zeros =
        std::find(config.preprocess.begin(), config.preprocess.end(),
                  "drop_zero_rows") != config.preprocess.end();
    FunctionalDataset data = load_dataset(config.dataset_path, {}, drop_zeros);
    std::vector<std::string> steps;
    for (const auto& step : config.preprocess) {
        if (step != "drop_zero_rows") steps.push_back(step);
    }
    data = apply_preprocess_chain(std::move(data), steps);
    if (!data.both_classes_present()) {
        throw std::runtime_error("run_real: a class vanished after preprocessing");
    }

    const std::size_t n_methods = config.methods.size();
    ExperimentResult result;
    result.records.resize(config.repetitions * n_methods);

    parallel_tasks(config.repetitions, config.threads, [&](std::size_t rep) {
        const std::uint64_t rep_seed = derive_seed(config.seed, rep);
        const SplitPair split =
            stratified_split(data, config.train_fraction, derive_seed(rep_seed, 1));
        for (std::size_t mi = 0; mi < n_methods; ++mi) {
            RepetitionRecord record =
                run_method_pipeline(config.methods[mi], split.train, split.test,
                                    config.policy, derive_seed(rep_seed, 3000 + mi));
            record.repetition = rep;
            result.records[rep * n_methods + mi] = std::move(record);
        }
    });
    return result;
}

FunctionalDataset apply_preprocess_chain(FunctionalDataset data,
                                         const std::vector<std::string>& steps) {
    for (const auto& step : steps) {
        if (step == "second_derivative") {
            data = second_derivative(data);
        } else if (step.rfind("smooth:", 0) == 0) {
            data = local_linear_smooth(data, std::stod(step.substr(7)));
        } else if (step.rfind("truncate:", 0) == 0) {
            data = truncate_columns(data, std::stoul(step.substr(9)));
        } else {
            throw std::invalid_argument("unknown preprocessing step: " + step);
        }
    }
    return data;
}

std::vector<AggregateRecord> ExperimentResult::aggregates() const {
    std::vector<AggregateRecord> out;
    auto find_group = [&](Method method, std::size_t n_train) -> AggregateRecord& {
        for (auto& g : out) {
            if (g.method == method && g.n_train == n_train) return g;
        }
        out.push_back(AggregateRecord{method, n_train, 0, 0.0, 0.0, 0.0});
        return out.back();
    };
    for (const auto& rec : records) {
        AggregateRecord& g = find_group(rec.method, rec.n_train);
        g.repetitions += 1;
        g.mean_error += rec.error;
        g.mean_n_vars += static_cast<double>(rec.n_vars);
    }
    for (auto& g : out) {
        g.mean_error /= static_cast<double>(g.repetitions);
        g.mean_n_vars /= static_cast<double>(g.repetitions);
    }
    for (const auto& rec : records) {
        AggregateRecord& g = find_group(rec.method, rec.n_train);
        const double d = rec.error - g.mean_error;
        g.std_error += d * d;
    }
    for (auto& g : out) {
        g.std_error = g.repetitions > 1
                          ? std::sqrt(g.std_error / static_cast<double>(g.repetitions - 1))
                          : 0.0;
    }
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_times(const std::vector<double>& times) {
    std::string out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0) out += ';';
        out += format_double(times[i]);
    }
    return out;
}

}  // namespace

std::string render_results_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "method,n_train,repetition,error,n_vars,seconds,selected_times\n";
    for (const auto& rec : result.records) {
        out << method_name(rec.method) << ',' << rec.n_train << ',' << rec.repetition
            << ',' << format_double(rec.error) << ',' << rec.n_vars << ','
            << format_double(rec.seconds) << ',' << join_times(rec.selected_times)
            << '\n';
    }
    return out.str();
}

std::string render_results_json(const ExperimentResult& result) {
    json j;
    j["records"] = json::array();
    for (const auto& rec : result.records) {
        json r;
        r["method"] = method_name(rec.method);
        r["n_train"] = rec.n_train;
        r["repetition"] = rec.repetition;
        r["error"] = rec.error;
        r["n_vars"] = rec.n_vars;
        r["seconds"] = rec.seconds;
        r["selected_times"] = rec.selected_times;
        j["records"].push_back(std::move(r));
    }
    j["aggregates"] = json::array();
    for (const auto& agg : result.aggregates()) {
        json a;
        a["method"] = method_name(agg.method);
        a["n_train"] = agg.n_train;
        a["repetitions"] = agg.repetitions;
        a["mean_error"] = agg.mean_error;
        a["std_error"] = agg.std_error;
        a["mean_n_vars"] = agg.mean_n_vars;
        j["aggregates"].push_back(std::move(a));
    }
    return j.dump(2);
}

void emit_results(const ExperimentResult& result, const std::string& path,
                  ResultFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_results: cannot open " + path);
    out << (format == ResultFormat::csv ? render_results_csv(result)
                                        : render_results_json(result));
    if (!out) throw std::runtime_error("emit_results: write failed: " + path);
}

namespace {

std::vector<Method> parse_methods(const json& j) {
    std::vector<Method> methods;
    for (const auto& name : j) methods.push_back(method_from_name(name));
    return methods;
}

DcorEngine parse_engine(const std::string& name) {
    if (name == "naive") return DcorEngine::naive;
    if (name == "fast") return DcorEngine::fast;
    throw std::invalid_argument("unknown dcor engine: " + name);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig config;
    if (j.contains("problem")) config.problem = j["problem"].get<std::string>();
    if (j.contains("n_train")) {
        config.n_train.clear();
        if (j["n_train"].is_array()) {
            for (const auto& v : j["n_train"]) {
                config.n_train.push_back(v.get<std::size_t>());
            }
        } else {
            config.n_train.push_back(j["n_train"].get<std::size_t>());
        }
    }
    if (j.contains("n_test")) config.n_test = j["n_test"].get<std::size_t>();
    if (j.contains("grid_size")) config.grid_size = j["grid_size"].get<std::size_t>();
    if (j.contains("dataset")) config.dataset_path = j["dataset"].get<std::string>();
    if (j.contains("preprocess")) {
        config.preprocess = j["preprocess"].get<std::vector<std::string>>();
    }
    if (j.contains("train_fraction")) {
        config.train_fraction = j["train_fraction"].get<double>();
    }
    if (j.contains("methods")) config.methods = parse_methods(j["methods"]);
    if (j.contains("repetitions")) {
        config.repetitions = j["repetitions"].get<std::size_t>();
    }
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) config.threads = j["threads"].get<std::size_t>();
    if (j.contains("r")) config.policy.r = j["r"].get<double>();
    if (j.contains("s_grid")) {
        config.policy.s_grid = j["s_grid"].get<std::vector<double>>();
    }
    if (j.contains("c_max")) config.policy.c_max = j["c_max"].get<std::size_t>();
    if (j.contains("folds")) config.policy.cv_folds = j["folds"].get<std::size_t>();
    if (j.contains("probe_k")) config.policy.probe_k = j["probe_k"].get<std::size_t>();
    if (j.contains("engine")) {
        config.policy.engine = parse_engine(j["engine"].get<std::string>());
    }
    return config;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

}  // namespace rmh
