// Acceptance suite: every criterion prints one [PASS]/[FAIL] line with the
// measured quantities. Exit status is the number of failed criteria.
//
// By default criterion 5 runs its 20-repetition fast mode with the widened
// (+1 pp) tolerance; --full switches to the complete 200-repetition
// protocol. --criterion N runs a single criterion.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rmh/classifiers.hpp"
#include "rmh/correction.hpp"
#include "rmh/dataset.hpp"
#include "rmh/distance_correlation.hpp"
#include "rmh/experiment.hpp"
#include "rmh/preprocess.hpp"
#include "rmh/projection.hpp"
#include "rmh/rng.hpp"
#include "rmh/selection.hpp"
#include "rmh/synthetic.hpp"

using namespace rmh;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& label, bool pass,
            const std::string& detail) {
    std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", criterion,
                label.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Closed-form Bayes errors.
// ---------------------------------------------------------------------------
void criterion_1() {
    struct Case {
        const char* name;
        double expected;
    };
    const std::vector<Case> cases = {{"peak", 0.1587},
                                     {"peak2", 0.0196},
                                     {"square", 0.1241},
                                     {"sin", 0.1333}};
    bool pass = true;
    std::string detail;
    for (const auto& c : cases) {
        const double got = bayes_error(TrendSpec::by_name(c.name));
        if (std::abs(got - c.expected) > 0.005) pass = false;
        detail += fmt("%s=%.4f ", c.name, got);
    }
    report(1, "closed-form Bayes errors within 5e-3", pass, detail);
}

// ---------------------------------------------------------------------------
// 2. Monte-Carlo error of the optimal rule on fresh trajectories.
// ---------------------------------------------------------------------------
void criterion_2() {
    const std::vector<std::pair<const char*, double>> cases = {
        {"peak", 0.1587}, {"peak2", 0.0196}, {"square", 0.1241}, {"sin", 0.1333}};
    // Grid chosen so the dyadic trend breakpoints are representable.
    const Grid grid = Grid::uniform(201);
    bool pass = true;
    std::string detail;
    for (const auto& [name, expected] : cases) {
        const TrendSpec trend = TrendSpec::by_name(name);
        const SyntheticProblem problem{trend, grid, 0.5};
        const auto data = generate_problem(problem, 10000, 20250201);
        std::size_t wrong = 0;
        std::vector<double> x(data.p());
        for (std::size_t i = 0; i < data.n(); ++i) {
            for (std::size_t j = 0; j < data.p(); ++j) {
                x[j] = data.values(static_cast<Eigen::Index>(i),
                                   static_cast<Eigen::Index>(j));
            }
            if (bayes_rule_linear_trend(x, trend, grid) != data.labels[i]) ++wrong;
        }
        const double err = static_cast<double>(wrong) / static_cast<double>(data.n());
        if (std::abs(err - expected) > 0.01) pass = false;
        detail += fmt("%s=%.4f ", name, err);
    }
    report(2, "optimal-rule Monte-Carlo error within 1 pp of the Bayes level", pass,
           detail);
}

// ---------------------------------------------------------------------------
// 3. Fisher-LDA reproduction of the worked peak example.
// ---------------------------------------------------------------------------
double lda_mean_error(const Grid& grid, bool random_sides, std::uint64_t seed,
                      int reps, std::size_t keep_col_lo, std::size_t keep_col_hi) {
    RandomEngine rng(seed);
    const TrendSpec trend = TrendSpec::peak();
    double total = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        Grid g = grid;
        if (random_sides) {
            const double t1 = rng.uniform() * 0.625;
            const double t2 = 0.625 + rng.uniform_open() * 0.375;
            g = Grid({std::max(t1, 1e-9), 0.625, std::min(t2, 1.0)});
        }
        const SyntheticProblem problem{trend, g, 0.5};
        const auto train = generate_problem(problem, 1000, rng.raw());
        const auto test = generate_problem(problem, 1000, rng.raw());
        const Eigen::Index lo = static_cast<Eigen::Index>(keep_col_lo);
        const Eigen::Index width = static_cast<Eigen::Index>(keep_col_hi - keep_col_lo + 1);
        const auto model =
            fisher_lda_fit(train.values.middleCols(lo, width), train.labels);
        total += error_rate(model.predict(test.values.middleCols(lo, width)),
                            test.labels);
    }
    return total / reps;
}

void criterion_3() {
    const Grid three({0.5, 0.625, 0.75});
    const double err_all = lda_mean_error(three, false, 301, 100, 0, 2);
    const double err_max = lda_mean_error(three, false, 302, 100, 1, 1);
    const double err_rand = lda_mean_error(three, true, 303, 100, 0, 2);

    const bool pass = std::abs(err_all - 0.1598) <= 0.010 &&
                      std::abs(err_max - 0.3763) <= 0.015 &&
                      std::abs(err_rand - 0.2232) <= 0.030;
    report(3, "Fisher LDA on (1/2, 5/8, 3/4) / max-only / random sides", pass,
           fmt("all=%.4f (ref 0.1598) max=%.4f (ref 0.3763) random=%.4f (ref 0.2232)",
               err_all, err_max, err_rand));
}

// ---------------------------------------------------------------------------
// 4. RMH recovery of the peak variables.
// ---------------------------------------------------------------------------
void criterion_4() {
    const Grid grid = Grid::uniform(200);
    const double step = grid[1] - grid[0];
    const SyntheticProblem problem{TrendSpec::peak(), grid, 0.5};
    const std::vector<double> targets = {0.5, 0.625, 0.75};
    const int reps = 200;
    int exact = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const auto data =
            generate_problem(problem, 1000, derive_seed(40000, rep));
        const auto sel = rmh_select(data, 0.8, 0.05, DcorEngine::fast);
        if (sel.times.size() != 3) continue;
        std::vector<double> sorted = sel.times;
        std::sort(sorted.begin(), sorted.end());
        bool ok = true;
        for (int i = 0; i < 3; ++i) {
            if (std::abs(sorted[i] - targets[i]) > step + 1e-12) ok = false;
        }
        if (ok) ++exact;
    }
    const double rate = static_cast<double>(exact) / reps;
    report(4, "RMH selects exactly {1/2, 5/8, 3/4} (within one grid step)",
           rate >= 0.80, fmt("recovery rate %.3f over %d reps (need >= 0.80)", rate,
                             reps));
}

// ---------------------------------------------------------------------------
// 5. End-to-end near-Bayes benchmark.
// ---------------------------------------------------------------------------
void criterion_5(bool full) {
    struct Case {
        const char* name;
        double bayes;
        double margin;  // full-mode margin in error points
    };
    const std::vector<Case> cases = {{"peak", 0.1587, 0.02},
                                     {"square", 0.1241, 0.03},
                                     {"sin", 0.1333, 0.03}};
    const std::size_t reps = full ? 200 : 20;
    const double widen = full ? 0.0 : 0.01;
    bool pass = true;
    std::string detail = full ? "full mode: " : "fast mode (+1 pp): ";
    for (const auto& c : cases) {
        ExperimentConfig config;
        config.problem = c.name;
        config.n_train = {1000};
        config.n_test = 1000;
        config.grid_size = 200;
        config.methods = {Method::rmh};
        config.repetitions = reps;
        config.seed = 52025;
        config.threads = 2;
        config.policy.engine = DcorEngine::fast;
        const auto aggs = run_synthetic(config).aggregates();
        const double bound = c.bayes + c.margin + widen;
        if (aggs[0].mean_error > bound) pass = false;
        detail += fmt("%s=%.4f (bound %.4f) ", c.name, aggs[0].mean_error, bound);
    }
    report(5, "bench synthetic: RMH+kNN mean error near the Bayes level", pass,
           detail);
}

// ---------------------------------------------------------------------------
// 6. Estimator oracle equivalence.
// ---------------------------------------------------------------------------
double dcov_sq_textbook(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    auto centered = [n](const std::vector<double>& v) {
        std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
        std::vector<double> row_mean(n, 0.0);
        double grand = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                d[i][j] = std::abs(v[i] - v[j]);
                row_mean[i] += d[i][j];
            }
            grand += row_mean[i];
            row_mean[i] /= static_cast<double>(n);
        }
        grand /= static_cast<double>(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                d[i][j] += grand - row_mean[i] - row_mean[j];
            }
        }
        return d;
    };
    const auto a = centered(x);
    const auto b = centered(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) acc += a[i][j] * b[i][j];
    }
    return acc / static_cast<double>(n * n);
}

void criterion_6() {
    RandomEngine rng(606);
    auto sample = [&](std::size_t n) {
        std::vector<double> v(n);
        for (auto& e : v) e = rng.normal() * (1.0 + rng.uniform() * 2.0);
        return v;
    };

    double worst_naive = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(49);
        const auto x = sample(n);
        const auto y = sample(n);
        worst_naive = std::max(worst_naive,
                               std::abs(dcov_sq(x, y) - dcov_sq_textbook(x, y)));
        const double vxx = dcov_sq_textbook(x, x);
        const double vyy = dcov_sq_textbook(y, y);
        const double oracle_r =
            vxx * vyy > 0 ? dcov_sq_textbook(x, y) / std::sqrt(vxx * vyy) : 0.0;
        worst_naive = std::max(worst_naive, std::abs(dcor_sq(x, y) - oracle_r));
    }

    double worst_fast = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        // Log-uniform sizes up to 2000 keep the naive reference affordable.
        const std::size_t n = static_cast<std::size_t>(
            2.0 + std::exp(rng.uniform() * std::log(1999.0)));
        const auto x = sample(std::min<std::size_t>(n, 2000));
        const auto y = sample(x.size());
        worst_fast = std::max(worst_fast, std::abs(dcov_sq(x, y, DcorEngine::fast) -
                                                   dcov_sq(x, y, DcorEngine::naive)));
    }
    {
        const auto x = sample(2000);
        const auto y = sample(2000);
        worst_fast = std::max(worst_fast, std::abs(dcov_sq(x, y, DcorEngine::fast) -
                                                   dcov_sq(x, y, DcorEngine::naive)));
        worst_fast = std::max(worst_fast, std::abs(dcor_sq(x, y, DcorEngine::fast) -
                                                   dcor_sq(x, y, DcorEngine::naive)));
    }

    report(6, "dcov/dcor equal the independent oracle and the fast path",
           worst_naive <= 1e-12 && worst_fast <= 1e-9,
           fmt("max |naive - oracle| = %.2e (tol 1e-12), max |fast - naive| = %.2e "
               "(tol 1e-9)",
               worst_naive, worst_fast));
}

// ---------------------------------------------------------------------------
// 7. Correction invariants.
// ---------------------------------------------------------------------------
void criterion_7() {
    const Grid grid = Grid::uniform(51);
    const std::size_t reps = 10000;
    RandomEngine rng(707);
    Eigen::MatrixXd values(reps, grid.size());
    for (std::size_t i = 0; i < reps; ++i) {
        values.row(static_cast<Eigen::Index>(i)) =
            brownian_sample(grid, rng).transpose();
    }
    std::vector<int> labels(reps, 0);
    labels[0] = 1;
    const FunctionalDataset data(grid, values, labels);
    const double t0 = grid[30];
    const Eigen::VectorXd x0 = data.values.col(30);
    const auto corrected = apply_correction(data, IntervalNode::root(grid), t0);

    const double column_abs = corrected.values.col(30).cwiseAbs().maxCoeff();

    double worst_corr = 0.0;
    const double mean0 = x0.mean();
    const double sd0 = std::sqrt((x0.array() - mean0).square().sum() / (reps - 1));
    for (std::size_t j = 1; j < grid.size(); ++j) {
        const Eigen::VectorXd col = corrected.values.col(static_cast<Eigen::Index>(j));
        const double mean = col.mean();
        const double sd = std::sqrt((col.array() - mean).square().sum() / (reps - 1));
        if (sd < 1e-12) continue;
        const double corr = ((col.array() - mean) * (x0.array() - mean0)).sum() /
                            ((reps - 1) * sd * sd0);
        worst_corr = std::max(worst_corr, std::abs(corr));
    }
    report(7, "post-correction column zero; corrected values decorrelate from X(t0)",
           column_abs == 0.0 && worst_corr <= 0.03,
           fmt("max |column(t0)| = %.1e, max |corr| = %.4f over %zu samples",
               column_abs, worst_corr, reps));
}

// ---------------------------------------------------------------------------
// 8. Property suites.
// ---------------------------------------------------------------------------
void criterion_8() {
    bool pass = true;
    std::string detail;

    // Phi derivative orthonormality via finite differences of phi itself.
    {
        const std::vector<std::pair<int, int>> idx = {{1, 1}, {2, 1}, {2, 2}, {3, 2},
                                                      {3, 3}, {4, 5}, {5, 11}};
        double worst = 0.0;
        constexpr std::size_t intervals = 1 << 13;
        const double h = 1.0 / intervals;
        for (const auto& [m1, k1] : idx) {
            for (const auto& [m2, k2] : idx) {
                double acc = 0.0;
                for (std::size_t i = 0; i < intervals; ++i) {
                    const double a = static_cast<double>(i) * h;
                    const double b = a + h;
                    acc += ((phi_mk(m1, k1, b) - phi_mk(m1, k1, a)) / h) *
                           ((phi_mk(m2, k2, b) - phi_mk(m2, k2, a)) / h) * h;
                }
                const double expected = (m1 == m2 && k1 == k2) ? 1.0 : 0.0;
                worst = std::max(worst, std::abs(acc - expected));
            }
        }
        if (worst > 1e-6) pass = false;
        detail += fmt("phi orthonormality dev %.1e; ", worst);
    }

    // Affine invariance of dcor.
    {
        RandomEngine rng(808);
        double worst = 0.0;
        for (int trial = 0; trial < 300; ++trial) {
            const std::size_t n = 2 + rng.below(40);
            std::vector<double> x(n), y(n), xt(n);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = rng.normal();
                y[i] = rng.normal();
            }
            double a = 0.0;
            while (a == 0.0) a = rng.normal();
            const double b = rng.normal();
            for (std::size_t i = 0; i < n; ++i) xt[i] = a * x[i] + b;
            worst = std::max(worst, std::abs(dcor_sq(xt, y) - dcor_sq(x, y)));
        }
        if (worst > 1e-12) pass = false;
        detail += fmt("dcor affine dev %.1e; ", worst);
    }

    // RMH termination and postconditions on random small datasets.
    {
        RandomEngine rng(809);
        bool ok = true;
        for (int trial = 0; trial < 1000; ++trial) {
            const std::size_t n = 4 + rng.below(40);
            const std::size_t p = 3 + rng.below(25);
            Eigen::MatrixXd v(n, p);
            std::vector<int> labels(n);
            for (std::size_t i = 0; i < n; ++i) {
                labels[i] = static_cast<int>(rng.below(2));
                for (std::size_t j = 0; j < p; ++j) v(i, j) = rng.normal();
            }
            labels[0] = 0;
            labels[n - 1] = 1;
            const FunctionalDataset data(Grid::uniform(p), v, labels);
            const double r = 0.05 + 0.9 * rng.uniform();
            const double s = 0.01 + 0.5 * rng.uniform();
            const auto sel = rmh_select(data, r, s);
            std::set<double> unique(sel.times.begin(), sel.times.end());
            if (unique.size() != sel.times.size() || sel.times.size() > p) ok = false;
            for (double rel : sel.relevances) {
                if (!(rel > s)) ok = false;
            }
        }
        if (!ok) pass = false;
        detail += fmt("rmh postconditions on 1000 datasets %s; ", ok ? "ok" : "VIOLATED");
    }

    // No test leakage through any pipeline.
    {
        const SyntheticProblem problem{TrendSpec::peak(), Grid::uniform(25), 0.5};
        const auto train = generate_problem(problem, 80, 810);
        const auto test = generate_problem(problem, 60, 811);
        auto permuted = test;
        std::reverse(permuted.labels.begin(), permuted.labels.end());
        HyperPolicy policy;
        policy.c_max = 5;
        policy.engine = DcorEngine::fast;
        bool ok = true;
        for (auto method :
             {Method::base, Method::mh, Method::rmh, Method::pca, Method::pls}) {
            const auto a = run_method_pipeline(method, train, test, policy, 812);
            const auto b = run_method_pipeline(method, train, permuted, policy, 812);
            if (a.selected_times != b.selected_times || a.chosen_k != b.chosen_k ||
                a.chosen_c != b.chosen_c || a.chosen_s != b.chosen_s) {
                ok = false;
            }
        }
        if (!ok) pass = false;
        detail += fmt("test-leakage permutation check %s", ok ? "ok" : "VIOLATED");
    }

    report(8, "property suites (orthonormality, invariance, termination, no-leak)",
           pass, detail);
}

// ---------------------------------------------------------------------------
// 9. Full-pipeline smoke test standing in for the real-data figures.
// ---------------------------------------------------------------------------
void criterion_9() {
    const auto path =
        std::filesystem::temp_directory_path() / "rmh_acceptance_real.csv";
    const SyntheticProblem problem{TrendSpec::peak2(), Grid::uniform(30), 0.5};
    save_dataset(generate_problem(problem, 150, 901), path.string());

    ExperimentConfig config;
    config.dataset_path = path.string();
    config.preprocess = {"smooth:0.05", "second_derivative"};
    config.methods = {Method::rmh, Method::pca, Method::base};
    config.repetitions = 3;
    config.seed = 902;
    config.policy.c_max = 8;
    config.policy.engine = DcorEngine::fast;

    bool pass = true;
    std::string detail;
    try {
        const auto result = run_real(config);
        if (result.records.size() != 9) pass = false;  // methods x reps
        for (const auto& rec : result.records) {
            if (rec.n_vars < 1) pass = false;
            if ((rec.method == Method::pca || rec.method == Method::rmh) &&
                rec.n_vars > 30) {
                pass = false;
            }
        }
        const auto again = run_real(config);
        for (std::size_t i = 0; i < result.records.size(); ++i) {
            if (result.records[i].error != again.records[i].error ||
                result.records[i].n_vars != again.records[i].n_vars ||
                result.records[i].selected_times != again.records[i].selected_times) {
                pass = false;  // determinism modulo wall time
            }
        }
        const auto out_csv = path.string() + ".out.csv";
        const auto out_json = path.string() + ".out.json";
        emit_results(result, out_csv, ResultFormat::csv);
        emit_results(result, out_json, ResultFormat::json);
        std::ifstream check(out_csv);
        std::string header;
        std::getline(check, header);
        if (header != "method,n_train,repetition,error,n_vars,seconds,selected_times") {
            pass = false;
        }
        detail = fmt("records=%zu, determinism ok, schema ok", result.records.size());
        std::filesystem::remove(out_csv);
        std::filesystem::remove(out_json);
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    std::filesystem::remove(path);
    report(9, "full real-data pipeline smoke (record counts, caps, determinism)",
           pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
    bool full = false;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--full") == 0) full = true;
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[i + 1]);
        }
    }
    auto want = [&](int n) { return only == 0 || only == n; };

    if (want(1)) criterion_1();
    if (want(2)) criterion_2();
    if (want(3)) criterion_3();
    if (want(4)) criterion_4();
    if (want(5)) criterion_5(full);
    if (want(6)) criterion_6();
    if (want(7)) criterion_7();
    if (want(8)) criterion_8();
    if (want(9)) criterion_9();

    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
