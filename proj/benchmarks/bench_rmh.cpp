#include <benchmark/benchmark.h>

#include "rmh/classifiers.hpp"
#include "rmh/distance_correlation.hpp"
#include "rmh/rng.hpp"
#include "rmh/selection.hpp"
#include "rmh/synthetic.hpp"

namespace {

std::vector<double> random_vector(std::size_t n, rmh::RandomEngine& rng) {
    std::vector<double> v(n);
    for (auto& e : v) e = rng.normal();
    return v;
}

void BM_dcov_naive(benchmark::State& state) {
    rmh::RandomEngine rng(1);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = random_vector(n, rng);
    const auto y = random_vector(n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rmh::dcov_sq(x, y, rmh::DcorEngine::naive));
    }
}
BENCHMARK(BM_dcov_naive)->Arg(100)->Arg(500)->Arg(2000);

void BM_dcov_fast(benchmark::State& state) {
    rmh::RandomEngine rng(1);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = random_vector(n, rng);
    const auto y = random_vector(n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rmh::dcov_sq(x, y, rmh::DcorEngine::fast));
    }
}
BENCHMARK(BM_dcov_fast)->Arg(100)->Arg(500)->Arg(2000)->Arg(10000);

void BM_relevance_curve(benchmark::State& state) {
    const rmh::Grid grid = rmh::Grid::uniform(200);
    const rmh::SyntheticProblem problem{rmh::TrendSpec::peak(), grid, 0.5};
    const auto data =
        rmh::generate_problem(problem, static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rmh::relevance_curve(data, rmh::DcorEngine::fast));
    }
}
BENCHMARK(BM_relevance_curve)->Arg(200)->Arg(1000);

void BM_rmh_select(benchmark::State& state) {
    const rmh::Grid grid = rmh::Grid::uniform(200);
    const rmh::SyntheticProblem problem{rmh::TrendSpec::peak(), grid, 0.5};
    const auto data =
        rmh::generate_problem(problem, static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rmh::rmh_select(data, 0.8, 0.05, rmh::DcorEngine::fast));
    }
}
BENCHMARK(BM_rmh_select)->Arg(200)->Arg(1000);

void BM_knn_classify(benchmark::State& state) {
    rmh::RandomEngine rng(4);
    const std::size_t n = 1000, d = 3;
    Eigen::MatrixXd train(n, d), test(200, d);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<int>(rng.below(2));
        for (std::size_t j = 0; j < d; ++j) {
            train(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rng.normal();
        }
    }
    for (Eigen::Index i = 0; i < test.rows(); ++i) {
        for (Eigen::Index j = 0; j < test.cols(); ++j) test(i, j) = rng.normal();
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(rmh::knn_classify(train, labels, test, 15));
    }
}
BENCHMARK(BM_knn_classify);

}  // namespace

BENCHMARK_MAIN();
