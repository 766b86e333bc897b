#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rmh/dataset.hpp"
#include "rmh/rng.hpp"

namespace rmh {

/// Triangular bump whose derivative has unit L2 norm: zero outside
/// ((2k-2)/2^m, 2k/2^m), rising with slope sqrt(2^{m-1}) up to the midpoint
/// (2k-1)/2^m and falling back to zero. Requires m >= 1, 1 <= k <= 2^{m-1}.
double phi_mk(int m, int k, double t);

/// Deterministic class-1 trend. Named trends:
///   peak    2 phi_{3,3}
///   peak2   2 phi_{3,2} + 3 phi_{3,3} - 2 phi_{2,2}
///   square  2 t^2
///   sine    (1/2) sin(2 pi t)
/// Custom trends combine phi terms with an optional smooth component.
struct TrendSpec {
    enum class Kind { peak, peak2, square, sine, custom };

    struct PhiTerm {
        int m = 1;
        int k = 1;
        double coeff = 0.0;
    };

    Kind kind = Kind::custom;
    std::vector<PhiTerm> phi_terms;             // used by phi-based kinds
    std::function<double(double)> smooth;       // extra additive term (custom)

    double operator()(double t) const;

    static TrendSpec peak();
    static TrendSpec peak2();
    static TrendSpec square();
    static TrendSpec sine();
    static TrendSpec zero();  // custom with no terms
    static TrendSpec custom_phi(std::vector<PhiTerm> terms,
                                std::function<double(double)> smooth = nullptr);

    /// Parses one of the named trend identifiers ("peak", "peak2", "square",
    /// "sin", "zero").
    static TrendSpec by_name(const std::string& name);
};

/// Binary classification problem: class 0 is standard Brownian motion,
/// class 1 is Brownian motion plus the trend. Classes are balanced.
struct SyntheticProblem {
    TrendSpec trend;
    Grid grid;
    double class_balance = 0.5;  // fixed at 1/2
};

/// One Brownian trajectory on the grid, anchored at X(0) = 0 even when the
/// grid omits t = 0.
Eigen::VectorXd brownian_sample(const Grid& grid, RandomEngine& rng);
Eigen::VectorXd brownian_sample(const Grid& grid, std::uint64_t seed);

/// Trend evaluated on the grid.
Eigen::VectorXd make_trend(const TrendSpec& trend, const Grid& grid);

/// n/2 class-0 and n/2 class-1 trajectories, rows shuffled deterministically
/// by the seed. n must be even.
FunctionalDataset generate_problem(const SyntheticProblem& problem, std::size_t n,
                                   std::uint64_t seed);

/// Optimal rule for the Brownian-plus-trend problem: label 1 iff
/// <x, m>_H > ||m||_H^2 / 2, with the Dirichlet-space inner product
/// <x, m>_H = int x'(s) m'(s) ds evaluated by finite differences on the grid
/// (an implicit anchor at (0, 0) covers grids that omit t = 0).
int bayes_rule_linear_trend(std::span<const double> x, const TrendSpec& trend,
                            const Grid& grid);

/// Bayes error 1 - normcdf(||m'|| / 2). The derivative norm uses the closed
/// form for pure phi combinations and fine-grid quadrature otherwise.
/// A zero trend gives 1/2 (no signal).
double bayes_error(const TrendSpec& trend);

/// Squared L2[0,1] norm of the trend derivative.
double trend_derivative_norm_sq(const TrendSpec& trend);

}  // namespace rmh
