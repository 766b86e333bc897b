#pragma once

#include <span>
#include <vector>

#include "rmh/dataset.hpp"

namespace rmh {

/// Estimator backend for the univariate distance covariance.
///  - naive: O(n^2) plug-in sums, the reference path.
///  - fast:  O(n log n) sorting-based path, validated against naive.
enum class DcorEngine { naive, fast };

/// Squared distance covariance (plug-in V-statistic) of two univariate
/// samples. Non-negative; tiny negative rounding residue (>= -1e-12) is
/// clamped to zero, anything below that raises.
double dcov_sq(std::span<const double> x, std::span<const double> y,
               DcorEngine engine = DcorEngine::naive);

/// Squared distance correlation in [0, 1]. Returns 0 when either marginal
/// distance variance vanishes (constant sample).
double dcor_sq(std::span<const double> x, std::span<const double> y,
               DcorEngine engine = DcorEngine::naive);

/// Precomputed label-side quantities (distance row sums, totals, marginal
/// distance variance, sort ranks), shared across every column scan against
/// the same label vector.
class LabelDcorCache {
public:
    explicit LabelDcorCache(const std::vector<int>& labels);

    std::size_t n() const { return y_.size(); }
    const std::vector<double>& y() const { return y_; }

    /// dcor_sq(x, labels) reusing the cached label side.
    double dcor_sq_with(std::span<const double> x, DcorEngine engine) const;

private:
    std::vector<double> y_;
    std::vector<double> row_b_;
    double total_b_ = 0.0;
    double sum_bb_ = 0.0;
    double v_bb_ = 0.0;
    std::vector<std::size_t> y_rank_;  // dense ranks for the fast path
    std::size_t distinct_ = 0;
};

/// Squared distance correlation of each grid-point column with the label.
struct RelevanceCurve {
    Grid grid;
    std::vector<double> values;  // one entry per grid point, each in [0, 1]
};

RelevanceCurve relevance_curve(const FunctionalDataset& data,
                               DcorEngine engine = DcorEngine::naive);

namespace detail {

/// Accumulator for the plug-in estimator. With a_ij = |x_i - x_j| and
/// b_ij = |y_i - y_j|:
///   sum_ab = sum_ij a_ij b_ij, row_a[i] = sum_j a_ij, total_a = sum_ij a_ij,
/// and likewise for b and the squared terms. The V-statistic follows as
///   V^2 = sum_ab/n^2 - 2 <row_a, row_b>/n^3 + total_a total_b/n^4.
struct DcovStats {
    std::size_t n = 0;
    double sum_ab = 0.0;
    double sum_aa = 0.0;
    double sum_bb = 0.0;
    std::vector<double> row_a;
    std::vector<double> row_b;
    double total_a = 0.0;
    double total_b = 0.0;

    double v_ab() const;  // plug-in V^2(x, y), unclamped
    double v_aa() const;
    double v_bb() const;
};

DcovStats dcov_stats_naive(std::span<const double> x, std::span<const double> y);
DcovStats dcov_stats_fast(std::span<const double> x, std::span<const double> y);

/// Clamp rule shared by dcov_sq/dcor_sq: [-1e-12, 0) -> 0, below raises.
double clamp_nonnegative(double v);

/// Row sums of |x_i - x_j| plus sum of squared differences, via one sort.
struct MarginalStats {
    std::vector<double> row;
    double total = 0.0;
    double sum_sq = 0.0;
    std::vector<std::size_t> order;  // ascending positions
};
MarginalStats marginal_stats_sorted(std::span<const double> x);

}  // namespace detail

}  // namespace rmh
