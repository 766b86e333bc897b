#include "rmh/distance_correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rmh {

namespace {

/// V^2 from the raw plug-in sums:
///   V^2 = sum_ab/n^2 - 2 <row_a, row_b>/n^3 + total_a total_b/n^4.
double v_statistic(std::size_t n, double sum_ab, const std::vector<double>& row_a,
                   const std::vector<double>& row_b, double total_a, double total_b) {
    const double dn = static_cast<double>(n);
    const double t1 = sum_ab / (dn * dn);
    const double t2 =
        std::inner_product(row_a.begin(), row_a.end(), row_b.begin(), 0.0) /
        (dn * dn * dn);
    const double t3 = (total_a / (dn * dn)) * (total_b / (dn * dn));
    return t1 - 2.0 * t2 + t3;
}

/// Fenwick tree over y-ranks carrying the prefix aggregates needed for the
/// pairwise |dx||dy| sum: count, sum x, sum y, sum x*y.
class PairAggregator {
public:
    explicit PairAggregator(std::size_t size)
        : size_(size), data_(4 * (size + 1), 0.0) {}

    void add(std::size_t rank, double x, double y) {
        for (std::size_t i = rank + 1; i <= size_; i += i & (~i + 1)) {
            double* cell = &data_[4 * i];
            cell[0] += 1.0;
            cell[1] += x;
            cell[2] += y;
            cell[3] += x * y;
        }
    }

    struct Prefix {
        double count = 0.0, sum_x = 0.0, sum_y = 0.0, sum_xy = 0.0;
    };

    Prefix query(std::size_t rank) const {  // inclusive prefix [0, rank]
        Prefix p;
        for (std::size_t i = rank + 1; i > 0; i -= i & (~i + 1)) {
            const double* cell = &data_[4 * i];
            p.count += cell[0];
            p.sum_x += cell[1];
            p.sum_y += cell[2];
            p.sum_xy += cell[3];
        }
        return p;
    }

private:
    std::size_t size_;
    std::vector<double> data_;
};

/// sum_{i<j} |x_i - x_j| |y_i - y_j| in O(n log n). Points are swept in x
/// order; the already-seen points are split by y into <= and > sides, on
/// which |dx||dy| expands into products of running sums. Tied pairs
/// contribute zero, so tie placement is immaterial.
double abs_product_pair_sum(std::span<const double> x, std::span<const double> y,
                            const std::vector<std::size_t>& x_order,
                            const std::vector<std::size_t>& y_rank,
                            std::size_t distinct) {
    PairAggregator tree(distinct);
    double seen_count = 0.0, seen_x = 0.0, seen_y = 0.0, seen_xy = 0.0;
    double pair_sum = 0.0;
    for (std::size_t i : x_order) {
        const double xi = x[i], yi = y[i];
        const auto le = tree.query(y_rank[i]);
        const double gt_count = seen_count - le.count;
        const double gt_x = seen_x - le.sum_x;
        const double gt_y = seen_y - le.sum_y;
        const double gt_xy = seen_xy - le.sum_xy;
        // y_j <= y_i side: (x_i - x_j)(y_i - y_j)
        pair_sum += le.count * xi * yi - yi * le.sum_x - xi * le.sum_y + le.sum_xy;
        // y_j > y_i side: (x_i - x_j)(y_j - y_i)
        pair_sum += xi * gt_y - gt_count * xi * yi - gt_xy + yi * gt_x;
        tree.add(y_rank[i], xi, yi);
        seen_count += 1.0;
        seen_x += xi;
        seen_y += yi;
        seen_xy += xi * yi;
    }
    return pair_sum;
}

std::pair<std::vector<std::size_t>, std::size_t> dense_ranks(
    std::span<const double> y, const std::vector<std::size_t>& y_order) {
    std::vector<std::size_t> rank(y.size(), 0);
    std::size_t distinct = 0;
    for (std::size_t r = 0; r < y_order.size(); ++r) {
        if (r > 0 && y[y_order[r]] != y[y_order[r - 1]]) ++distinct;
        rank[y_order[r]] = distinct;
    }
    return {std::move(rank), distinct + 1};
}

void check_inputs(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("distance covariance: length mismatch");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("distance covariance: need n >= 2");
    }
}

double dcor_ratio(double vxy, double vxx, double vyy) {
    if (vxx <= 0.0 || vyy <= 0.0) return 0.0;
    return std::clamp(vxy / std::sqrt(vxx * vyy), 0.0, 1.0);
}

}  // namespace

namespace detail {

double DcovStats::v_ab() const {
    return v_statistic(n, sum_ab, row_a, row_b, total_a, total_b);
}
double DcovStats::v_aa() const {
    return v_statistic(n, sum_aa, row_a, row_a, total_a, total_a);
}
double DcovStats::v_bb() const {
    return v_statistic(n, sum_bb, row_b, row_b, total_b, total_b);
}

DcovStats dcov_stats_naive(std::span<const double> x, std::span<const double> y) {
    DcovStats st;
    st.n = x.size();
    st.row_a.assign(st.n, 0.0);
    st.row_b.assign(st.n, 0.0);
    for (std::size_t i = 0; i < st.n; ++i) {
        for (std::size_t j = i + 1; j < st.n; ++j) {
            const double a = std::abs(x[i] - x[j]);
            const double b = std::abs(y[i] - y[j]);
            st.row_a[i] += a;
            st.row_a[j] += a;
            st.row_b[i] += b;
            st.row_b[j] += b;
            st.sum_ab += 2.0 * a * b;
            st.sum_aa += 2.0 * a * a;
            st.sum_bb += 2.0 * b * b;
        }
    }
    st.total_a = std::accumulate(st.row_a.begin(), st.row_a.end(), 0.0);
    st.total_b = std::accumulate(st.row_b.begin(), st.row_b.end(), 0.0);
    return st;
}

MarginalStats marginal_stats_sorted(std::span<const double> x) {
    const std::size_t n = x.size();
    MarginalStats st;
    st.order.resize(n);
    std::iota(st.order.begin(), st.order.end(), std::size_t{0});
    std::sort(st.order.begin(), st.order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    st.row.assign(n, 0.0);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += x[i];
        sum_sq += x[i] * x[i];
    }
    double prefix = 0.0;
    double suffix = sum;
    for (std::size_t r = 0; r < n; ++r) {
        const double v = x[st.order[r]];
        suffix -= v;
        // sum_{j<r} (v - x_j) + sum_{j>r} (x_j - v) in sorted order
        st.row[st.order[r]] = (static_cast<double>(r) * v - prefix) +
                              (suffix - static_cast<double>(n - 1 - r) * v);
        prefix += v;
    }
    st.total = std::accumulate(st.row.begin(), st.row.end(), 0.0);
    // sum_ij (x_i - x_j)^2 = 2 (n sum x^2 - (sum x)^2)
    st.sum_sq = 2.0 * (static_cast<double>(n) * sum_sq - sum * sum);
    return st;
}

DcovStats dcov_stats_fast(std::span<const double> x, std::span<const double> y) {
    DcovStats st;
    st.n = x.size();

    auto mx = marginal_stats_sorted(x);
    auto my = marginal_stats_sorted(y);
    auto [y_rank, distinct] = dense_ranks(y, my.order);

    st.sum_ab = 2.0 * abs_product_pair_sum(x, y, mx.order, y_rank, distinct);
    st.sum_aa = mx.sum_sq;
    st.sum_bb = my.sum_sq;
    st.total_a = mx.total;
    st.total_b = my.total;
    st.row_a = std::move(mx.row);
    st.row_b = std::move(my.row);
    return st;
}

double clamp_nonnegative(double v) {
    if (v >= 0.0) return v;
    if (v >= -1e-12) return 0.0;
    throw std::runtime_error(
        "distance covariance: negative estimate beyond rounding tolerance");
}

}  // namespace detail

double dcov_sq(std::span<const double> x, std::span<const double> y, DcorEngine engine) {
    check_inputs(x, y);
    const auto st = engine == DcorEngine::fast ? detail::dcov_stats_fast(x, y)
                                               : detail::dcov_stats_naive(x, y);
    return detail::clamp_nonnegative(st.v_ab());
}

double dcor_sq(std::span<const double> x, std::span<const double> y, DcorEngine engine) {
    check_inputs(x, y);
    const auto st = engine == DcorEngine::fast ? detail::dcov_stats_fast(x, y)
                                               : detail::dcov_stats_naive(x, y);
    return dcor_ratio(detail::clamp_nonnegative(st.v_ab()),
                      detail::clamp_nonnegative(st.v_aa()),
                      detail::clamp_nonnegative(st.v_bb()));
}

LabelDcorCache::LabelDcorCache(const std::vector<int>& labels) {
    const std::size_t n = labels.size();
    if (n < 2) throw std::invalid_argument("LabelDcorCache: need n >= 2");
    y_.resize(n);
    for (std::size_t i = 0; i < n; ++i) y_[i] = static_cast<double>(labels[i]);

    auto my = detail::marginal_stats_sorted(y_);
    auto [rank, distinct] = dense_ranks(y_, my.order);
    y_rank_ = std::move(rank);
    distinct_ = distinct;
    row_b_ = std::move(my.row);
    total_b_ = my.total;
    sum_bb_ = my.sum_sq;
    v_bb_ = detail::clamp_nonnegative(
        v_statistic(n, sum_bb_, row_b_, row_b_, total_b_, total_b_));
}

double LabelDcorCache::dcor_sq_with(std::span<const double> x, DcorEngine engine) const {
    const std::size_t n = y_.size();
    if (x.size() != n) throw std::invalid_argument("LabelDcorCache: length mismatch");
    if (v_bb_ <= 0.0) return 0.0;  // constant labels

    double sum_ab = 0.0, sum_aa = 0.0;
    std::vector<double> row_a;
    if (engine == DcorEngine::fast) {
        auto mx = detail::marginal_stats_sorted(x);
        sum_ab = 2.0 * abs_product_pair_sum(x, y_, mx.order, y_rank_, distinct_);
        sum_aa = mx.sum_sq;
        row_a = std::move(mx.row);
    } else {
        row_a.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double a = std::abs(x[i] - x[j]);
                row_a[i] += a;
                row_a[j] += a;
                sum_aa += 2.0 * a * a;
                sum_ab += 2.0 * a * std::abs(y_[i] - y_[j]);
            }
        }
    }
    const double total_a = std::accumulate(row_a.begin(), row_a.end(), 0.0);
    const double vxy = detail::clamp_nonnegative(
        v_statistic(n, sum_ab, row_a, row_b_, total_a, total_b_));
    const double vxx = detail::clamp_nonnegative(
        v_statistic(n, sum_aa, row_a, row_a, total_a, total_a));
    return dcor_ratio(vxy, vxx, v_bb_);
}

RelevanceCurve relevance_curve(const FunctionalDataset& data, DcorEngine engine) {
    const std::size_t n = data.n();
    if (n < 2) throw std::invalid_argument("relevance_curve: need n >= 2");

    const LabelDcorCache cache(data.labels);
    RelevanceCurve curve{data.grid, std::vector<double>(data.p(), 0.0)};
    for (std::size_t j = 0; j < data.p(); ++j) {
        const auto col = data.values.col(static_cast<Eigen::Index>(j));
        curve.values[j] =
            cache.dcor_sq_with(std::span<const double>(col.data(), n), engine);
    }
    return curve;
}

}  // namespace rmh
