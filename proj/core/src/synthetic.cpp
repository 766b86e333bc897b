#include "rmh/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace rmh {

double phi_mk(int m, int k, double t) {
    if (m < 1 || k < 1 || k > (1 << (m - 1))) {
        throw std::invalid_argument("phi_mk: need m >= 1 and 1 <= k <= 2^(m-1)");
    }
    const double scale = std::ldexp(1.0, -m);  // 2^-m
    const double left = (2.0 * k - 2.0) * scale;
    const double mid = (2.0 * k - 1.0) * scale;
    const double right = (2.0 * k) * scale;
    if (t <= left || t >= right) return 0.0;
    const double slope = std::sqrt(std::ldexp(1.0, m - 1));  // sqrt(2^{m-1})
    return t <= mid ? slope * (t - left) : slope * (right - t);
}

double TrendSpec::operator()(double t) const {
    double v = 0.0;
    for (const auto& term : phi_terms) v += term.coeff * phi_mk(term.m, term.k, t);
    switch (kind) {
        case Kind::square:
            v += 2.0 * t * t;
            break;
        case Kind::sine:
            v += 0.5 * std::sin(2.0 * M_PI * t);
            break;
        default:
            break;
    }
    if (smooth) v += smooth(t);
    return v;
}

TrendSpec TrendSpec::peak() {
    TrendSpec s;
    s.kind = Kind::peak;
    s.phi_terms = {{3, 3, 2.0}};
    return s;
}

TrendSpec TrendSpec::peak2() {
    TrendSpec s;
    s.kind = Kind::peak2;
    s.phi_terms = {{3, 2, 2.0}, {3, 3, 3.0}, {2, 2, -2.0}};
    return s;
}

TrendSpec TrendSpec::square() {
    TrendSpec s;
    s.kind = Kind::square;
    return s;
}

TrendSpec TrendSpec::sine() {
    TrendSpec s;
    s.kind = Kind::sine;
    return s;
}

TrendSpec TrendSpec::zero() { return TrendSpec{}; }

TrendSpec TrendSpec::custom_phi(std::vector<PhiTerm> terms,
                                std::function<double(double)> smooth) {
    TrendSpec s;
    s.kind = Kind::custom;
    s.phi_terms = std::move(terms);
    s.smooth = std::move(smooth);
    for (const auto& term : s.phi_terms) phi_mk(term.m, term.k, 0.0);  // validate
    return s;
}

TrendSpec TrendSpec::by_name(const std::string& name) {
    if (name == "peak") return peak();
    if (name == "peak2") return peak2();
    if (name == "square") return square();
    if (name == "sin" || name == "sine") return sine();
    if (name == "zero") return zero();
    throw std::invalid_argument("unknown trend name: " + name);
}

Eigen::VectorXd brownian_sample(const Grid& grid, RandomEngine& rng) {
    const std::size_t p = grid.size();
    Eigen::VectorXd x(static_cast<Eigen::Index>(p));
    double prev_t = 0.0;  // anchored at X(0) = 0
    double value = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        const double gap = grid[j] - prev_t;
        if (gap > 0.0) value += std::sqrt(gap) * rng.normal();
        x[static_cast<Eigen::Index>(j)] = value;
        prev_t = grid[j];
    }
    return x;
}

Eigen::VectorXd brownian_sample(const Grid& grid, std::uint64_t seed) {
    RandomEngine rng(seed);
    return brownian_sample(grid, rng);
}

Eigen::VectorXd make_trend(const TrendSpec& trend, const Grid& grid) {
    Eigen::VectorXd m(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j) {
        m[static_cast<Eigen::Index>(j)] = trend(grid[j]);
    }
    return m;
}

FunctionalDataset generate_problem(const SyntheticProblem& problem, std::size_t n,
                                   std::uint64_t seed) {
    if (n % 2 != 0 || n == 0) {
        throw std::invalid_argument("generate_problem: n must be even and positive");
    }
    if (problem.class_balance != 0.5) {
        throw std::invalid_argument("generate_problem: class balance is fixed at 1/2");
    }
    RandomEngine rng(seed);
    const Eigen::VectorXd trend = make_trend(problem.trend, problem.grid);
    const std::size_t half = n / 2;

    Eigen::MatrixXd values(static_cast<Eigen::Index>(n),
                           static_cast<Eigen::Index>(problem.grid.size()));
    std::vector<int> labels(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd row = brownian_sample(problem.grid, rng);
        if (i >= half) {
            row += trend;
            labels[i] = 1;
        }
        values.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    Eigen::MatrixXd shuffled(values.rows(), values.cols());
    std::vector<int> shuffled_labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        shuffled.row(static_cast<Eigen::Index>(i)) =
            values.row(static_cast<Eigen::Index>(perm[i]));
        shuffled_labels[i] = labels[perm[i]];
    }
    return FunctionalDataset(problem.grid, std::move(shuffled),
                             std::move(shuffled_labels));
}

namespace {

/// <f, g>_H = int f'(s) g'(s) ds by forward differences over the grid
/// intervals, with an implicit leading interval [0, t_1] when the grid
/// starts after zero (f is taken to be f0 there at s = 0). Exact for
/// piecewise-linear inputs whose breakpoints lie on the grid.
double dirichlet_inner(std::span<const double> f, double f0, std::span<const double> g,
                       double g0, const std::vector<double>& t) {
    double acc = 0.0;
    if (t.front() > 0.0) {
        acc += (f[0] - f0) * (g[0] - g0) / t.front();
    }
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        acc += (f[i + 1] - f[i]) * (g[i + 1] - g[i]) / (t[i + 1] - t[i]);
    }
    return acc;
}

bool is_pure_phi(const TrendSpec& trend) {
    return !trend.smooth &&
           (trend.kind == TrendSpec::Kind::peak || trend.kind == TrendSpec::Kind::peak2 ||
            trend.kind == TrendSpec::Kind::custom);
}

bool distinct_indices(const std::vector<TrendSpec::PhiTerm>& terms) {
    std::set<std::pair<int, int>> seen;
    for (const auto& term : terms) {
        if (!seen.insert({term.m, term.k}).second) return false;
    }
    return true;
}

double normcdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double trend_derivative_norm_sq(const TrendSpec& trend) {
    if (is_pure_phi(trend) && distinct_indices(trend.phi_terms)) {
        // The phi derivatives are orthonormal in L2[0,1].
        double acc = 0.0;
        for (const auto& term : trend.phi_terms) acc += term.coeff * term.coeff;
        return acc;
    }
    // Quadrature on a dyadic grid: forward-difference slopes are exact for
    // the piecewise-linear phi parts as long as breakpoints land on grid.
    constexpr std::size_t intervals = std::size_t{1} << 15;
    const double h = 1.0 / static_cast<double>(intervals);
    double acc = 0.0;
    double prev = trend(0.0);
    for (std::size_t i = 1; i <= intervals; ++i) {
        const double cur = trend(static_cast<double>(i) * h);
        const double slope = (cur - prev) / h;
        acc += slope * slope * h;
        prev = cur;
    }
    return acc;
}

int bayes_rule_linear_trend(std::span<const double> x, const TrendSpec& trend,
                            const Grid& grid) {
    if (x.size() != grid.size()) {
        throw std::invalid_argument("bayes_rule_linear_trend: length mismatch");
    }
    std::vector<double> m(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) m[j] = trend(grid[j]);

    const double norm_sq = dirichlet_inner(m, trend(0.0), m, trend(0.0), grid.points());
    if (norm_sq <= 0.0) {
        throw std::invalid_argument("bayes_rule_linear_trend: no signal (||m|| = 0)");
    }
    const double score = dirichlet_inner(x, 0.0, m, trend(0.0), grid.points());
    return score > norm_sq / 2.0 ? 1 : 0;
}

double bayes_error(const TrendSpec& trend) {
    const double norm = std::sqrt(trend_derivative_norm_sq(trend));
    return 1.0 - normcdf(norm / 2.0);
}

}  // namespace rmh
