#include "rmh/preprocess.hpp"

#include <cmath>
#include <stdexcept>

namespace rmh {

FunctionalDataset second_derivative(const FunctionalDataset& data) {
    const std::size_t p = data.p();
    if (p < 3) throw std::invalid_argument("second_derivative: grid too short");

    const auto& t = data.grid.points();
    Eigen::MatrixXd out(data.values.rows(), static_cast<Eigen::Index>(p - 2));
    for (std::size_t j = 1; j + 1 < p; ++j) {
        const double h1 = t[j] - t[j - 1];
        const double h2 = t[j + 1] - t[j];
        const double denom = h1 * h2 * (h1 + h2);
        const auto left = data.values.col(static_cast<Eigen::Index>(j - 1));
        const auto mid = data.values.col(static_cast<Eigen::Index>(j));
        const auto right = data.values.col(static_cast<Eigen::Index>(j + 1));
        out.col(static_cast<Eigen::Index>(j - 1)) =
            2.0 * (h2 * left - (h1 + h2) * mid + h1 * right) / denom;
    }
    std::vector<double> inner(t.begin() + 1, t.end() - 1);
    return FunctionalDataset(Grid(std::move(inner)), std::move(out), data.labels);
}

FunctionalDataset local_linear_smooth(const FunctionalDataset& data, double bandwidth) {
    if (!(bandwidth > 0.0)) {
        throw std::invalid_argument("local_linear_smooth: bandwidth must be > 0");
    }
    const auto& t = data.grid.points();
    const std::size_t p = data.p();
    const double sigma = bandwidth * (t.back() - t.front());
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);

    // Weighted least-squares line through (t_i - t0, y_i); the fitted value
    // at t0 is the intercept.
    Eigen::MatrixXd out(data.values.rows(), data.values.cols());
    std::vector<double> w(p), dt(p);
    for (std::size_t j = 0; j < p; ++j) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            dt[i] = t[i] - t[j];
            w[i] = std::exp(-dt[i] * dt[i] * inv_two_sigma_sq);
            s0 += w[i];
            s1 += w[i] * dt[i];
            s2 += w[i] * dt[i] * dt[i];
        }
        const double denom = s0 * s2 - s1 * s1;
        for (Eigen::Index row = 0; row < data.values.rows(); ++row) {
            double b0 = 0.0, b1 = 0.0;
            for (std::size_t i = 0; i < p; ++i) {
                const double y = data.values(row, static_cast<Eigen::Index>(i));
                b0 += w[i] * y;
                b1 += w[i] * dt[i] * y;
            }
            if (denom > 1e-300) {
                out(row, static_cast<Eigen::Index>(j)) = (s2 * b0 - s1 * b1) / denom;
            } else {
                // Kernel so narrow that only t_j itself carries weight.
                out(row, static_cast<Eigen::Index>(j)) =
                    data.values(row, static_cast<Eigen::Index>(j));
            }
        }
    }
    return FunctionalDataset(data.grid, std::move(out), data.labels);
}

}  // namespace rmh
