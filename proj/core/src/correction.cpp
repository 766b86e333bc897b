#include "rmh/correction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmh {

IntervalNode IntervalNode::root(const Grid& grid) {
    IntervalNode node;
    node.t_inf = grid.front();
    node.t_sup = grid.back();
    node.left_anchor = 0.0;
    return node;
}

void IntervalNode::validate() const {
    if (!(left_anchor <= t_inf && t_inf <= t_sup)) {
        throw std::invalid_argument("IntervalNode: need left_anchor <= t_inf <= t_sup");
    }
    if (right_anchor) {
        if (!(t_sup <= *right_anchor && left_anchor < *right_anchor)) {
            throw std::invalid_argument(
                "IntervalNode: bridge needs t_sup <= right_anchor and "
                "left_anchor < right_anchor");
        }
    }
}

double conditional_expectation(const IntervalNode& node, double t0, double t,
                               double x_t0) {
    if (t == t0) return x_t0;  // conditioning point, exact

    const double left = node.left_anchor;
    if (node.is_bridge()) {
        const double span = *node.right_anchor - left;
        const double u = (t - left) / span;
        const double u0 = (t0 - left) / span;
        if (u0 <= 0.0) return (1.0 - u) * x_t0;  // pinned at left anchor
        if (u0 >= 1.0) return u * x_t0;          // pinned at right anchor
        return (std::min(u, u0) - u * u0) / (u0 * (1.0 - u0)) * x_t0;
    }
    const double u = t - left;
    const double u0 = t0 - left;
    if (u0 <= 0.0) {
        // Conditioning at the pin: the information is a constant shift for
        // everything to the right.
        return t >= t0 ? x_t0 : 0.0;
    }
    return std::min(u, u0) / u0 * x_t0;
}

void apply_correction_in_place(Eigen::MatrixXd& values, const Grid& grid,
                               const IntervalNode& node, double t0) {
    node.validate();
    const auto j0 = grid.index_of(t0);
    if (!j0) throw std::invalid_argument("apply_correction: t0 is not a grid point");
    if (t0 < node.t_inf || t0 > node.t_sup) {
        throw std::invalid_argument("apply_correction: t0 outside the node interval");
    }

    const Eigen::VectorXd x0 = values.col(static_cast<Eigen::Index>(*j0));
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid[j];
        if (t < node.t_inf || t > node.t_sup) continue;
        const double factor = conditional_expectation(node, t0, t, 1.0);
        values.col(static_cast<Eigen::Index>(j)) -= factor * x0;
    }
}

FunctionalDataset apply_correction(const FunctionalDataset& data,
                                   const IntervalNode& node, double t0) {
    Eigen::MatrixXd values = data.values;
    apply_correction_in_place(values, data.grid, node, t0);
    return FunctionalDataset(data.grid, std::move(values), data.labels);
}

}  // namespace rmh
