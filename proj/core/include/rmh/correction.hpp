#pragma once

#include <optional>

#include "rmh/dataset.hpp"

namespace rmh {

/// One node of the recursive search: the interval [t_inf, t_sup] currently
/// searched, plus the anchors where earlier corrections pinned the process
/// to zero. A node with only a left anchor models Brownian motion released
/// at the anchor; a node with both anchors models a Brownian bridge.
struct IntervalNode {
    double t_inf = 0.0;
    double t_sup = 1.0;
    double left_anchor = 0.0;
    std::optional<double> right_anchor;  // present iff the node is a bridge

    bool is_bridge() const { return right_anchor.has_value(); }

    /// Root node: the full grid span, pinned at t = 0 (Brownian motion).
    static IntervalNode root(const Grid& grid);

    void validate() const;
};

/// E[X(t) | X(t0) = x_t0] under the node's process model, in anchor-relative
/// coordinates. For the Brownian kind with u = t - L, u0 = t0 - L:
///     min(u, u0) / u0 * x_t0,
/// and for the bridge kind with u, u0 rescaled to [0, 1]:
///     (min(u, u0) - u u0) / (u0 (1 - u0)) * x_t0.
/// A conditioning point that coincides with an anchor is handled by the
/// continuity limit of the formula (a constant shift for Brownian nodes; a
/// linear ramp that keeps the opposite pin for bridges).
double conditional_expectation(const IntervalNode& node, double t0, double t,
                               double x_t0);

/// Subtracts E[X(t) | X(t0)] from every trajectory at every grid point
/// inside [t_inf, t_sup]; grid points outside the node are untouched.
/// t0 must be a grid point inside the node.
FunctionalDataset apply_correction(const FunctionalDataset& data,
                                   const IntervalNode& node, double t0);

/// In-place variant used by the recursive selector.
void apply_correction_in_place(Eigen::MatrixXd& values, const Grid& grid,
                               const IntervalNode& node, double t0);

}  // namespace rmh
