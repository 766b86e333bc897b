#pragma once

#include "rmh/dataset.hpp"

namespace rmh {

/// Central second differences on a possibly non-uniform grid (three-point
/// divided-difference formula, exact for quadratics). The output grid drops
/// both endpoints; labels are unchanged.
FunctionalDataset second_derivative(const FunctionalDataset& data);

/// Local linear regression smoother with a Gaussian kernel, evaluated on the
/// input grid. The kernel standard deviation is `bandwidth` times the domain
/// length. Reproduces linear trajectories exactly.
FunctionalDataset local_linear_smooth(const FunctionalDataset& data, double bandwidth);

}  // namespace rmh
