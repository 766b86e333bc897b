#pragma once

#include <cstdint>
#include <vector>

#include "rmh/rng.hpp"

namespace rmh {

/// Class-stratified fold assignment: within each class, shuffled members are
/// dealt round-robin, so fold sizes and class ratios differ by at most one.
/// Returns per-fold index lists; every index appears in exactly one fold.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels,
                                                       std::size_t n_folds,
                                                       RandomEngine& rng);

}  // namespace rmh
