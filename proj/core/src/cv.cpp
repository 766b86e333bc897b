#include "rmh/cv.hpp"

#include <algorithm>
#include <stdexcept>

namespace rmh {

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels,
                                                       std::size_t n_folds,
                                                       RandomEngine& rng) {
    if (n_folds < 2) throw std::invalid_argument("stratified_folds: need >= 2 folds");
    if (labels.size() < n_folds) {
        throw std::invalid_argument("stratified_folds: fewer instances than folds");
    }
    std::vector<std::vector<std::size_t>> folds(n_folds);
    std::size_t deal = 0;
    for (int label : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) members.push_back(i);
        }
        rng.shuffle(members);
        for (std::size_t m : members) {
            folds[deal % n_folds].push_back(m);
            ++deal;
        }
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

}  // namespace rmh
