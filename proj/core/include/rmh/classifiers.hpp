#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace rmh {

/// Fit-and-predict in one call; used to plug a downstream classifier into
/// cross-validation loops.
using ClassifierHandle = std::function<std::vector<int>(
    const Eigen::MatrixXd& train_X, const std::vector<int>& train_y,
    const Eigen::MatrixXd& test_X)>;

/// k-nearest-neighbor vote with Euclidean distance. Distance ties are broken
/// by the lower training index; an even vote falls back to the label of the
/// single nearest neighbor.
std::vector<int> knn_classify(const Eigen::MatrixXd& train_X,
                              const std::vector<int>& train_y,
                              const Eigen::MatrixXd& test_X, std::size_t k);

/// k minimizing the mean stratified 10-fold CV error over the integer range
/// [1, floor(sqrt(N_train))]; ties go to the smallest k.
std::size_t select_k_cv(const Eigen::MatrixXd& train_X, const std::vector<int>& train_y,
                        std::size_t folds, std::uint64_t seed);

struct KnnClassifier {
    Eigen::MatrixXd train_X;
    std::vector<int> train_y;
    std::size_t k = 1;

    std::vector<int> predict(const Eigen::MatrixXd& test_X) const {
        return knn_classify(train_X, train_y, test_X, k);
    }
};

/// Fisher linear discriminant: weights = (pooled covariance + eps I)^-1
/// (mean_1 - mean_0), threshold at the projected midpoint of the class
/// means.
struct LdaClassifier {
    Eigen::VectorXd weights;
    double threshold = 0.0;

    std::vector<int> predict(const Eigen::MatrixXd& test_X) const;
};

LdaClassifier fisher_lda_fit(const Eigen::MatrixXd& train_X,
                             const std::vector<int>& train_y, double ridge = 1e-8);

inline std::vector<int> fisher_lda_predict(const LdaClassifier& model,
                                           const Eigen::MatrixXd& test_X) {
    return model.predict(test_X);
}

/// Fraction of mismatching labels.
double error_rate(const std::vector<int>& predicted, const std::vector<int>& actual);

/// ClassifierHandle wrapping kNN at a fixed k (capped at the training size).
ClassifierHandle make_knn_handle(std::size_t k);

}  // namespace rmh
