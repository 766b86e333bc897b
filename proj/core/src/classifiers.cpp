#include "rmh/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rmh/cv.hpp"

namespace rmh {

namespace {

void check_knn_inputs(const Eigen::MatrixXd& train_X, const std::vector<int>& train_y,
                      const Eigen::MatrixXd& test_X, std::size_t k) {
    if (train_X.rows() == 0 || train_X.cols() < 1) {
        throw std::invalid_argument("knn: empty training data");
    }
    if (static_cast<std::size_t>(train_X.rows()) != train_y.size()) {
        throw std::invalid_argument("knn: label count mismatch");
    }
    if (train_X.cols() != test_X.cols()) {
        throw std::invalid_argument("knn: feature dimension mismatch");
    }
    if (k < 1 || k > static_cast<std::size_t>(train_X.rows())) {
        throw std::invalid_argument("knn: k must lie in [1, N_train]");
    }
}

/// Training indices sorted by (squared distance, index) to one query row.
std::vector<std::size_t> neighbor_order(const Eigen::MatrixXd& train_X,
                                        const Eigen::RowVectorXd& query) {
    const std::size_t n = static_cast<std::size_t>(train_X.rows());
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        dist[i] = (train_X.row(static_cast<Eigen::Index>(i)) - query).squaredNorm();
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return a < b;
    });
    return order;
}

int vote_prefix(const std::vector<std::size_t>& order, const std::vector<int>& train_y,
                std::size_t k) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < k; ++i) ones += static_cast<std::size_t>(train_y[order[i]]);
    const std::size_t zeros = k - ones;
    if (ones > zeros) return 1;
    if (zeros > ones) return 0;
    return train_y[order[0]];  // vote tie: defer to the nearest neighbor
}

std::size_t integer_sqrt(std::size_t n) {
    std::size_t r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

}  // namespace

std::vector<int> knn_classify(const Eigen::MatrixXd& train_X,
                              const std::vector<int>& train_y,
                              const Eigen::MatrixXd& test_X, std::size_t k) {
    check_knn_inputs(train_X, train_y, test_X, k);
    std::vector<int> predictions(static_cast<std::size_t>(test_X.rows()));
    for (Eigen::Index row = 0; row < test_X.rows(); ++row) {
        const auto order = neighbor_order(train_X, test_X.row(row));
        predictions[static_cast<std::size_t>(row)] = vote_prefix(order, train_y, k);
    }
    return predictions;
}

std::size_t select_k_cv(const Eigen::MatrixXd& train_X, const std::vector<int>& train_y,
                        std::size_t folds, std::uint64_t seed) {
    const std::size_t n = static_cast<std::size_t>(train_X.rows());
    if (n < folds) throw std::invalid_argument("select_k_cv: too few instances");

    RandomEngine rng(seed);
    const auto fold_sets = stratified_folds(train_y, folds, rng);

    std::size_t k_max = std::max<std::size_t>(1, integer_sqrt(n));
    for (const auto& fold : fold_sets) {
        k_max = std::min(k_max, n - fold.size());  // k cannot exceed fold-train size
    }

    std::vector<std::size_t> mistakes(k_max + 1, 0);
    std::vector<char> in_fold(n, 0);
    for (const auto& fold : fold_sets) {
        std::fill(in_fold.begin(), in_fold.end(), 0);
        for (std::size_t i : fold) in_fold[i] = 1;

        std::vector<std::size_t> train_idx;
        train_idx.reserve(n - fold.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_fold[i]) train_idx.push_back(i);
        }
        Eigen::MatrixXd fold_train(static_cast<Eigen::Index>(train_idx.size()),
                                   train_X.cols());
        std::vector<int> fold_y(train_idx.size());
        for (std::size_t i = 0; i < train_idx.size(); ++i) {
            fold_train.row(static_cast<Eigen::Index>(i)) =
                train_X.row(static_cast<Eigen::Index>(train_idx[i]));
            fold_y[i] = train_y[train_idx[i]];
        }

        // One neighbor sort per validation point serves every k at once.
        for (std::size_t i : fold) {
            const auto order =
                neighbor_order(fold_train, train_X.row(static_cast<Eigen::Index>(i)));
            std::size_t ones = 0;
            for (std::size_t k = 1; k <= k_max; ++k) {
                ones += static_cast<std::size_t>(fold_y[order[k - 1]]);
                const std::size_t zeros = k - ones;
                int pred;
                if (ones > zeros) {
                    pred = 1;
                } else if (zeros > ones) {
                    pred = 0;
                } else {
                    pred = fold_y[order[0]];
                }
                if (pred != train_y[i]) ++mistakes[k];
            }
        }
    }

    std::size_t best_k = 1;
    for (std::size_t k = 2; k <= k_max; ++k) {
        if (mistakes[k] < mistakes[best_k]) best_k = k;  // ties keep the smaller k
    }
    return best_k;
}

std::vector<int> LdaClassifier::predict(const Eigen::MatrixXd& test_X) const {
    std::vector<int> predictions(static_cast<std::size_t>(test_X.rows()));
    for (Eigen::Index row = 0; row < test_X.rows(); ++row) {
        predictions[static_cast<std::size_t>(row)] =
            test_X.row(row).dot(weights) > threshold ? 1 : 0;
    }
    return predictions;
}

LdaClassifier fisher_lda_fit(const Eigen::MatrixXd& train_X,
                             const std::vector<int>& train_y, double ridge) {
    const Eigen::Index n = train_X.rows();
    const Eigen::Index d = train_X.cols();
    if (static_cast<std::size_t>(n) != train_y.size() || d < 1) {
        throw std::invalid_argument("fisher_lda_fit: bad shapes");
    }

    Eigen::VectorXd mean0 = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd mean1 = Eigen::VectorXd::Zero(d);
    Eigen::Index n0 = 0, n1 = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (train_y[static_cast<std::size_t>(i)] == 1) {
            mean1 += train_X.row(i).transpose();
            ++n1;
        } else {
            mean0 += train_X.row(i).transpose();
            ++n0;
        }
    }
    if (n0 == 0 || n1 == 0) {
        throw std::invalid_argument("fisher_lda_fit: both classes required");
    }
    mean0 /= static_cast<double>(n0);
    mean1 /= static_cast<double>(n1);

    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd centered =
            train_X.row(i).transpose() -
            (train_y[static_cast<std::size_t>(i)] == 1 ? mean1 : mean0);
        scatter.noalias() += centered * centered.transpose();
    }
    Eigen::MatrixXd pooled = scatter / static_cast<double>(n - 2);
    pooled.diagonal().array() += ridge;

    const Eigen::LDLT<Eigen::MatrixXd> solver(pooled);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("fisher_lda_fit: singular pooled covariance");
    }
    LdaClassifier model;
    model.weights = solver.solve(mean1 - mean0);
    if (!model.weights.allFinite()) {
        throw std::runtime_error("fisher_lda_fit: non-finite weights");
    }
    model.threshold = 0.5 * model.weights.dot(mean0 + mean1);
    return model;
}

double error_rate(const std::vector<int>& predicted, const std::vector<int>& actual) {
    if (predicted.size() != actual.size()) {
        throw std::invalid_argument("error_rate: length mismatch");
    }
    if (predicted.empty()) throw std::invalid_argument("error_rate: empty input");
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] != actual[i]) ++mismatches;
    }
    return static_cast<double>(mismatches) / static_cast<double>(predicted.size());
}

ClassifierHandle make_knn_handle(std::size_t k) {
    return [k](const Eigen::MatrixXd& train_X, const std::vector<int>& train_y,
               const Eigen::MatrixXd& test_X) {
        const std::size_t effective =
            std::min<std::size_t>(k, static_cast<std::size_t>(train_X.rows()));
        return knn_classify(train_X, train_y, test_X, effective);
    };
}

}  // namespace rmh
