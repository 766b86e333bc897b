#pragma once

#include <cstdint>

#include "rmh/classifiers.hpp"
#include "rmh/dataset.hpp"

namespace rmh {

/// Linear projection fitted on training data: scores = (X - mean) * directions.
struct ProjectionModel {
    enum class Kind { pca, pls };

    Kind kind = Kind::pca;
    Eigen::VectorXd mean;        // p
    Eigen::MatrixXd directions;  // p x c

    std::size_t components() const { return static_cast<std::size_t>(directions.cols()); }

    Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;

    /// Projection onto the leading `c` directions (components are nested for
    /// both PCA and PLS, so prefixes are valid smaller models).
    Eigen::MatrixXd transform_prefix(const Eigen::MatrixXd& X, std::size_t c) const;
};

/// Top-c eigenvectors of the sample covariance, eigenvalues descending, with
/// a deterministic sign convention (largest-magnitude entry positive).
ProjectionModel pca_fit(const FunctionalDataset& train, std::size_t c);

/// PLS1 (NIPALS) with the centered {0,1} response. The stored directions map
/// centered data straight to the deflation scores, so training scores come
/// out mutually orthogonal. Requested components beyond the data rank are
/// dropped.
ProjectionModel pls_fit(const FunctionalDataset& train, std::size_t c);

/// Component count in [1, c_max] minimizing the mean stratified-CV error of
/// the supplied classifier on projected data; ties go to the smallest count.
std::size_t select_components_cv(const FunctionalDataset& train,
                                 ProjectionModel::Kind kind, std::size_t folds,
                                 std::size_t c_max, const ClassifierHandle& classifier,
                                 std::uint64_t seed);

}  // namespace rmh
