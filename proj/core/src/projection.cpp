#include "rmh/projection.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <stdexcept>

#include "rmh/cv.hpp"

namespace rmh {

namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> direction) {
    Eigen::Index arg = 0;
    direction.cwiseAbs().maxCoeff(&arg);
    if (direction[arg] < 0.0) direction = -direction;
}

Eigen::MatrixXd centered_values(const FunctionalDataset& train, Eigen::VectorXd& mean) {
    mean = train.values.colwise().mean().transpose();
    return train.values.rowwise() - mean.transpose();
}

FunctionalDataset subset_rows(const FunctionalDataset& data,
                              const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd v(static_cast<Eigen::Index>(idx.size()), data.values.cols());
    std::vector<int> y(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        v.row(static_cast<Eigen::Index>(i)) =
            data.values.row(static_cast<Eigen::Index>(idx[i]));
        y[i] = data.labels[idx[i]];
    }
    return FunctionalDataset(data.grid, std::move(v), std::move(y));
}

}  // namespace

Eigen::MatrixXd ProjectionModel::transform(const Eigen::MatrixXd& X) const {
    return (X.rowwise() - mean.transpose()) * directions;
}

Eigen::MatrixXd ProjectionModel::transform_prefix(const Eigen::MatrixXd& X,
                                                  std::size_t c) const {
    if (c < 1 || c > components()) {
        throw std::invalid_argument("transform_prefix: component count out of range");
    }
    return (X.rowwise() - mean.transpose()) *
           directions.leftCols(static_cast<Eigen::Index>(c));
}

ProjectionModel pca_fit(const FunctionalDataset& train, std::size_t c) {
    const std::size_t n = train.n();
    const std::size_t p = train.p();
    if (c < 1 || c > std::min(n - 1, p)) {
        throw std::invalid_argument("pca_fit: need 1 <= c <= min(N-1, p)");
    }

    ProjectionModel model;
    model.kind = ProjectionModel::Kind::pca;
    const Eigen::MatrixXd centered = centered_values(train, model.mean);
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("pca_fit: eigendecomposition failed");
    }
    // Eigenvalues come back ascending; take the trailing c in reverse.
    model.directions.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c));
    for (std::size_t i = 0; i < c; ++i) {
        model.directions.col(static_cast<Eigen::Index>(i)) =
            solver.eigenvectors().col(static_cast<Eigen::Index>(p - 1 - i));
        fix_sign(model.directions.col(static_cast<Eigen::Index>(i)));
    }
    return model;
}

ProjectionModel pls_fit(const FunctionalDataset& train, std::size_t c) {
    const std::size_t n = train.n();
    const std::size_t p = train.p();
    if (c < 1 || c > std::min(n - 1, p)) {
        throw std::invalid_argument("pls_fit: need 1 <= c <= min(N-1, p)");
    }
    if (!train.both_classes_present()) {
        throw std::invalid_argument("pls_fit: zero-variance response after centering");
    }

    ProjectionModel model;
    model.kind = ProjectionModel::Kind::pls;
    Eigen::MatrixXd X = centered_values(train, model.mean);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        y[static_cast<Eigen::Index>(i)] = static_cast<double>(train.labels[i]);
    }
    y.array() -= y.mean();

    Eigen::MatrixXd weights(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c));
    Eigen::MatrixXd loadings(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c));
    std::size_t built = 0;
    for (std::size_t m = 0; m < c; ++m) {
        Eigen::VectorXd w = X.transpose() * y;
        const double w_norm = w.norm();
        if (w_norm < 1e-12) break;  // response residual exhausted
        w /= w_norm;
        const Eigen::VectorXd t = X * w;
        const double t_sq = t.squaredNorm();
        if (t_sq < 1e-24) break;
        const Eigen::VectorXd load = X.transpose() * t / t_sq;
        const double q = y.dot(t) / t_sq;
        X.noalias() -= t * load.transpose();
        y.noalias() -= q * t;
        weights.col(static_cast<Eigen::Index>(m)) = w;
        loadings.col(static_cast<Eigen::Index>(m)) = load;
        ++built;
    }
    if (built == 0) throw std::runtime_error("pls_fit: no usable component");

    const auto W = weights.leftCols(static_cast<Eigen::Index>(built));
    const auto P = loadings.leftCols(static_cast<Eigen::Index>(built));
    // Rotate the weights so scores = centered X * directions reproduces the
    // deflation scores: directions = W (P^T W)^{-1}, with P^T W unit upper
    // triangular.
    const Eigen::MatrixXd ptw_t = (P.transpose() * W).transpose();
    model.directions =
        ptw_t.triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
    return model;
}

std::size_t select_components_cv(const FunctionalDataset& train,
                                 ProjectionModel::Kind kind, std::size_t folds,
                                 std::size_t c_max, const ClassifierHandle& classifier,
                                 std::uint64_t seed) {
    const std::size_t n = train.n();
    if (n < folds) throw std::invalid_argument("select_components_cv: too few instances");
    if (c_max < 1) throw std::invalid_argument("select_components_cv: c_max must be >= 1");

    RandomEngine rng(seed);
    const auto fold_sets = stratified_folds(train.labels, folds, rng);

    std::size_t c_hi = std::min(c_max, train.p());
    for (const auto& fold : fold_sets) {
        c_hi = std::min(c_hi, n - fold.size() - 1);
    }
    if (c_hi < 1) throw std::invalid_argument("select_components_cv: folds too small");

    std::vector<std::size_t> mistakes(c_hi + 1, 0);
    std::vector<char> in_fold(n, 0);
    for (const auto& fold : fold_sets) {
        std::fill(in_fold.begin(), in_fold.end(), 0);
        for (std::size_t i : fold) in_fold[i] = 1;
        std::vector<std::size_t> train_idx;
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_fold[i]) train_idx.push_back(i);
        }
        const FunctionalDataset fold_train = subset_rows(train, train_idx);
        const FunctionalDataset fold_val = subset_rows(train, fold);

        // One fit at the largest count serves every smaller count, since
        // both projections are nested.
        const ProjectionModel model = kind == ProjectionModel::Kind::pca
                                          ? pca_fit(fold_train, c_hi)
                                          : pls_fit(fold_train, c_hi);
        const std::size_t avail = model.components();
        for (std::size_t c = 1; c <= c_hi; ++c) {
            const std::size_t use = std::min(c, avail);
            const auto scores_train = model.transform_prefix(fold_train.values, use);
            const auto scores_val = model.transform_prefix(fold_val.values, use);
            const auto predicted =
                classifier(scores_train, fold_train.labels, scores_val);
            for (std::size_t i = 0; i < fold.size(); ++i) {
                if (predicted[i] != fold_val.labels[i]) ++mistakes[c];
            }
        }
    }

    std::size_t best_c = 1;
    for (std::size_t c = 2; c <= c_hi; ++c) {
        if (mistakes[c] < mistakes[best_c]) best_c = c;  // ties keep the smaller c
    }
    return best_c;
}

}  // namespace rmh
