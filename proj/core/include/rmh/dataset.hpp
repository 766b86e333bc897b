#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rmh {

/// Common sample grid in [0, 1]. Strictly increasing, at least two points.
/// Grids need not be equidistant.
class Grid {
public:
    explicit Grid(std::vector<double> points);

    std::size_t size() const { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }
    const std::vector<double>& points() const { return points_; }

    bool is_equidistant(double tol = 1e-12) const;

    /// Index of the grid point equal to t, if any.
    std::optional<std::size_t> index_of(double t) const;

    /// p equidistant points spanning [0, 1], endpoints included.
    static Grid uniform(std::size_t p);

private:
    std::vector<double> points_;
};

/// N discretized trajectories on a shared grid with binary labels.
/// Rows of `values` are trajectories; labels are 0/1.
struct FunctionalDataset {
    Grid grid;
    Eigen::MatrixXd values;  // N x p
    std::vector<int> labels;

    FunctionalDataset(Grid g, Eigen::MatrixXd v, std::vector<int> y);

    std::size_t n() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t p() const { return grid.size(); }
    std::size_t class_count(int label) const;
    bool both_classes_present() const;
};

struct SplitPair {
    FunctionalDataset train;
    FunctionalDataset test;
};

/// Column naming convention for dataset CSV files: one label column plus one
/// column per grid point named `<time_prefix><time>`, e.g. `t_0.25`.
struct CsvSchema {
    std::string label_column = "label";
    std::string time_prefix = "t_";
};

/// Loads a dataset CSV. The grid is parsed from the header. With
/// `drop_zero_rows` set, trajectories that are identically zero are
/// discarded before the dataset is assembled.
FunctionalDataset load_dataset(const std::string& path, const CsvSchema& schema = {},
                               bool drop_zero_rows = false);

/// Writes the self-describing CSV format read by load_dataset. Floats carry
/// 17 significant digits so values survive a round trip exactly.
void save_dataset(const FunctionalDataset& data, const std::string& path,
                  const CsvSchema& schema = {});

/// Class-stratified random split. Per-class train counts are
/// round(train_fraction * class size), so proportions are preserved to
/// within one instance. Deterministic in the seed.
SplitPair stratified_split(const FunctionalDataset& data, double train_fraction,
                           std::uint64_t seed);

/// Keeps the first `keep` grid points (used e.g. to truncate spectra).
FunctionalDataset truncate_columns(const FunctionalDataset& data, std::size_t keep);

}  // namespace rmh
