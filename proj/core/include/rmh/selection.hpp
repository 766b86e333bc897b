#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmh/correction.hpp"
#include "rmh/distance_correlation.hpp"

namespace rmh {

/// Ordered variable selection with the relevance recorded at selection time.
/// For recursive selections, `times` follows recursion order (a maximum is
/// reported before anything found in its left subinterval, which precedes
/// the right subinterval).
struct SelectionResult {
    std::string method;  // "mh" | "rmh"
    std::vector<double> times;
    std::vector<double> relevances;
    double r = 0.0;  // redundancy threshold (rmh)
    double s = 0.0;  // relevance threshold (rmh)

    std::size_t size() const { return times.size(); }

    std::string to_json() const;
    static SelectionResult from_json(const std::string& text);
};

/// Indices of local maxima of the curve, sorted by descending relevance
/// (ties broken by the lower index). Endpoints compare against their single
/// neighbor; a plateau contributes its first index only.
std::vector<std::size_t> find_local_maxima(const RelevanceCurve& curve);

/// Plain maxima hunting: the top-d local maxima of the relevance curve.
/// Returns fewer than d points when the curve has fewer maxima.
SelectionResult maxima_hunting_select(const FunctionalDataset& data, std::size_t d,
                                      DcorEngine engine = DcorEngine::naive);

/// Redundancy zone boundaries around t_max on pre-correction columns:
/// t_minus is the largest grid time below t_max (within the node) whose
/// squared distance correlation with the t_max column is <= r; t_plus is the
/// symmetric bound on the right. Absent when every candidate is redundant.
std::pair<std::optional<double>, std::optional<double>> redundancy_bounds(
    const FunctionalDataset& data, const IntervalNode& node, double t_max, double r,
    DcorEngine engine = DcorEngine::naive);

/// Fully evaluated recursive search at a floor threshold. Selections for any
/// s >= the floor can be extracted by pruning, which is exactly equivalent
/// to re-running the recursion at that s (a rejected maximum triggers no
/// correction and no descent, so subtrees are independent of the threshold
/// that pruned them). This makes cross-validating over a set of thresholds
/// a single-pass operation.
class RmhSelectionTree {
public:
    struct Node {
        double time = 0.0;
        double relevance = 0.0;
        int left = -1;   // child found in the left subinterval
        int right = -1;  // child found in the right subinterval
    };

    SelectionResult select_at(double s) const;

    double r() const { return r_; }
    double s_floor() const { return s_floor_; }

    /// Global argmax of the root relevance curve, recorded even when it
    /// falls below the floor (used as a fallback feature).
    double root_time() const { return nodes_.front().time; }
    double root_relevance() const { return nodes_.front().relevance; }

private:
    friend RmhSelectionTree rmh_select_tree(const FunctionalDataset&, double, double,
                                            DcorEngine);
    std::vector<Node> nodes_;  // preorder; nodes_[0] is the root candidate
    double r_ = 0.0;
    double s_floor_ = 0.0;
};

RmhSelectionTree rmh_select_tree(const FunctionalDataset& data, double r,
                                 double s_floor, DcorEngine engine = DcorEngine::naive);

/// Recursive maxima hunting: maxima of the relevance curve accepted above s,
/// each followed by a conditional-expectation correction and recursion into
/// the non-redundant left and right subintervals.
SelectionResult rmh_select(const FunctionalDataset& data, double r, double s,
                           DcorEngine engine = DcorEngine::naive);

/// Extracts the selected columns (in selection order) from the original,
/// uncorrected dataset. An empty selection yields a 0-column matrix so the
/// caller can apply its fallback.
std::pair<Eigen::MatrixXd, std::vector<int>> reduce_dataset(
    const FunctionalDataset& data, const SelectionResult& selection);

}  // namespace rmh
