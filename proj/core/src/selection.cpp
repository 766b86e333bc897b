#include "rmh/selection.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace rmh {

namespace {

using nlohmann::json;

std::span<const double> column_span(const Eigen::MatrixXd& values, std::size_t j) {
    return {values.col(static_cast<Eigen::Index>(j)).data(),
            static_cast<std::size_t>(values.rows())};
}

/// Index range of grid points falling inside [t_inf, t_sup].
std::pair<std::size_t, std::size_t> node_index_range(const Grid& grid,
                                                     const IntervalNode& node) {
    const auto& t = grid.points();
    const auto lo_it = std::lower_bound(t.begin(), t.end(), node.t_inf);
    const auto hi_it = std::upper_bound(t.begin(), t.end(), node.t_sup);
    if (lo_it >= hi_it) {
        throw std::invalid_argument("node interval contains no grid points");
    }
    return {static_cast<std::size_t>(lo_it - t.begin()),
            static_cast<std::size_t>(hi_it - t.begin()) - 1};
}

struct IndexBounds {
    std::optional<std::size_t> minus;
    std::optional<std::size_t> plus;
};

/// Scans outward from j_max for the first column whose dcor with the t_max
/// column drops to r or below.
IndexBounds redundancy_scan(const Eigen::MatrixXd& values, std::size_t lo,
                            std::size_t hi, std::size_t j_max, double r,
                            DcorEngine engine) {
    IndexBounds bounds;
    const auto ref = column_span(values, j_max);
    for (std::size_t j = j_max; j-- > lo;) {
        if (dcor_sq(ref, column_span(values, j), engine) <= r) {
            bounds.minus = j;
            break;
        }
    }
    for (std::size_t j = j_max + 1; j <= hi; ++j) {
        if (dcor_sq(ref, column_span(values, j), engine) <= r) {
            bounds.plus = j;
            break;
        }
    }
    return bounds;
}

class TreeBuilder {
public:
    TreeBuilder(const FunctionalDataset& data, double r, double s_floor,
                DcorEngine engine)
        : grid_(data.grid),
          work_(data.values),
          cache_(data.labels),
          r_(r),
          s_floor_(s_floor),
          engine_(engine) {}

    std::vector<RmhSelectionTree::Node> build() {
        recurse(0, grid_.size() - 1, 0.0, std::nullopt);
        return std::move(nodes_);
    }

private:
    int recurse(std::size_t lo, std::size_t hi, double left_anchor,
                std::optional<double> right_anchor) {
        std::size_t best = lo;
        double best_rel = -1.0;
        for (std::size_t j = lo; j <= hi; ++j) {
            const double rel = cache_.dcor_sq_with(column_span(work_, j), engine_);
            if (rel > best_rel) {  // ties keep the lowest index
                best = j;
                best_rel = rel;
            }
        }
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({grid_[best], best_rel, -1, -1});
        if (!(best_rel > s_floor_)) return id;

        // Redundant neighborhood measured on the pre-correction columns.
        const auto bounds = redundancy_scan(work_, lo, hi, best, r_, engine_);

        IntervalNode node{grid_[lo], grid_[hi], left_anchor, right_anchor};
        apply_correction_in_place(work_, grid_, node, grid_[best]);

        if (bounds.minus && *bounds.minus > lo) {
            nodes_[static_cast<std::size_t>(id)].left =
                recurse(lo, *bounds.minus, left_anchor, grid_[best]);
        }
        if (bounds.plus && *bounds.plus < hi) {
            nodes_[static_cast<std::size_t>(id)].right =
                recurse(*bounds.plus, hi, grid_[best], std::nullopt);
        }
        return id;
    }

    const Grid& grid_;
    Eigen::MatrixXd work_;
    LabelDcorCache cache_;
    double r_;
    double s_floor_;
    DcorEngine engine_;
    std::vector<RmhSelectionTree::Node> nodes_;
};

}  // namespace

std::vector<std::size_t> find_local_maxima(const RelevanceCurve& curve) {
    const auto& v = curve.values;
    const std::size_t p = v.size();
    if (p == 0) throw std::invalid_argument("find_local_maxima: empty curve");

    std::vector<std::size_t> maxima;
    for (std::size_t j = 0; j < p; ++j) {
        const bool rises = j == 0 || v[j] > v[j - 1];  // plateau: first index only
        const bool falls = j + 1 == p || v[j] >= v[j + 1];
        if (rises && falls) maxima.push_back(j);
    }
    std::sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) {
        if (v[a] != v[b]) return v[a] > v[b];
        return a < b;
    });
    return maxima;
}

SelectionResult maxima_hunting_select(const FunctionalDataset& data, std::size_t d,
                                      DcorEngine engine) {
    if (d < 1) throw std::invalid_argument("maxima_hunting_select: need d >= 1");
    const RelevanceCurve curve = relevance_curve(data, engine);
    const auto maxima = find_local_maxima(curve);

    SelectionResult result;
    result.method = "mh";
    const std::size_t take = std::min(d, maxima.size());
    for (std::size_t i = 0; i < take; ++i) {
        result.times.push_back(curve.grid[maxima[i]]);
        result.relevances.push_back(curve.values[maxima[i]]);
    }
    return result;
}

std::pair<std::optional<double>, std::optional<double>> redundancy_bounds(
    const FunctionalDataset& data, const IntervalNode& node, double t_max, double r,
    DcorEngine engine) {
    if (!(r > 0.0 && r < 1.0)) {
        throw std::invalid_argument("redundancy_bounds: need 0 < r < 1");
    }
    const auto j_max = data.grid.index_of(t_max);
    if (!j_max || t_max < node.t_inf || t_max > node.t_sup) {
        throw std::invalid_argument("redundancy_bounds: t_max not a grid point in node");
    }
    const auto [lo, hi] = node_index_range(data.grid, node);
    const auto bounds = redundancy_scan(data.values, lo, hi, *j_max, r, engine);
    std::pair<std::optional<double>, std::optional<double>> out;
    if (bounds.minus) out.first = data.grid[*bounds.minus];
    if (bounds.plus) out.second = data.grid[*bounds.plus];
    return out;
}

RmhSelectionTree rmh_select_tree(const FunctionalDataset& data, double r,
                                 double s_floor, DcorEngine engine) {
    if (!(r > 0.0 && r < 1.0) || !(s_floor > 0.0 && s_floor < 1.0)) {
        throw std::invalid_argument("rmh: thresholds must lie in (0, 1)");
    }
    RmhSelectionTree tree;
    tree.r_ = r;
    tree.s_floor_ = s_floor;
    tree.nodes_ = TreeBuilder(data, r, s_floor, engine).build();
    return tree;
}

SelectionResult RmhSelectionTree::select_at(double s) const {
    if (s < s_floor_) {
        throw std::invalid_argument("RmhSelectionTree: s below the evaluated floor");
    }
    SelectionResult result;
    result.method = "rmh";
    result.r = r_;
    result.s = s;

    // Preorder walk, stopping wherever the threshold rejects a maximum.
    auto visit = [&](auto&& self, int id) -> void {
        if (id < 0) return;
        const Node& node = nodes_[static_cast<std::size_t>(id)];
        if (!(node.relevance > s)) return;
        result.times.push_back(node.time);
        result.relevances.push_back(node.relevance);
        self(self, node.left);
        self(self, node.right);
    };
    visit(visit, 0);
    return result;
}

SelectionResult rmh_select(const FunctionalDataset& data, double r, double s,
                           DcorEngine engine) {
    return rmh_select_tree(data, r, s, engine).select_at(s);
}

std::pair<Eigen::MatrixXd, std::vector<int>> reduce_dataset(
    const FunctionalDataset& data, const SelectionResult& selection) {
    Eigen::MatrixXd reduced(data.values.rows(),
                            static_cast<Eigen::Index>(selection.times.size()));
    for (std::size_t i = 0; i < selection.times.size(); ++i) {
        const auto j = data.grid.index_of(selection.times[i]);
        if (!j) {
            throw std::invalid_argument("reduce_dataset: selected time not on grid");
        }
        reduced.col(static_cast<Eigen::Index>(i)) =
            data.values.col(static_cast<Eigen::Index>(*j));
    }
    return {std::move(reduced), data.labels};
}

std::string SelectionResult::to_json() const {
    json j;
    j["method"] = method;
    j["r"] = r;
    j["s"] = s;
    j["times"] = times;
    j["relevances"] = relevances;
    return j.dump(2);
}

SelectionResult SelectionResult::from_json(const std::string& text) {
    const json j = json::parse(text);
    SelectionResult result;
    result.method = j.at("method").get<std::string>();
    result.r = j.at("r").get<double>();
    result.s = j.at("s").get<double>();
    result.times = j.at("times").get<std::vector<double>>();
    result.relevances = j.at("relevances").get<std::vector<double>>();
    if (result.times.size() != result.relevances.size()) {
        throw std::invalid_argument("SelectionResult: times/relevances length mismatch");
    }
    return result;
}

}  // namespace rmh
