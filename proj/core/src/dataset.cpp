#include "rmh/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rmh/rng.hpp"

namespace rmh {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) {
        throw std::invalid_argument("Grid: need at least 2 points");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]) || points_[i] < 0.0 || points_[i] > 1.0) {
            throw std::invalid_argument("Grid: points must lie in [0, 1]");
        }
        if (i > 0 && points_[i] <= points_[i - 1]) {
            throw std::invalid_argument("Grid: points must be strictly increasing");
        }
    }
}

bool Grid::is_equidistant(double tol) const {
    const double step = points_[1] - points_[0];
    for (std::size_t i = 2; i < points_.size(); ++i) {
        if (std::abs((points_[i] - points_[i - 1]) - step) > tol) return false;
    }
    return true;
}

std::optional<std::size_t> Grid::index_of(double t) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), t);
    if (it != points_.end() && *it == t) {
        return static_cast<std::size_t>(it - points_.begin());
    }
    return std::nullopt;
}

Grid Grid::uniform(std::size_t p) {
    if (p < 2) throw std::invalid_argument("Grid::uniform: need p >= 2");
    std::vector<double> pts(p);
    for (std::size_t j = 0; j < p; ++j) {
        pts[j] = static_cast<double>(j) / static_cast<double>(p - 1);
    }
    return Grid(std::move(pts));
}

FunctionalDataset::FunctionalDataset(Grid g, Eigen::MatrixXd v, std::vector<int> y)
    : grid(std::move(g)), values(std::move(v)), labels(std::move(y)) {
    if (static_cast<std::size_t>(values.cols()) != grid.size()) {
        throw std::invalid_argument("FunctionalDataset: row length != grid length");
    }
    if (static_cast<std::size_t>(values.rows()) != labels.size()) {
        throw std::invalid_argument("FunctionalDataset: label count != row count");
    }
    for (int label : labels) {
        if (label != 0 && label != 1) {
            throw std::invalid_argument("FunctionalDataset: non-binary label");
        }
    }
}

std::size_t FunctionalDataset::class_count(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

bool FunctionalDataset::both_classes_present() const {
    return class_count(0) > 0 && class_count(1) > 0;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    // allow trailing whitespace only
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    if (pos != cell.size() || cell.empty()) {
        throw std::runtime_error("load_dataset: non-numeric cell at row " +
                                 std::to_string(row) + ", column " + std::to_string(col));
    }
    return v;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

FunctionalDataset load_dataset(const std::string& path, const CsvSchema& schema,
                               bool drop_zero_rows) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset: cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("load_dataset: empty file: " + path);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_csv_line(line);
    std::ptrdiff_t label_col = -1;
    std::vector<std::size_t> time_cols;
    std::vector<double> grid_points;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = trim(header[c]);
        if (name == schema.label_column) {
            if (label_col >= 0) {
                throw std::runtime_error("load_dataset: duplicate label column");
            }
            label_col = static_cast<std::ptrdiff_t>(c);
        } else if (name.rfind(schema.time_prefix, 0) == 0) {
            const std::string time_text = name.substr(schema.time_prefix.size());
            grid_points.push_back(parse_number(time_text, 0, c));
            time_cols.push_back(c);
        } else {
            throw std::runtime_error("load_dataset: unrecognized column '" + name + "'");
        }
    }
    if (label_col < 0) {
        throw std::runtime_error("load_dataset: missing label column '" +
                                 schema.label_column + "'");
    }
    Grid grid(grid_points);  // validates ordering and range

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error("load_dataset: row " + std::to_string(row_no) +
                                     " has " + std::to_string(cells.size()) +
                                     " cells, expected " + std::to_string(header.size()));
        }
        const double raw_label =
            parse_number(cells[static_cast<std::size_t>(label_col)], row_no,
                         static_cast<std::size_t>(label_col));
        if (raw_label != 0.0 && raw_label != 1.0) {
            throw std::runtime_error("load_dataset: non-binary label at row " +
                                     std::to_string(row_no));
        }
        std::vector<double> row(time_cols.size());
        for (std::size_t j = 0; j < time_cols.size(); ++j) {
            row[j] = parse_number(cells[time_cols[j]], row_no, time_cols[j]);
        }
        if (drop_zero_rows &&
            std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; })) {
            continue;
        }
        rows.push_back(std::move(row));
        labels.push_back(raw_label == 1.0 ? 1 : 0);
    }
    if (rows.empty()) {
        throw std::runtime_error("load_dataset: no data rows in " + path);
    }

    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                           static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return FunctionalDataset(std::move(grid), std::move(values), std::move(labels));
}

void save_dataset(const FunctionalDataset& data, const std::string& path,
                  const CsvSchema& schema) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_dataset: cannot open file: " + path);

    char buf[64];
    out << schema.label_column;
    for (std::size_t j = 0; j < data.grid.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", data.grid[j]);
        out << ',' << schema.time_prefix << buf;
    }
    out << '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
        out << data.labels[i];
        for (std::size_t j = 0; j < data.p(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g",
                          data.values(static_cast<Eigen::Index>(i),
                                      static_cast<Eigen::Index>(j)));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("save_dataset: write failed: " + path);
}

SplitPair stratified_split(const FunctionalDataset& data, double train_fraction,
                           std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("stratified_split: train_fraction must be in (0, 1)");
    }
    RandomEngine rng(seed);
    std::vector<std::size_t> train_idx, test_idx;
    for (int label : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < data.n(); ++i) {
            if (data.labels[i] == label) members.push_back(i);
        }
        if (members.size() < 2) {
            throw std::invalid_argument(
                "stratified_split: each class needs at least 2 members");
        }
        rng.shuffle(members);
        auto take = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(members.size())));
        take = std::clamp<std::size_t>(take, 1, members.size() - 1);
        train_idx.insert(train_idx.end(), members.begin(), members.begin() + take);
        test_idx.insert(test_idx.end(), members.begin() + take, members.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    auto subset = [&](const std::vector<std::size_t>& idx) {
        Eigen::MatrixXd v(static_cast<Eigen::Index>(idx.size()), data.values.cols());
        std::vector<int> y(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            v.row(static_cast<Eigen::Index>(i)) =
                data.values.row(static_cast<Eigen::Index>(idx[i]));
            y[i] = data.labels[idx[i]];
        }
        return FunctionalDataset(data.grid, std::move(v), std::move(y));
    };
    return SplitPair{subset(train_idx), subset(test_idx)};
}

FunctionalDataset truncate_columns(const FunctionalDataset& data, std::size_t keep) {
    if (keep < 2 || keep > data.p()) {
        throw std::invalid_argument("truncate_columns: keep must be in [2, p]");
    }
    std::vector<double> pts(data.grid.points().begin(),
                            data.grid.points().begin() + static_cast<std::ptrdiff_t>(keep));
    return FunctionalDataset(Grid(std::move(pts)),
                             data.values.leftCols(static_cast<Eigen::Index>(keep)),
                             data.labels);
}

}  // namespace rmh
