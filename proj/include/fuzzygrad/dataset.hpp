#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fuzzygrad/array.hpp"

namespace fuzzygrad {

struct Dataset {
    Matrix features;
    std::vector<double> target;  // class codes 1..K
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;  // code i+1 maps to class_names[i]
};

// Load a header-bearing CSV, selecting the named numeric feature columns and
// one label column. Labels are encoded 1..K in order of first appearance.
// Parse problems name the offending row and column.
Dataset load_table(const std::string& path, const std::vector<std::string>& feature_columns,
                   const std::string& label_column);

struct ColumnBounds {
    double min = 0.0;
    double max = 1.0;
};

// Columnwise (x - min) / (max - min) onto [0, 1]; returns the fitted bounds.
// A constant column cannot be scaled and raises an error.
std::pair<Matrix, std::vector<ColumnBounds>> range_normalize(const Matrix& m);

// Apply previously fitted bounds (e.g. to held-out rows).
Matrix apply_bounds(const Matrix& m, std::span<const ColumnBounds> bounds);

}  // namespace fuzzygrad
