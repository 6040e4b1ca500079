#include "fuzzygrad/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace fuzzygrad {

static std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        std::string field = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                          : comma - start);
        // trim surrounding whitespace
        std::size_t lo = field.find_first_not_of(" \t\r");
        std::size_t hi = field.find_last_not_of(" \t\r");
        fields.push_back(lo == std::string::npos ? std::string() : field.substr(lo, hi - lo + 1));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

Dataset load_table(const std::string& path, const std::vector<std::string>& feature_columns,
                   const std::string& label_column) {
    if (feature_columns.empty()) throw std::invalid_argument("load_table: no feature columns");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_table: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_table: '" + path + "' is empty");
    const std::vector<std::string> header = split_csv_line(line);

    auto column_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::runtime_error("load_table: column '" + name + "' not found in '" + path + "'");
    };

    std::vector<std::size_t> feat_idx;
    feat_idx.reserve(feature_columns.size());
    for (const std::string& name : feature_columns) feat_idx.push_back(column_index(name));
    const std::size_t label_idx = column_index(label_column);

    Dataset ds;
    ds.feature_names = feature_columns;
    std::vector<double> cells;
    std::size_t row_number = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++row_number;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error("load_table: row " + std::to_string(row_number) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        for (std::size_t f = 0; f < feat_idx.size(); ++f) {
            const std::string& cell = fields[feat_idx[f]];
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
            if (ec != std::errc() || ptr != cell.data() + cell.size())
                throw std::runtime_error("load_table: row " + std::to_string(row_number) +
                                         ", column '" + feature_columns[f] +
                                         "': cannot parse '" + cell + "' as a number");
            cells.push_back(x);
        }
        const std::string& label = fields[label_idx];
        std::size_t code = 0;
        for (; code < ds.class_names.size(); ++code)
            if (ds.class_names[code] == label) break;
        if (code == ds.class_names.size()) ds.class_names.push_back(label);
        ds.target.push_back(static_cast<double>(code + 1));
    }
    if (ds.target.empty())
        throw std::runtime_error("load_table: '" + path + "' has no data rows");

    ds.features = Matrix(ds.target.size(), feature_columns.size());
    ds.features.v = std::move(cells);
    return ds;
}

std::pair<Matrix, std::vector<ColumnBounds>> range_normalize(const Matrix& m) {
    if (m.rows == 0 || m.cols == 0) throw std::invalid_argument("range_normalize: empty matrix");
    std::vector<ColumnBounds> bounds(m.cols);
    for (std::size_t c = 0; c < m.cols; ++c) {
        double lo = m.at(0, c), hi = m.at(0, c);
        for (std::size_t r = 1; r < m.rows; ++r) {
            lo = std::min(lo, m.at(r, c));
            hi = std::max(hi, m.at(r, c));
        }
        if (lo == hi)
            throw std::invalid_argument("range_normalize: column " + std::to_string(c + 1) +
                                        " is constant and cannot be scaled");
        bounds[c] = {lo, hi};
    }
    return {apply_bounds(m, bounds), std::move(bounds)};
}

Matrix apply_bounds(const Matrix& m, std::span<const ColumnBounds> bounds) {
    if (bounds.size() != m.cols)
        throw std::invalid_argument("apply_bounds: expected " + std::to_string(m.cols) +
                                    " column bounds, got " + std::to_string(bounds.size()));
    Matrix out(m.rows, m.cols);
    for (std::size_t c = 0; c < m.cols; ++c) {
        const double lo = bounds[c].min, span = bounds[c].max - bounds[c].min;
        if (!(span > 0.0))
            throw std::invalid_argument("apply_bounds: degenerate bounds for column " +
                                        std::to_string(c + 1));
        for (std::size_t r = 0; r < m.rows; ++r) out.at(r, c) = (m.at(r, c) - lo) / span;
    }
    return out;
}

}  // namespace fuzzygrad
