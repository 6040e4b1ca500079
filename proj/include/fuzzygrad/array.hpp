#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fuzzygrad {

// Shape of a dense 64-bit float container: a flat vector, or a row-major
// 2-D matrix. A one-element vector doubles as a scalar.
struct Shape {
    std::size_t rows = 1;
    std::size_t cols = 1;
    bool matrix = false;

    std::size_t numel() const { return rows * cols; }
    bool operator==(const Shape&) const = default;
};

inline Shape scalar_shape() { return {1, 1, false}; }
inline Shape vector_shape(std::size_t n) { return {n, 1, false}; }
inline Shape matrix_shape(std::size_t rows, std::size_t cols) { return {rows, cols, true}; }

std::string to_string(const Shape& s);

struct Array {
    Shape shape;
    std::vector<double> v;

    Array() : v(1, 0.0) {}
    explicit Array(const Shape& s, double fill = 0.0) : shape(s), v(s.numel(), fill) {}
    Array(const Shape& s, std::vector<double> data);

    static Array scalar(double x);
    static Array vector(std::vector<double> data);

    std::size_t size() const { return v.size(); }
    double operator[](std::size_t i) const { return v[i]; }
    double& operator[](std::size_t i) { return v[i]; }
};

// Boolean selection mask produced by comparisons. Carries no gradient.
struct Mask {
    Shape shape;
    std::vector<std::uint8_t> m;

    Mask() : m(1, 0) {}
    explicit Mask(const Shape& s, bool fill = false) : shape(s), m(s.numel(), fill ? 1 : 0) {}

    std::size_t size() const { return m.size(); }
    bool operator[](std::size_t i) const { return m[i] != 0; }

    Mask operator&(const Mask& other) const;
    Mask operator|(const Mask& other) const;
};

// Plain row-major data table with no gradient semantics (datasets, results).
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}

    double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
};

}  // namespace fuzzygrad
