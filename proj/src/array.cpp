#include "fuzzygrad/array.hpp"

#include <stdexcept>

namespace fuzzygrad {

std::string to_string(const Shape& s) {
    if (s.matrix) return "[" + std::to_string(s.rows) + "x" + std::to_string(s.cols) + "]";
    return "[" + std::to_string(s.rows) + "]";
}

Array::Array(const Shape& s, std::vector<double> data) : shape(s), v(std::move(data)) {
    if (v.size() != s.numel())
        throw std::invalid_argument("Array: data size " + std::to_string(v.size()) +
                                    " does not match shape " + to_string(s));
}

Array Array::scalar(double x) { return Array(scalar_shape(), {x}); }

Array Array::vector(std::vector<double> data) {
    Shape s = vector_shape(data.size());
    return Array(s, std::move(data));
}

static Mask mask_combine(const Mask& a, const Mask& b, bool is_and) {
    if (!(a.shape == b.shape))
        throw std::invalid_argument("mask: shape mismatch " + to_string(a.shape) + " vs " +
                                    to_string(b.shape));
    Mask out(a.shape);
    for (std::size_t i = 0; i < out.m.size(); ++i)
        out.m[i] = is_and ? (a.m[i] & b.m[i]) : (a.m[i] | b.m[i]);
    return out;
}

Mask Mask::operator&(const Mask& other) const { return mask_combine(*this, other, true); }
Mask Mask::operator|(const Mask& other) const { return mask_combine(*this, other, false); }

}  // namespace fuzzygrad
