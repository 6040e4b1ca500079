#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fuzzygrad/array.hpp"

namespace fuzzygrad {

namespace detail {
struct Node;
struct Access;
}  // namespace detail

// A numeric array in a computation graph. Copies are cheap and share the
// underlying node. Children own their parents, so a graph stays alive as
// long as any Value referencing it does and backward may be run repeatedly.
//
// Gradients: mark leaves with requires_grad, build an expression, call
// backward on a scalar root, then read grad_of(leaf). Accumulators persist
// across backward calls until zero_grads.
class Value {
  public:
    Value();                  // untracked scalar zero
    explicit Value(double x); // untracked scalar

    Value(const Value&);
    Value(Value&&) noexcept;
    Value& operator=(const Value&);
    Value& operator=(Value&&) noexcept;
    ~Value();

    const Array& data() const;
    const Shape& shape() const;
    std::size_t size() const;
    double item() const;  // value of a one-element array; throws otherwise

    bool requires_grad() const;
    bool is_leaf() const;
    bool tracked() const;  // participates in gradient flow

  private:
    explicit Value(std::shared_ptr<detail::Node> n);
    std::shared_ptr<detail::Node> node_;
    friend struct detail::Access;
};

// Leaf constructors. Reject empty and non-finite data.
Value make_value(Array data, bool requires_grad = false);
Value make_value(std::vector<double> data, bool requires_grad = false);
Value make_scalar(double x, bool requires_grad = false);

// Elementwise binary ops. Operand shapes must match, or one operand must be
// a single element, which broadcasts against the other.
Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value div(const Value& a, const Value& b);
// Ties route the full gradient to the first operand.
Value minimum(const Value& a, const Value& b);
Value maximum(const Value& a, const Value& b);

// Elementwise unary ops. sqrt and log reject out-of-domain inputs,
// identifying the offending index.
Value neg(const Value& a);
Value square(const Value& a);
Value sqrt(const Value& a);
Value exp(const Value& a);
Value log(const Value& a);
Value abs(const Value& a);  // subgradient 0 at 0

// Elementwise comparisons; results are detached masks.
Mask lt(const Value& a, const Value& b);
Mask le(const Value& a, const Value& b);
Mask gt(const Value& a, const Value& b);
Mask ge(const Value& a, const Value& b);

// out[i] = mask[i] ? on_true[i] : on_false[i]; gradients flow only into the
// branch selected at each element.
Value where_select(const Mask& mask, const Value& on_true, const Value& on_false);

// Full reductions to a scalar.
Value sum(const Value& a);
Value mean(const Value& a);

// Stack one-element parts into a vector, or equal-length vectors into a
// matrix (one part per row). Split a matrix back into row vectors.
Value stack_rows(std::span<const Value> parts);
std::vector<Value> unbind_rows(const Value& a);

// Reverse sweep from a scalar root, accumulating into leaf gradients.
// Throws if any reachable node holds a non-finite value, naming the
// operation that produced it.
void backward(const Value& root);

// Accumulated gradient of a requires_grad leaf (zeros before any backward).
Array grad_of(const Value& leaf);
void zero_grads(std::span<const Value> leaves);

inline Value operator+(const Value& a, const Value& b) { return add(a, b); }
inline Value operator-(const Value& a, const Value& b) { return sub(a, b); }
inline Value operator*(const Value& a, const Value& b) { return mul(a, b); }
inline Value operator/(const Value& a, const Value& b) { return div(a, b); }
inline Value operator-(const Value& a) { return neg(a); }

inline Value operator+(const Value& a, double b) { return add(a, Value(b)); }
inline Value operator-(const Value& a, double b) { return sub(a, Value(b)); }
inline Value operator*(const Value& a, double b) { return mul(a, Value(b)); }
inline Value operator/(const Value& a, double b) { return div(a, Value(b)); }
inline Value operator+(double a, const Value& b) { return add(Value(a), b); }
inline Value operator-(double a, const Value& b) { return sub(Value(a), b); }
inline Value operator*(double a, const Value& b) { return mul(Value(a), b); }
inline Value operator/(double a, const Value& b) { return div(Value(a), b); }

}  // namespace fuzzygrad
