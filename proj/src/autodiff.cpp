#include "fuzzygrad/autodiff.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>

namespace fuzzygrad {

namespace detail {

// One graph node. Children hold shared ownership of their parents, so the
// graph rooted at any live Value is retained and backward can rerun on it.
// Construction ids grow monotonically; sorting a reachable set by id
// descending yields reverse construction order, a valid reverse-topological
// sweep because an op is always created after its operands.
struct Node {
    std::uint64_t id = 0;
    const char* op = "";
    Array data;
    bool tracked = false;        // participates in gradient flow
    bool requires_grad = false;  // leaf with a persistent gradient accumulator
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backprop;  // scatters this->adjoint into parents
    std::optional<Array> grad;            // persistent accumulator (leaves)
    std::optional<Array> adjoint;         // transient, valid during one sweep
};

struct Access {
    static const std::shared_ptr<Node>& node(const Value& v) { return v.node_; }
    static Value wrap(std::shared_ptr<Node> n) { return Value(std::move(n)); }
};

}  // namespace detail

using detail::Access;
using detail::Node;
using NodePtr = std::shared_ptr<Node>;

static NodePtr new_node(const char* op, Array data) {
    static std::atomic<std::uint64_t> counter{0};
    auto n = std::make_shared<Node>();
    n->id = counter.fetch_add(1, std::memory_order_relaxed);
    n->op = op;
    n->data = std::move(data);
    return n;
}

// Untracked op result; keeps the op tag so the non-finite check can still
// name the producer if the node ends up feeding a tracked graph.
static Value constant_result(const char* op, Array data) {
    return Access::wrap(new_node(op, std::move(data)));
}

static NodePtr tracked_result(const char* op, Array data, std::initializer_list<NodePtr> parents) {
    NodePtr n = new_node(op, std::move(data));
    n->parents.assign(parents.begin(), parents.end());
    n->tracked = true;
    return n;
}

// ---------------------------------------------------------------- Value

Value::Value(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
Value::Value() : Value(0.0) {}

Value::Value(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("Value: non-finite scalar");
    node_ = new_node("make_value", Array::scalar(x));
}

Value::Value(const Value&) = default;
Value::Value(Value&&) noexcept = default;
Value& Value::operator=(const Value&) = default;
Value& Value::operator=(Value&&) noexcept = default;
Value::~Value() = default;

const Array& Value::data() const { return node_->data; }
const Shape& Value::shape() const { return node_->data.shape; }
std::size_t Value::size() const { return node_->data.size(); }

double Value::item() const {
    if (node_->data.size() != 1)
        throw std::invalid_argument("item: value has shape " + to_string(node_->data.shape) +
                                    ", expected a single element");
    return node_->data.v[0];
}

bool Value::requires_grad() const { return node_->requires_grad; }
bool Value::is_leaf() const { return node_->parents.empty(); }
bool Value::tracked() const { return node_->tracked; }

Value make_value(Array data, bool requires_grad) {
    if (data.v.empty()) throw std::invalid_argument("make_value: empty data");
    for (std::size_t i = 0; i < data.v.size(); ++i)
        if (!std::isfinite(data.v[i]))
            throw std::invalid_argument("make_value: non-finite entry at index " +
                                        std::to_string(i));
    NodePtr n = new_node("make_value", std::move(data));
    n->requires_grad = requires_grad;
    n->tracked = requires_grad;
    return Access::wrap(std::move(n));
}

Value make_value(std::vector<double> data, bool requires_grad) {
    if (data.empty()) throw std::invalid_argument("make_value: empty data");
    return make_value(Array::vector(std::move(data)), requires_grad);
}

Value make_scalar(double x, bool requires_grad) {
    return make_value(Array::scalar(x), requires_grad);
}

// ------------------------------------------------------------- helpers

static const Shape& broadcast_shape(const char* op, const Shape& a, const Shape& b) {
    if (a == b) return a;
    if (b.numel() == 1) return a;
    if (a.numel() == 1) return b;
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + to_string(a) + " vs " +
                                to_string(b));
}

template <class F>
static Array zip(const Shape& out_shape, const Array& a, const Array& b, F f) {
    Array out(out_shape);
    const bool sa = a.size() == 1, sb = b.size() == 1;
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = f(a.v[sa ? 0 : i], b.v[sb ? 0 : i]);
    return out;
}

// Reduce a wide contribution down to a broadcast operand's shape.
static Array collapse_to(const Shape& target, const Array& wide) {
    if (wide.shape == target) return wide;
    double s = 0.0;
    for (double x : wide.v) s += x;
    Array out(target);
    out.v[0] = s;
    return out;
}

static void add_adjoint(Node& n, Array contrib) {
    if (!n.adjoint) {
        n.adjoint = std::move(contrib);
        return;
    }
    for (std::size_t i = 0; i < n.adjoint->v.size(); ++i) n.adjoint->v[i] += contrib.v[i];
}

// --------------------------------------------------------- binary ops

Value add(const Value& av, const Value& bv) {
    const NodePtr& a = Access::node(av);
    const NodePtr& b = Access::node(bv);
    const Shape os = broadcast_shape("add", a->data.shape, b->data.shape);
    Array out = zip(os, a->data, b->data, [](double x, double y) { return x + y; });
    if (!a->tracked && !b->tracked) return constant_result("add", std::move(out));
    NodePtr n = tracked_result("add", std::move(out), {a, b});
    n->backprop = [pa = a.get(), pb = b.get()](Node& self) {
        const Array& adj = *self.adjoint;
        if (pa->tracked) add_adjoint(*pa, collapse_to(pa->data.shape, adj));
        if (pb->tracked) add_adjoint(*pb, collapse_to(pb->data.shape, adj));
    };
    return Access::wrap(std::move(n));
}

Value sub(const Value& av, const Value& bv) {
    const NodePtr& a = Access::node(av);
    const NodePtr& b = Access::node(bv);
    const Shape os = broadcast_shape("sub", a->data.shape, b->data.shape);
    Array out = zip(os, a->data, b->data, [](double x, double y) { return x - y; });
    if (!a->tracked && !b->tracked) return constant_result("sub", std::move(out));
    NodePtr n = tracked_result("sub", std::move(out), {a, b});
    n->backprop = [pa = a.get(), pb = b.get()](Node& self) {
        const Array& adj = *self.adjoint;
        if (pa->tracked) add_adjoint(*pa, collapse_to(pa->data.shape, adj));
        if (pb->tracked) {
            Array c = adj;
            for (double& x : c.v) x = -x;
            add_adjoint(*pb, collapse_to(pb->data.shape, c));
        }
    };
    return Access::wrap(std::move(n));
}

Value mul(const Value& av, const Value& bv) {
    const NodePtr& a = Access::node(av);
    const NodePtr& b = Access::node(bv);
    const Shape os = broadcast_shape("mul", a->data.shape, b->data.shape);
    Array out = zip(os, a->data, b->data, [](double x, double y) { return x * y; });
    if (!a->tracked && !b->tracked) return constant_result("mul", std::move(out));
    NodePtr n = tracked_result("mul", std::move(out), {a, b});
    n->backprop = [pa = a.get(), pb = b.get()](Node& self) {
        const Array& adj = *self.adjoint;
        if (pa->tracked)
            add_adjoint(*pa, collapse_to(pa->data.shape,
                                         zip(adj.shape, adj, pb->data,
                                             [](double g, double y) { return g * y; })));
        if (pb->tracked)
            add_adjoint(*pb, collapse_to(pb->data.shape,
                                         zip(adj.shape, adj, pa->data,
                                             [](double g, double x) { return g * x; })));
    };
    return Access::wrap(std::move(n));
}

Value div(const Value& av, const Value& bv) {
    const NodePtr& a = Access::node(av);
    const NodePtr& b = Access::node(bv);
    const Shape os = broadcast_shape("div", a->data.shape, b->data.shape);
    Array out = zip(os, a->data, b->data, [](double x, double y) { return x / y; });
    if (!a->tracked && !b->tracked) return constant_result("div", std::move(out));
    NodePtr n = tracked_result("div", std::move(out), {a, b});
    n->backprop = [pa = a.get(), pb = b.get()](Node& self) {
        const Array& adj = *self.adjoint;
        if (pa->tracked)
            add_adjoint(*pa, collapse_to(pa->data.shape,
                                         zip(adj.shape, adj, pb->data,
                                             [](double g, double y) { return g / y; })));
        if (pb->tracked) {
            Array c(adj.shape);
            const bool sa = pa->data.size() == 1, sb = pb->data.size() == 1;
            for (std::size_t i = 0; i < c.v.size(); ++i) {
                double x = pa->data.v[sa ? 0 : i];
                double y = pb->data.v[sb ? 0 : i];
                c.v[i] = -adj.v[i] * x / (y * y);
            }
            add_adjoint(*pb, collapse_to(pb->data.shape, c));
        }
    };
    return Access::wrap(std::move(n));
}

// min/max record which operand won at each element during the forward pass;
// ties go to the first operand, which then receives the whole gradient.
static Value extremum(const char* op, const Value& av, const Value& bv, bool is_min) {
    const NodePtr& a = Access::node(av);
    const NodePtr& b = Access::node(bv);
    const Shape os = broadcast_shape(op, a->data.shape, b->data.shape);
    const bool sa = a->data.size() == 1, sb = b->data.size() == 1;
    Array out(os);
    std::vector<std::uint8_t> first(out.size());
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        double x = a->data.v[sa ? 0 : i];
        double y = b->data.v[sb ? 0 : i];
        bool f = is_min ? (x <= y) : (x >= y);
        first[i] = f;
        out.v[i] = f ? x : y;
    }
    if (!a->tracked && !b->tracked) return constant_result(op, std::move(out));
    NodePtr n = tracked_result(op, std::move(out), {a, b});
    n->backprop = [pa = a.get(), pb = b.get(), first = std::move(first)](Node& self) {
        const Array& adj = *self.adjoint;
        if (pa->tracked) {
            Array c(adj.shape);
            for (std::size_t i = 0; i < c.v.size(); ++i)
                if (first[i]) c.v[i] = adj.v[i];
            add_adjoint(*pa, collapse_to(pa->data.shape, c));
        }
        if (pb->tracked) {
            Array c(adj.shape);
            for (std::size_t i = 0; i < c.v.size(); ++i)
                if (!first[i]) c.v[i] = adj.v[i];
            add_adjoint(*pb, collapse_to(pb->data.shape, c));
        }
    };
    return Access::wrap(std::move(n));
}

Value minimum(const Value& a, const Value& b) { return extremum("minimum", a, b, true); }
Value maximum(const Value& a, const Value& b) { return extremum("maximum", a, b, false); }

// ---------------------------------------------------------- unary ops

Value neg(const Value& av) {
    const NodePtr& a = Access::node(av);
    Array out = a->data;
    for (double& x : out.v) x = -x;
    if (!a->tracked) return constant_result("neg", std::move(out));
    NodePtr n = tracked_result("neg", std::move(out), {a});
    n->backprop = [pa = a.get()](Node& self) {
        Array c = *self.adjoint;
        for (double& x : c.v) x = -x;
        add_adjoint(*pa, std::move(c));
    };
    return Access::wrap(std::move(n));
}

Value square(const Value& av) {
    const NodePtr& a = Access::node(av);
    Array out = a->data;
    for (double& x : out.v) x = x * x;
    if (!a->tracked) return constant_result("square", std::move(out));
    NodePtr n = tracked_result("square", std::move(out), {a});
    n->backprop = [pa = a.get()](Node& self) {
        Array c = *self.adjoint;
        for (std::size_t i = 0; i < c.v.size(); ++i) c.v[i] *= 2.0 * pa->data.v[i];
        add_adjoint(*pa, std::move(c));
    };
    return Access::wrap(std::move(n));
}

Value sqrt(const Value& av) {
    const NodePtr& a = Access::node(av);
    Array out = a->data;
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        if (out.v[i] < 0.0)
            throw std::invalid_argument("sqrt: negative input at index " + std::to_string(i));
        out.v[i] = std::sqrt(out.v[i]);
    }
    if (!a->tracked) return constant_result("sqrt", std::move(out));
    NodePtr n = tracked_result("sqrt", std::move(out), {a});
    n->backprop = [pa = a.get()](Node& self) {
        Array c = *self.adjoint;
        for (std::size_t i = 0; i < c.v.size(); ++i) c.v[i] *= 0.5 / self.data.v[i];
        add_adjoint(*pa, std::move(c));
    };
    return Access::wrap(std::move(n));
}

Value exp(const Value& av) {
    const NodePtr& a = Access::node(av);
    Array out = a->data;
    for (double& x : out.v) x = std::exp(x);
    if (!a->tracked) return constant_result("exp", std::move(out));
    NodePtr n = tracked_result("exp", std::move(out), {a});
    n->backprop = [pa = a.get()](Node& self) {
        Array c = *self.adjoint;
        for (std::size_t i = 0; i < c.v.size(); ++i) c.v[i] *= self.data.v[i];
        add_adjoint(*pa, std::move(c));
    };
    return Access::wrap(std::move(n));
}

Value log(const Value& av) {
    const NodePtr& a = Access::node(av);
    Array out = a->data;
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        if (out.v[i] <= 0.0)
            throw std::invalid_argument("log: non-positive input at index " + std::to_string(i));
        out.v[i] = std::log(out.v[i]);
    }
    if (!a->tracked) return constant_result("log", std::move(out));
    NodePtr n = tracked_result("log", std::move(out), {a});
    n->backprop = [pa = a.get()](Node& self) {
        Array c = *self.adjoint;
        for (std::size_t i = 0; i < c.v.size(); ++i) c.v[i] /= pa->data.v[i];
        add_adjoint(*pa, std::move(c));
    };
    return Access::wrap(std::move(n));
}

Value abs(const Value& av) {
    const NodePtr& a = Access::node(av);
    Array out = a->data;
    for (double& x : out.v) x = std::abs(x);
    if (!a->tracked) return constant_result("abs", std::move(out));
    NodePtr n = tracked_result("abs", std::move(out), {a});
    n->backprop = [pa = a.get()](Node& self) {
        Array c = *self.adjoint;
        for (std::size_t i = 0; i < c.v.size(); ++i) {
            double x = pa->data.v[i];
            c.v[i] *= (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        }
        add_adjoint(*pa, std::move(c));
    };
    return Access::wrap(std::move(n));
}

// -------------------------------------------------------- comparisons

static Mask compare(const char* op, const Value& av, const Value& bv,
                    bool (*pred)(double, double)) {
    const NodePtr& a = Access::node(av);
    const NodePtr& b = Access::node(bv);
    const Shape os = broadcast_shape(op, a->data.shape, b->data.shape);
    const bool sa = a->data.size() == 1, sb = b->data.size() == 1;
    Mask out(os);
    for (std::size_t i = 0; i < out.m.size(); ++i)
        out.m[i] = pred(a->data.v[sa ? 0 : i], b->data.v[sb ? 0 : i]);
    return out;
}

Mask lt(const Value& a, const Value& b) {
    return compare("lt", a, b, [](double x, double y) { return x < y; });
}
Mask le(const Value& a, const Value& b) {
    return compare("le", a, b, [](double x, double y) { return x <= y; });
}
Mask gt(const Value& a, const Value& b) {
    return compare("gt", a, b, [](double x, double y) { return x > y; });
}
Mask ge(const Value& a, const Value& b) {
    return compare("ge", a, b, [](double x, double y) { return x >= y; });
}

// ------------------------------------------------------------- select

Value where_select(const Mask& mask, const Value& tv, const Value& fv) {
    const NodePtr& t = Access::node(tv);
    const NodePtr& f = Access::node(fv);
    Shape os = mask.shape;
    if (os.numel() == 1 && t->data.size() > 1) os = t->data.shape;
    if (os.numel() == 1 && f->data.size() > 1) os = f->data.shape;
    auto compatible = [&os](const Shape& s) { return s == os || s.numel() == 1; };
    if (!compatible(mask.shape) || !compatible(t->data.shape) || !compatible(f->data.shape))
        throw std::invalid_argument("where_select: incompatible shapes " + to_string(mask.shape) +
                                    ", " + to_string(t->data.shape) + ", " +
                                    to_string(f->data.shape));
    const bool sm = mask.size() == 1, st = t->data.size() == 1, sf = f->data.size() == 1;
    Array out(os);
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = mask.m[sm ? 0 : i] ? t->data.v[st ? 0 : i] : f->data.v[sf ? 0 : i];
    if (!t->tracked && !f->tracked) return constant_result("where_select", std::move(out));
    NodePtr n = tracked_result("where_select", std::move(out), {t, f});
    n->backprop = [pt = t.get(), pf = f.get(), m = mask.m, sm](Node& self) {
        const Array& adj = *self.adjoint;
        if (pt->tracked) {
            Array c(adj.shape);
            for (std::size_t i = 0; i < c.v.size(); ++i)
                if (m[sm ? 0 : i]) c.v[i] = adj.v[i];
            add_adjoint(*pt, collapse_to(pt->data.shape, c));
        }
        if (pf->tracked) {
            Array c(adj.shape);
            for (std::size_t i = 0; i < c.v.size(); ++i)
                if (!m[sm ? 0 : i]) c.v[i] = adj.v[i];
            add_adjoint(*pf, collapse_to(pf->data.shape, c));
        }
    };
    return Access::wrap(std::move(n));
}

// --------------------------------------------------------- reductions

Value sum(const Value& av) {
    const NodePtr& a = Access::node(av);
    double s = 0.0;
    for (double x : a->data.v) s += x;
    if (!a->tracked) return constant_result("sum", Array::scalar(s));
    NodePtr n = tracked_result("sum", Array::scalar(s), {a});
    n->backprop = [pa = a.get()](Node& self) {
        add_adjoint(*pa, Array(pa->data.shape, self.adjoint->v[0]));
    };
    return Access::wrap(std::move(n));
}

Value mean(const Value& av) {
    const NodePtr& a = Access::node(av);
    double s = 0.0;
    for (double x : a->data.v) s += x;
    const double n_elem = static_cast<double>(a->data.size());
    if (!a->tracked) return constant_result("mean", Array::scalar(s / n_elem));
    NodePtr n = tracked_result("mean", Array::scalar(s / n_elem), {a});
    n->backprop = [pa = a.get(), n_elem](Node& self) {
        add_adjoint(*pa, Array(pa->data.shape, self.adjoint->v[0] / n_elem));
    };
    return Access::wrap(std::move(n));
}

// ------------------------------------------------------ stack / unbind

Value stack_rows(std::span<const Value> parts) {
    if (parts.empty()) throw std::invalid_argument("stack_rows: no parts");
    const Shape ps = parts[0].shape();
    if (ps.matrix) throw std::invalid_argument("stack_rows: parts must be scalars or vectors");
    for (const Value& p : parts)
        if (!(p.shape() == ps))
            throw std::invalid_argument("stack_rows: ragged parts, " + to_string(ps) + " vs " +
                                        to_string(p.shape()));
    const std::size_t k = parts.size();
    const std::size_t width = ps.numel();
    Array out(width == 1 ? vector_shape(k) : matrix_shape(k, width));
    bool any_tracked = false;
    std::vector<NodePtr> parent_nodes;
    parent_nodes.reserve(k);
    for (std::size_t r = 0; r < k; ++r) {
        const NodePtr& p = Access::node(parts[r]);
        parent_nodes.push_back(p);
        any_tracked = any_tracked || p->tracked;
        std::copy(p->data.v.begin(), p->data.v.end(), out.v.begin() + r * width);
    }
    if (!any_tracked) return constant_result("stack_rows", std::move(out));
    NodePtr n = new_node("stack_rows", std::move(out));
    n->parents = std::move(parent_nodes);
    n->tracked = true;
    n->backprop = [width](Node& self) {
        for (std::size_t r = 0; r < self.parents.size(); ++r) {
            Node* p = self.parents[r].get();
            if (!p->tracked) continue;
            Array c(p->data.shape);
            for (std::size_t j = 0; j < width; ++j) c.v[j] = self.adjoint->v[r * width + j];
            add_adjoint(*p, std::move(c));
        }
    };
    return Access::wrap(std::move(n));
}

std::vector<Value> unbind_rows(const Value& av) {
    const NodePtr& a = Access::node(av);
    if (!a->data.shape.matrix)
        throw std::invalid_argument("unbind_rows: input must be 2-D, got " +
                                    to_string(a->data.shape));
    const std::size_t rows = a->data.shape.rows, cols = a->data.shape.cols;
    std::vector<Value> out;
    out.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        Array row(vector_shape(cols));
        std::copy(a->data.v.begin() + r * cols, a->data.v.begin() + (r + 1) * cols, row.v.begin());
        if (!a->tracked) {
            out.push_back(constant_result("unbind_rows", std::move(row)));
            continue;
        }
        NodePtr n = tracked_result("unbind_rows", std::move(row), {a});
        n->backprop = [pa = a.get(), r, cols](Node& self) {
            Array c(pa->data.shape);
            for (std::size_t j = 0; j < cols; ++j) c.v[r * cols + j] = self.adjoint->v[j];
            add_adjoint(*pa, std::move(c));
        };
        out.push_back(Access::wrap(std::move(n)));
    }
    return out;
}

// ----------------------------------------------------------- backward

void backward(const Value& root) {
    const NodePtr& r = Access::node(root);
    if (r->data.size() != 1)
        throw std::invalid_argument("backward: root must be a single element, got " +
                                    to_string(r->data.shape));
    if (!r->tracked)
        throw std::invalid_argument("backward: root is not connected to any requires_grad leaf");

    std::vector<Node*> order;
    std::unordered_set<const Node*> seen;
    std::vector<Node*> stack = {r.get()};
    seen.insert(r.get());
    while (!stack.empty()) {
        Node* n = stack.back();
        stack.pop_back();
        order.push_back(n);
        for (const NodePtr& p : n->parents)
            if (seen.insert(p.get()).second) stack.push_back(p.get());
    }
    std::sort(order.begin(), order.end(),
              [](const Node* x, const Node* y) { return x->id > y->id; });

    // Scan leaves-first so the error names the op where the bad value originated,
    // not a downstream op it flowed through.
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        for (std::size_t i = 0; i < (*it)->data.v.size(); ++i)
            if (!std::isfinite((*it)->data.v[i]))
                throw std::runtime_error(std::string("backward: non-finite value produced by '") +
                                         (*it)->op + "' at index " + std::to_string(i));

    r->adjoint = Array(r->data.shape, 1.0);
    for (Node* n : order) {
        if (!n->adjoint) continue;
        if (n->requires_grad) {
            if (!n->grad) n->grad = Array(n->data.shape, 0.0);
            for (std::size_t i = 0; i < n->grad->v.size(); ++i) n->grad->v[i] += n->adjoint->v[i];
        }
        if (n->backprop) n->backprop(*n);
    }
    for (Node* n : order) n->adjoint.reset();
}

Array grad_of(const Value& leaf) {
    const NodePtr& n = Access::node(leaf);
    if (!n->requires_grad)
        throw std::invalid_argument("grad_of: value is not a requires_grad leaf");
    return n->grad ? *n->grad : Array(n->data.shape, 0.0);
}

void zero_grads(std::span<const Value> leaves) {
    for (const Value& v : leaves) {
        const NodePtr& n = Access::node(v);
        if (!n->requires_grad)
            throw std::invalid_argument("zero_grads: value is not a requires_grad leaf");
        n->grad.reset();
    }
}

}  // namespace fuzzygrad
