#include "fuzzygrad/membership.hpp"

#include <stdexcept>

namespace fuzzygrad {

std::string to_string(MfKind kind) {
    switch (kind) {
        case MfKind::trapezoid: return "trapmf";
        case MfKind::gaussian: return "gaussmf";
        case MfKind::gbell: return "gbellmf";
    }
    throw std::invalid_argument("to_string: bad MfKind");
}

MfKind mf_kind_from_string(const std::string& name) {
    if (name == "trapmf") return MfKind::trapezoid;
    if (name == "gaussmf") return MfKind::gaussian;
    if (name == "gbellmf") return MfKind::gbell;
    throw std::invalid_argument("mf_kind_from_string: unknown membership kind '" + name + "'");
}

static void check_scalar_params(const char* who, const std::vector<Value>& params) {
    for (const Value& p : params)
        if (p.size() != 1)
            throw std::invalid_argument(std::string(who) + ": params must be scalars, got " +
                                        to_string(p.shape()));
}

MembershipFunction trapmf(std::vector<Value> params, std::string label) {
    if (params.size() != 4 && params.size() != 5)
        throw std::invalid_argument("trapmf: expected {a, b, c, d} or {a, b, c, d, h}, got " +
                                    std::to_string(params.size()) + " params");
    check_scalar_params("trapmf", params);
    const double a = params[0].item(), b = params[1].item();
    const double c = params[2].item(), d = params[3].item();
    auto ordered = [](const char* lhs, double lo, const char* rhs, double hi) {
        if (lo > hi)
            throw std::invalid_argument(std::string("trapmf: breakpoints must satisfy ") + lhs +
                                        " <= " + rhs + ", got " + lhs + "=" + std::to_string(lo) +
                                        ", " + rhs + "=" + std::to_string(hi));
    };
    ordered("a", a, "b", b);
    ordered("b", b, "c", c);
    ordered("c", c, "d", d);
    if (params.size() == 5) {
        const double h = params[4].item();
        if (!(h > 0.0 && h <= 1.0))
            throw std::invalid_argument("trapmf: height must be in (0, 1], got " +
                                        std::to_string(h));
    }
    return {MfKind::trapezoid, std::move(params), std::move(label)};
}

MembershipFunction gaussmf(std::vector<Value> params, std::string label) {
    if (params.size() != 2)
        throw std::invalid_argument("gaussmf: expected {sigma, c}, got " +
                                    std::to_string(params.size()) + " params");
    check_scalar_params("gaussmf", params);
    if (!(params[0].item() > 0.0))
        throw std::invalid_argument("gaussmf: sigma must be positive, got " +
                                    std::to_string(params[0].item()));
    return {MfKind::gaussian, std::move(params), std::move(label)};
}

MembershipFunction gbellmf(std::vector<Value> params, std::string label) {
    if (params.size() != 3)
        throw std::invalid_argument("gbellmf: expected {a, b, c}, got " +
                                    std::to_string(params.size()) + " params");
    check_scalar_params("gbellmf", params);
    if (params[0].item() == 0.0)
        throw std::invalid_argument("gbellmf: width a must be nonzero");
    if (!(params[1].item() > 0.0))
        throw std::invalid_argument("gbellmf: slope b must be positive, got " +
                                    std::to_string(params[1].item()));
    return {MfKind::gbell, std::move(params), std::move(label)};
}

MembershipFunction genmf(const std::string& kind, std::vector<Value> params, std::string label) {
    switch (mf_kind_from_string(kind)) {
        case MfKind::trapezoid: return trapmf(std::move(params), std::move(label));
        case MfKind::gaussian: return gaussmf(std::move(params), std::move(label));
        case MfKind::gbell: return gbellmf(std::move(params), std::move(label));
    }
    throw std::invalid_argument("genmf: unknown membership kind '" + kind + "'");
}

MembershipFunction genmf(const std::string& kind, const std::vector<double>& params,
                         std::string label) {
    std::vector<Value> vs;
    vs.reserve(params.size());
    for (double p : params) vs.emplace_back(p);
    return genmf(kind, std::move(vs), std::move(label));
}

// Piecewise trapezoid as masked selects over disjoint regions: rising edge on
// (a, b), plateau on [b, c], falling edge on (c, d), zero elsewhere. A
// degenerate shoulder skips its edge branch entirely, so no division by zero
// ever enters the graph and vertical edges stay differentiable in the
// remaining parameters.
static Value eval_trapezoid(const Value& x, const MembershipFunction& mf) {
    const Value& a = mf.params[0];
    const Value& b = mf.params[1];
    const Value& c = mf.params[2];
    const Value& d = mf.params[3];
    const Value h = mf.params.size() == 5 ? mf.params[4] : Value(1.0);

    Value y(0.0);
    if (c.item() != d.item()) {
        Mask falling = gt(x, c) & lt(x, d);
        y = where_select(falling, minimum(div(sub(d, x), sub(d, c)), h), y);
    }
    Mask plateau = ge(x, b) & le(x, c);
    y = where_select(plateau, h, y);
    if (a.item() != b.item()) {
        Mask rising = gt(x, a) & lt(x, b);
        y = where_select(rising, minimum(div(sub(x, a), sub(b, a)), h), y);
    }
    return y;
}

static Value eval_gaussian(const Value& x, const MembershipFunction& mf) {
    const Value& sigma = mf.params[0];
    const Value& c = mf.params[1];
    return exp(neg(div(square(sub(x, c)), mul(Value(2.0), square(sigma)))));
}

// |u|^(2b) computed as exp(b log(u^2)); the tiny floor keeps log defined at
// u = 0 while leaving the grade there exactly 1.
static Value eval_gbell(const Value& x, const MembershipFunction& mf) {
    const Value& a = mf.params[0];
    const Value& b = mf.params[1];
    const Value& c = mf.params[2];
    Value t = square(div(sub(x, c), a));
    Value p = exp(mul(b, log(maximum(t, Value(1e-300)))));
    return div(Value(1.0), add(Value(1.0), p));
}

Value evalmf(const Value& x, const MembershipFunction& mf) {
    switch (mf.kind) {
        case MfKind::trapezoid: return eval_trapezoid(x, mf);
        case MfKind::gaussian: return eval_gaussian(x, mf);
        case MfKind::gbell: return eval_gbell(x, mf);
    }
    throw std::invalid_argument("evalmf: bad MfKind");
}

Value evalmf(const std::vector<double>& x, const MembershipFunction& mf) {
    return evalmf(make_value(x), mf);
}

}  // namespace fuzzygrad
