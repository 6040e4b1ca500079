#include "fuzzygrad/reparam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fuzzygrad {

std::size_t ReparamLayout::total() const {
    std::size_t n = 0;
    for (std::size_t c : chains) n += c;
    return n;
}

static void check_layout(const ReparamLayout& layout) {
    if (layout.chains.empty()) throw std::invalid_argument("reparam: layout has no chains");
    for (std::size_t c : layout.chains)
        if (c == 0) throw std::invalid_argument("reparam: empty chain in layout");
}

std::vector<double> get_psi(std::span<const double> theta, const ReparamLayout& layout) {
    check_layout(layout);
    if (theta.size() != layout.total())
        throw std::invalid_argument("get_psi: expected " + std::to_string(layout.total()) +
                                    " breakpoints, got " + std::to_string(theta.size()));
    std::vector<double> psi;
    psi.reserve(theta.size());
    std::size_t k = 0;
    for (std::size_t chain : layout.chains) {
        double prev_t = 0.0;
        for (std::size_t j = 0; j < chain; ++j, ++k) {
            const double th = theta[k];
            if (!(th > 0.0 && th < 1.0))
                throw std::invalid_argument("get_psi: breakpoint " + std::to_string(k + 1) +
                                            " must lie in (0, 1), got " + std::to_string(th));
            const double t = std::log(th / (1.0 - th));
            if (j == 0) {
                psi.push_back(t);
            } else {
                if (!(t > prev_t))
                    throw std::invalid_argument(
                        "get_psi: breakpoints must be strictly increasing within a chain; "
                        "breakpoint " +
                        std::to_string(k + 1) + " (" + std::to_string(th) +
                        ") does not exceed its predecessor");
                // inverse of softplus: log(exp(t - prev_t) - 1)
                psi.push_back(std::log(std::expm1(t - prev_t)));
            }
            prev_t = t;
        }
    }
    return psi;
}

std::vector<Value> get_theta(const ReparamVector& rv) {
    check_layout(rv.layout);
    if (rv.psi.size() != rv.layout.total())
        throw std::invalid_argument("get_theta: expected " + std::to_string(rv.layout.total()) +
                                    " psi entries, got " + std::to_string(rv.psi.size()));
    for (const Value& p : rv.psi)
        if (p.size() != 1)
            throw std::invalid_argument("get_theta: psi entries must be scalars");
    std::vector<Value> theta;
    theta.reserve(rv.psi.size());
    std::size_t k = 0;
    for (std::size_t chain : rv.layout.chains) {
        Value t;
        for (std::size_t j = 0; j < chain; ++j, ++k) {
            const Value& p = rv.psi[k];
            t = (j == 0) ? p : add(t, log(add(Value(1.0), exp(p))));
            theta.push_back(div(Value(1.0), add(Value(1.0), exp(neg(t)))));
        }
    }
    return theta;
}

ReparamVector make_reparam(std::span<const double> theta, const ReparamLayout& layout) {
    std::vector<double> psi = get_psi(theta, layout);
    ReparamVector rv;
    rv.layout = layout;
    rv.psi.reserve(psi.size());
    for (double p : psi) rv.psi.push_back(make_scalar(p, true));
    return rv;
}

}  // namespace fuzzygrad
