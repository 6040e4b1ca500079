#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fuzzygrad/autodiff.hpp"

namespace fuzzygrad {

// Grouping of ordered breakpoint slots into independent chains. Breakpoints
// within a chain must stay strictly increasing; separate chains are free.
struct ReparamLayout {
    std::vector<std::size_t> chains;

    std::size_t total() const;
};

// Unconstrained scalar leaves; get_theta maps them chain by chain onto
// strictly increasing breakpoints in (0, 1):
//   t_1 = psi_1,  t_j = t_{j-1} + softplus(psi_j),  theta_j = logistic(t_j)
struct ReparamVector {
    std::vector<Value> psi;
    ReparamLayout layout;
};

// Inverse map on plain numbers. Requires every theta in (0, 1) and each
// chain strictly increasing.
std::vector<double> get_psi(std::span<const double> theta, const ReparamLayout& layout);

// Differentiable forward map; one scalar Value per breakpoint.
std::vector<Value> get_theta(const ReparamVector& rv);

// Convenience: psi leaves (requires_grad) positioned so that
// get_theta(make_reparam(theta, layout)) reproduces theta.
ReparamVector make_reparam(std::span<const double> theta, const ReparamLayout& layout);

}  // namespace fuzzygrad
