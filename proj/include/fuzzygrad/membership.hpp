#pragma once

#include <string>
#include <vector>

#include "fuzzygrad/autodiff.hpp"

namespace fuzzygrad {

enum class MfKind { trapezoid, gaussian, gbell };

std::string to_string(MfKind kind);
MfKind mf_kind_from_string(const std::string& name);  // throws on unknown kind

// A parametrized differentiable map from crisp inputs to membership grades.
// Parameters are scalar Values; mark one requires_grad and the grades become
// differentiable with respect to it.
struct MembershipFunction {
    MfKind kind = MfKind::trapezoid;
    std::vector<Value> params;
    std::string label;
};

// Trapezoid with breakpoints a <= b <= c <= d and plateau height h in (0, 1].
// params = {a, b, c, d} or {a, b, c, d, h}; h defaults to 1. Degenerate
// shoulders (a == b, c == d) produce vertical edges.
MembershipFunction trapmf(std::vector<Value> params, std::string label = {});

// params = {sigma, c} with sigma > 0.
MembershipFunction gaussmf(std::vector<Value> params, std::string label = {});

// Generalized bell 1 / (1 + |(x - c) / a|^(2b)); params = {a, b, c},
// a != 0, b > 0.
MembershipFunction gbellmf(std::vector<Value> params, std::string label = {});

// Dispatch by name: "trapmf", "gaussmf", "gbellmf".
MembershipFunction genmf(const std::string& kind, std::vector<Value> params,
                         std::string label = {});
MembershipFunction genmf(const std::string& kind, const std::vector<double>& params,
                         std::string label = {});

// Membership grades of x under mf; same shape as x.
Value evalmf(const Value& x, const MembershipFunction& mf);
Value evalmf(const std::vector<double>& x, const MembershipFunction& mf);

}  // namespace fuzzygrad
