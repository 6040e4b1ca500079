#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fuzzygrad/membership.hpp"

namespace fuzzygrad {

enum class TNorm { min, prod };
enum class SNorm { max, probor };
enum class ImpMethod { min, prod };
enum class AggMethod { max };
enum class DefuzzMethod { centroid };
enum class Connective { and_rule = 1, or_rule = 2 };

std::string to_string(TNorm t);
std::string to_string(SNorm s);
std::string to_string(ImpMethod m);
std::string to_string(AggMethod m);
std::string to_string(DefuzzMethod m);
TNorm tnorm_from_string(const std::string& s);
SNorm snorm_from_string(const std::string& s);
ImpMethod imp_from_string(const std::string& s);
AggMethod agg_from_string(const std::string& s);
DefuzzMethod defuzz_from_string(const std::string& s);

struct FisVariable {
    std::string name;
    double range_lo = 0.0;
    double range_hi = 1.0;
    std::vector<MembershipFunction> mfs;
};

struct Rule {
    std::vector<int> antecedents;  // 1-based MF index per input; 0 = don't care
    std::vector<int> consequents;  // 1-based MF index per output
    double weight = 1.0;           // in (0, 1]
    Connective connective = Connective::and_rule;
};

struct Fis {
    std::string name;
    TNorm and_method = TNorm::min;
    SNorm or_method = SNorm::max;
    ImpMethod imp_method = ImpMethod::min;
    AggMethod agg_method = AggMethod::max;
    DefuzzMethod defuzz_method = DefuzzMethod::centroid;
    std::vector<FisVariable> inputs;
    std::vector<FisVariable> outputs;
    std::vector<Rule> rules;
};

// Builders take the system by value and return the extended copy; the
// argument is never mutated. Method names follow the usual conventions:
// and: "min" | "prod", or: "max" | "probor", imp: "min" | "prod",
// agg: "max", defuzz: "centroid".
Fis newfis(std::string name, const std::string& and_method = "min",
           const std::string& or_method = "max", const std::string& imp_method = "min",
           const std::string& agg_method = "max", const std::string& defuzz_method = "centroid");

// io is "input" or "output"; the range must satisfy lo < hi.
Fis addvar(Fis fis, const std::string& io, std::string name, double lo, double hi);

// var_index is 1-based. Labels must be unique within a variable.
Fis addmf(Fis fis, const std::string& io, std::size_t var_index, std::string label,
          const std::string& mf_kind, std::vector<Value> params);
Fis addmf(Fis fis, const std::string& io, std::size_t var_index, std::string label,
          const std::string& mf_kind, const std::vector<double>& params);

// Each row: one antecedent entry per input (1-based MF index, 0 = don't
// care), one consequent entry per output, then weight in (0, 1] and the
// connective code (1 = AND, 2 = OR).
Fis addrule(Fis fis, const std::vector<std::vector<double>>& rule_matrix);

struct EvalDiagnostics {
    std::size_t degenerate_rows = 0;  // rows defuzzified with zero rule cover
    std::size_t clamped_inputs = 0;   // input cells clamped into their range
};

// Firing strength of one rule. grades[i][m] is the grade of input i under
// its (1-based) MF m+1; don't-care antecedents contribute the connective's
// identity.
Value rule_firing(const Fis& fis, const std::vector<std::vector<Value>>& grades,
                  const Rule& rule);

// Max-aggregate the implicated consequent sets of all rules over the output
// grid. mu_by_mf[m] holds the grid grades of output MF m+1.
Value aggregate_output(const Fis& fis, std::span<const Value> firings,
                       std::span<const Value> mu_by_mf, std::size_t out_index = 0);

// Cell centers of a uniform grid over [lo, hi].
std::vector<double> defuzz_grid(double lo, double hi, int points);

// Discrete centroid sum(mu * z) / sum(mu). Near-zero total mass falls back
// to the grid midpoint; *degenerate reports whether that happened.
Value defuzz_centroid(std::span<const double> grid, const Value& mu, bool* degenerate = nullptr);

// Evaluate the system on a batch of rows (one column per input variable).
// Out-of-range inputs are clamped. Returns one crisp output per row; the
// result is assembled row by row, so a batch call and the per-row calls
// agree bit for bit.
Value evalfis(const Matrix& inputs, const Fis& fis, int grid_points = 501,
              EvalDiagnostics* diag = nullptr);

struct MfCurvePoint {
    double x = 0.0;
    std::string label;
    double mu = 0.0;
};

// Sample every MF of one variable on an endpoint-inclusive uniform grid,
// ordered MF by MF.
std::vector<MfCurvePoint> sample_mf_curves(const Fis& fis, const std::string& io,
                                           std::size_t var_index, int points);

struct SurfacePoint {
    double x1 = 0.0;
    double x2 = 0.0;
    double y = 0.0;
};

// Crisp output over a grid_n x grid_n input grid; requires exactly two
// inputs and one output.
std::vector<SurfacePoint> gensurf(const Fis& fis, int grid_n = 21, int grid_points = 501);

}  // namespace fuzzygrad
