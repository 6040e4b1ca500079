#include "fuzzygrad/fis.hpp"

#include <cmath>
#include <stdexcept>

namespace fuzzygrad {

std::string to_string(TNorm t) { return t == TNorm::min ? "min" : "prod"; }
std::string to_string(SNorm s) { return s == SNorm::max ? "max" : "probor"; }
std::string to_string(ImpMethod m) { return m == ImpMethod::min ? "min" : "prod"; }
std::string to_string(AggMethod) { return "max"; }
std::string to_string(DefuzzMethod) { return "centroid"; }

TNorm tnorm_from_string(const std::string& s) {
    if (s == "min") return TNorm::min;
    if (s == "prod") return TNorm::prod;
    throw std::invalid_argument("unsupported and method '" + s + "' (expected \"min\" or \"prod\")");
}

SNorm snorm_from_string(const std::string& s) {
    if (s == "max") return SNorm::max;
    if (s == "probor") return SNorm::probor;
    throw std::invalid_argument("unsupported or method '" + s +
                                "' (expected \"max\" or \"probor\")");
}

ImpMethod imp_from_string(const std::string& s) {
    if (s == "min") return ImpMethod::min;
    if (s == "prod") return ImpMethod::prod;
    throw std::invalid_argument("unsupported implication method '" + s +
                                "' (expected \"min\" or \"prod\")");
}

AggMethod agg_from_string(const std::string& s) {
    if (s == "max") return AggMethod::max;
    throw std::invalid_argument("unsupported aggregation method '" + s + "' (expected \"max\")");
}

DefuzzMethod defuzz_from_string(const std::string& s) {
    if (s == "centroid") return DefuzzMethod::centroid;
    throw std::invalid_argument("unsupported defuzzification method '" + s +
                                "' (expected \"centroid\")");
}

// ------------------------------------------------------------ builders

Fis newfis(std::string name, const std::string& and_method, const std::string& or_method,
           const std::string& imp_method, const std::string& agg_method,
           const std::string& defuzz_method) {
    Fis fis;
    fis.name = std::move(name);
    fis.and_method = tnorm_from_string(and_method);
    fis.or_method = snorm_from_string(or_method);
    fis.imp_method = imp_from_string(imp_method);
    fis.agg_method = agg_from_string(agg_method);
    fis.defuzz_method = defuzz_from_string(defuzz_method);
    return fis;
}

static bool is_input_io(const std::string& io, const char* who) {
    if (io == "input") return true;
    if (io == "output") return false;
    throw std::invalid_argument(std::string(who) + ": io must be \"input\" or \"output\", got '" +
                                io + "'");
}

Fis addvar(Fis fis, const std::string& io, std::string name, double lo, double hi) {
    if (!(lo < hi))
        throw std::invalid_argument("addvar: range must satisfy lo < hi, got [" +
                                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
    FisVariable var;
    var.name = std::move(name);
    var.range_lo = lo;
    var.range_hi = hi;
    (is_input_io(io, "addvar") ? fis.inputs : fis.outputs).push_back(std::move(var));
    return fis;
}

static FisVariable& pick_var(Fis& fis, const std::string& io, std::size_t var_index,
                             const char* who) {
    auto& vars = is_input_io(io, who) ? fis.inputs : fis.outputs;
    if (var_index < 1 || var_index > vars.size())
        throw std::invalid_argument(std::string(who) + ": no " + io + " variable " +
                                    std::to_string(var_index) + " (have " +
                                    std::to_string(vars.size()) + ")");
    return vars[var_index - 1];
}

Fis addmf(Fis fis, const std::string& io, std::size_t var_index, std::string label,
          const std::string& mf_kind, std::vector<Value> params) {
    FisVariable& var = pick_var(fis, io, var_index, "addmf");
    for (const MembershipFunction& mf : var.mfs)
        if (mf.label == label)
            throw std::invalid_argument("addmf: duplicate label '" + label + "' on " + io +
                                        " variable " + std::to_string(var_index));
    var.mfs.push_back(genmf(mf_kind, std::move(params), std::move(label)));
    return fis;
}

Fis addmf(Fis fis, const std::string& io, std::size_t var_index, std::string label,
          const std::string& mf_kind, const std::vector<double>& params) {
    std::vector<Value> vs;
    vs.reserve(params.size());
    for (double p : params) vs.emplace_back(p);
    return addmf(std::move(fis), io, var_index, std::move(label), mf_kind, std::move(vs));
}

static int rule_entry_as_index(double x, std::size_t row, std::size_t col) {
    if (!(x == std::floor(x)) || std::abs(x) > 1e9)
        throw std::invalid_argument("addrule: entry at row " + std::to_string(row + 1) +
                                    ", column " + std::to_string(col + 1) +
                                    " must be an integer, got " + std::to_string(x));
    return static_cast<int>(x);
}

Fis addrule(Fis fis, const std::vector<std::vector<double>>& rule_matrix) {
    const std::size_t nin = fis.inputs.size(), nout = fis.outputs.size();
    const std::size_t width = nin + nout + 2;
    std::vector<Rule> parsed;
    parsed.reserve(rule_matrix.size());
    for (std::size_t r = 0; r < rule_matrix.size(); ++r) {
        const auto& row = rule_matrix[r];
        if (row.size() != width)
            throw std::invalid_argument("addrule: row " + std::to_string(r + 1) + " has " +
                                        std::to_string(row.size()) + " entries, expected " +
                                        std::to_string(width) +
                                        " (inputs + outputs + weight + connective)");
        Rule rule;
        for (std::size_t i = 0; i < nin; ++i) {
            int m = rule_entry_as_index(row[i], r, i);
            int have = static_cast<int>(fis.inputs[i].mfs.size());
            if (m < 0 || m > have)
                throw std::invalid_argument(
                    "addrule: rule " + std::to_string(r + 1) + " references MF " +
                    std::to_string(m) + " of input " + std::to_string(i + 1) + ", which has " +
                    std::to_string(have) + " MFs");
            rule.antecedents.push_back(m);
        }
        for (std::size_t o = 0; o < nout; ++o) {
            int m = rule_entry_as_index(row[nin + o], r, nin + o);
            int have = static_cast<int>(fis.outputs[o].mfs.size());
            if (m < 1 || m > have)
                throw std::invalid_argument(
                    "addrule: rule " + std::to_string(r + 1) + " references MF " +
                    std::to_string(m) + " of output " + std::to_string(o + 1) + ", which has " +
                    std::to_string(have) + " MFs");
            rule.consequents.push_back(m);
        }
        rule.weight = row[nin + nout];
        if (!(rule.weight > 0.0 && rule.weight <= 1.0))
            throw std::invalid_argument("addrule: rule " + std::to_string(r + 1) +
                                        " weight must be in (0, 1], got " +
                                        std::to_string(rule.weight));
        int code = rule_entry_as_index(row[nin + nout + 1], r, nin + nout + 1);
        if (code != 1 && code != 2)
            throw std::invalid_argument("addrule: rule " + std::to_string(r + 1) +
                                        " connective must be 1 (AND) or 2 (OR), got " +
                                        std::to_string(code));
        rule.connective = static_cast<Connective>(code);
        parsed.push_back(std::move(rule));
    }
    for (Rule& rule : parsed) fis.rules.push_back(std::move(rule));
    return fis;
}

// ----------------------------------------------------------- inference

static Value tnorm_combine(TNorm t, const Value& a, const Value& b) {
    return t == TNorm::min ? minimum(a, b) : mul(a, b);
}

static Value snorm_combine(SNorm s, const Value& a, const Value& b) {
    return s == SNorm::max ? maximum(a, b) : sub(add(a, b), mul(a, b));
}

Value rule_firing(const Fis& fis, const std::vector<std::vector<Value>>& grades,
                  const Rule& rule) {
    if (grades.size() != fis.inputs.size() || rule.antecedents.size() != fis.inputs.size())
        throw std::invalid_argument("rule_firing: grades/antecedents do not match the inputs");
    const bool is_and = rule.connective == Connective::and_rule;
    Value acc;
    bool have = false;
    for (std::size_t i = 0; i < rule.antecedents.size(); ++i) {
        int m = rule.antecedents[i];
        if (m == 0) continue;  // don't care: the connective's identity
        if (static_cast<std::size_t>(m) > grades[i].size())
            throw std::invalid_argument("rule_firing: missing grade for MF " + std::to_string(m) +
                                        " of input " + std::to_string(i + 1));
        const Value& g = grades[i][static_cast<std::size_t>(m) - 1];
        if (!have) {
            acc = g;
            have = true;
        } else {
            acc = is_and ? tnorm_combine(fis.and_method, acc, g)
                         : snorm_combine(fis.or_method, acc, g);
        }
    }
    if (!have) acc = Value(is_and ? 1.0 : 0.0);
    if (rule.weight != 1.0) acc = mul(acc, Value(rule.weight));
    return acc;
}

Value aggregate_output(const Fis& fis, std::span<const Value> firings,
                       std::span<const Value> mu_by_mf, std::size_t out_index) {
    if (firings.size() != fis.rules.size())
        throw std::invalid_argument("aggregate_output: expected one firing per rule");
    if (out_index >= fis.outputs.size())
        throw std::invalid_argument("aggregate_output: no output " + std::to_string(out_index + 1));
    if (fis.rules.empty()) throw std::invalid_argument("aggregate_output: system has no rules");
    Value agg;
    for (std::size_t r = 0; r < fis.rules.size(); ++r) {
        int m = fis.rules[r].consequents[out_index];
        const Value& mu = mu_by_mf[static_cast<std::size_t>(m) - 1];
        Value implicated = fis.imp_method == ImpMethod::min ? minimum(firings[r], mu)
                                                            : mul(firings[r], mu);
        agg = (r == 0) ? implicated : maximum(agg, implicated);
    }
    return agg;
}

std::vector<double> defuzz_grid(double lo, double hi, int points) {
    if (points < 1)
        throw std::invalid_argument("defuzz_grid: points must be >= 1, got " +
                                    std::to_string(points));
    if (!(lo < hi)) throw std::invalid_argument("defuzz_grid: range must satisfy lo < hi");
    std::vector<double> grid(static_cast<std::size_t>(points));
    const double step = (hi - lo) / points;
    for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = lo + (i + 0.5) * step;
    return grid;
}

Value defuzz_centroid(std::span<const double> grid, const Value& mu, bool* degenerate) {
    if (grid.empty() || mu.size() != grid.size())
        throw std::invalid_argument("defuzz_centroid: grid and grades must have the same size");
    if (degenerate) *degenerate = false;
    Value total = sum(mu);
    if (total.item() < 1e-12) {
        if (degenerate) *degenerate = true;
        return Value((grid.front() + grid.back()) / 2.0);
    }
    Value z = make_value(std::vector<double>(grid.begin(), grid.end()));
    return div(sum(mul(mu, z)), total);
}

// Structural checks shared by evaluation entry points.
static void check_evaluable(const Fis& fis) {
    if (fis.inputs.empty()) throw std::invalid_argument("evalfis: system has no input variables");
    if (fis.outputs.size() != 1)
        throw std::invalid_argument("evalfis: exactly one output variable is supported, got " +
                                    std::to_string(fis.outputs.size()));
    if (fis.rules.empty()) throw std::invalid_argument("evalfis: system has no rules");
    for (std::size_t r = 0; r < fis.rules.size(); ++r) {
        const Rule& rule = fis.rules[r];
        if (rule.antecedents.size() != fis.inputs.size() ||
            rule.consequents.size() != fis.outputs.size())
            throw std::invalid_argument("evalfis: rule " + std::to_string(r + 1) +
                                        " does not match the variable counts");
        for (std::size_t i = 0; i < rule.antecedents.size(); ++i)
            if (rule.antecedents[i] < 0 ||
                static_cast<std::size_t>(rule.antecedents[i]) > fis.inputs[i].mfs.size())
                throw std::invalid_argument("evalfis: rule " + std::to_string(r + 1) +
                                            " has an out-of-range antecedent");
        for (std::size_t o = 0; o < rule.consequents.size(); ++o)
            if (rule.consequents[o] < 1 ||
                static_cast<std::size_t>(rule.consequents[o]) > fis.outputs[o].mfs.size())
                throw std::invalid_argument("evalfis: rule " + std::to_string(r + 1) +
                                            " has an out-of-range consequent");
    }
}

Value evalfis(const Matrix& inputs, const Fis& fis, int grid_points, EvalDiagnostics* diag) {
    check_evaluable(fis);
    if (inputs.rows == 0) throw std::invalid_argument("evalfis: no input rows");
    if (inputs.cols != fis.inputs.size())
        throw std::invalid_argument("evalfis: expected " + std::to_string(fis.inputs.size()) +
                                    " input columns, got " + std::to_string(inputs.cols));
    if (diag) *diag = {};

    const FisVariable& out_var = fis.outputs[0];
    const std::vector<double> grid = defuzz_grid(out_var.range_lo, out_var.range_hi, grid_points);
    const Value grid_x = make_value(grid);

    // The output MF grid grades do not depend on the row, so they are built
    // once and shared by every row of the batch.
    std::vector<Value> mu_by_mf;
    mu_by_mf.reserve(out_var.mfs.size());
    for (const MembershipFunction& mf : out_var.mfs) mu_by_mf.push_back(evalmf(grid_x, mf));

    std::vector<Value> rows_out;
    rows_out.reserve(inputs.rows);
    for (std::size_t r = 0; r < inputs.rows; ++r) {
        std::vector<std::vector<Value>> grades(fis.inputs.size());
        for (std::size_t i = 0; i < fis.inputs.size(); ++i) {
            double x = inputs.at(r, i);
            if (!std::isfinite(x))
                throw std::invalid_argument("evalfis: non-finite input at row " +
                                            std::to_string(r + 1) + ", column " +
                                            std::to_string(i + 1));
            const FisVariable& var = fis.inputs[i];
            if (x < var.range_lo) {
                x = var.range_lo;
                if (diag) ++diag->clamped_inputs;
            } else if (x > var.range_hi) {
                x = var.range_hi;
                if (diag) ++diag->clamped_inputs;
            }
            const Value xi(x);
            grades[i].reserve(var.mfs.size());
            for (const MembershipFunction& mf : var.mfs) grades[i].push_back(evalmf(xi, mf));
        }
        std::vector<Value> firings;
        firings.reserve(fis.rules.size());
        for (const Rule& rule : fis.rules) firings.push_back(rule_firing(fis, grades, rule));
        Value agg = aggregate_output(fis, firings, mu_by_mf);
        bool degenerate = false;
        Value y = defuzz_centroid(grid, agg, &degenerate);
        if (degenerate && diag) ++diag->degenerate_rows;
        rows_out.push_back(y);
    }
    return stack_rows(rows_out);
}

std::vector<MfCurvePoint> sample_mf_curves(const Fis& fis, const std::string& io,
                                           std::size_t var_index, int points) {
    if (points < 2)
        throw std::invalid_argument("sample_mf_curves: need at least 2 points, got " +
                                    std::to_string(points));
    Fis probe = fis;  // pick_var needs a mutable system; the copy is cheap
    const FisVariable& var = pick_var(probe, io, var_index, "sample_mf_curves");
    std::vector<double> xs(static_cast<std::size_t>(points));
    const double step = (var.range_hi - var.range_lo) / (points - 1);
    for (int j = 0; j < points; ++j) xs[static_cast<std::size_t>(j)] = var.range_lo + j * step;
    std::vector<MfCurvePoint> out;
    out.reserve(var.mfs.size() * xs.size());
    for (const MembershipFunction& mf : var.mfs) {
        Value mu = evalmf(xs, mf);
        for (std::size_t j = 0; j < xs.size(); ++j)
            out.push_back({xs[j], mf.label, mu.data()[j]});
    }
    return out;
}

std::vector<SurfacePoint> gensurf(const Fis& fis, int grid_n, int grid_points) {
    if (fis.inputs.size() != 2 || fis.outputs.size() != 1)
        throw std::invalid_argument("gensurf: requires exactly two inputs and one output");
    if (grid_n < 2)
        throw std::invalid_argument("gensurf: grid_n must be >= 2, got " + std::to_string(grid_n));
    const std::size_t n = static_cast<std::size_t>(grid_n);
    const double lo1 = fis.inputs[0].range_lo, hi1 = fis.inputs[0].range_hi;
    const double lo2 = fis.inputs[1].range_lo, hi2 = fis.inputs[1].range_hi;
    Matrix probe(n * n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = lo1 + i * (hi1 - lo1) / (grid_n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            probe.at(i * n + j, 0) = x1;
            probe.at(i * n + j, 1) = lo2 + j * (hi2 - lo2) / (grid_n - 1);
        }
    }
    Value y = evalfis(probe, fis, grid_points);
    std::vector<SurfacePoint> out;
    out.reserve(n * n);
    for (std::size_t k = 0; k < n * n; ++k)
        out.push_back({probe.at(k, 0), probe.at(k, 1), y.data()[k]});
    return out;
}

}  // namespace fuzzygrad
