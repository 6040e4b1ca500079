#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "fuzzygrad/fis.hpp"
#include "fuzzygrad/fis_json.hpp"
#include "testutil.hpp"

using namespace fuzzygrad;
using testutil::centroid_reference;
using testutil::message_of;
using testutil::TempDir;

namespace {

// Three-MF Iris classifier over normalized petal length/width.
Fis make_iris() {
    Fis f = newfis("iris", "prod", "max", "prod", "max", "centroid");
    f = addvar(std::move(f), "input", "Petal.Length", 0.0, 1.0);
    f = addvar(std::move(f), "input", "Petal.Width", 0.0, 1.0);
    f = addvar(std::move(f), "output", "Species", 0.5, 3.5);
    const double th[8] = {0.1, 0.39, 0.11, 0.4, 0.6, 0.89, 0.61, 0.9};
    for (std::size_t i = 1; i <= 2; ++i) {
        f = addmf(std::move(f), "input", i, "Low", "trapmf",
                  std::vector<double>{0.0, 0.0, th[0], th[1]});
        f = addmf(std::move(f), "input", i, "Mid", "trapmf",
                  std::vector<double>{th[2], th[3], th[4], th[5]});
        f = addmf(std::move(f), "input", i, "High", "trapmf",
                  std::vector<double>{th[6], th[7], 1.0, 1.0});
    }
    f = addmf(std::move(f), "output", 1, "setosa", "trapmf",
              std::vector<double>{0.5, 0.5, 0.5, 2.0});
    f = addmf(std::move(f), "output", 1, "versicolor", "trapmf",
              std::vector<double>{0.5, 2.0, 2.0, 3.5});
    f = addmf(std::move(f), "output", 1, "virginica", "trapmf",
              std::vector<double>{2.0, 3.5, 3.5, 3.5});
    f = addrule(std::move(f), {{1, 1, 1, 1, 1},
                               {2, 2, 2, 1, 1},
                               {3, 3, 3, 1, 1},
                               {2, 3, 3, 1, 1},
                               {3, 2, 3, 1, 1}});
    return f;
}

std::vector<std::vector<Value>> fuzzify(const Fis& fis, double x1, double x2) {
    std::vector<std::vector<Value>> grades(2);
    const double xs[2] = {x1, x2};
    for (std::size_t i = 0; i < 2; ++i)
        for (const MembershipFunction& mf : fis.inputs[i].mfs)
            grades[i].push_back(evalmf(Value(xs[i]), mf));
    return grades;
}

double eval_one(const Fis& fis, double x1, double x2, int grid_points = 501,
                EvalDiagnostics* diag = nullptr) {
    Matrix m(1, 2);
    m.at(0, 0) = x1;
    m.at(0, 1) = x2;
    return evalfis(m, fis, grid_points, diag).data()[0];
}

}  // namespace

TEST_CASE("newfis applies defaults and named overrides") {
    Fis f = newfis("plant");
    CHECK(f.name == "plant");
    CHECK(f.and_method == TNorm::min);
    CHECK(f.or_method == SNorm::max);
    CHECK(f.imp_method == ImpMethod::min);
    CHECK(f.agg_method == AggMethod::max);
    CHECK(f.defuzz_method == DefuzzMethod::centroid);

    Fis g = newfis("plant", "prod", "probor", "prod", "max", "centroid");
    CHECK(g.and_method == TNorm::prod);
    CHECK(g.or_method == SNorm::probor);
    CHECK(g.imp_method == ImpMethod::prod);

    CHECK_THROWS_AS(newfis("plant", "nope"), std::invalid_argument);
    CHECK_THROWS_AS(newfis("plant", "min", "min"), std::invalid_argument);
    CHECK_THROWS_AS(newfis("plant", "min", "max", "max"), std::invalid_argument);
    CHECK_THROWS_AS(newfis("plant", "min", "max", "min", "sum"), std::invalid_argument);
    CHECK_THROWS_AS(newfis("plant", "min", "max", "min", "max", "bisector"),
                    std::invalid_argument);
}

TEST_CASE("method names round-trip") {
    CHECK(to_string(tnorm_from_string("min")) == "min");
    CHECK(to_string(tnorm_from_string("prod")) == "prod");
    CHECK(to_string(snorm_from_string("max")) == "max");
    CHECK(to_string(snorm_from_string("probor")) == "probor");
    CHECK(to_string(imp_from_string("prod")) == "prod");
    CHECK(to_string(agg_from_string("max")) == "max");
    CHECK(to_string(defuzz_from_string("centroid")) == "centroid");
}

TEST_CASE("builders extend a copy and leave the argument intact") {
    Fis base = newfis("t");
    Fis with_var = addvar(base, "input", "x", 0.0, 1.0);
    CHECK(base.inputs.empty());
    CHECK(with_var.inputs.size() == 1);
    CHECK(with_var.inputs[0].name == "x");
    CHECK(with_var.inputs[0].range_lo == 0.0);
    CHECK(with_var.inputs[0].range_hi == 1.0);

    Fis with_mf = addmf(with_var, "input", 1, "small", "trapmf",
                        std::vector<double>{0.0, 0.1, 0.2, 0.3});
    CHECK(with_var.inputs[0].mfs.empty());
    CHECK(with_mf.inputs[0].mfs.size() == 1);
    CHECK(with_mf.inputs[0].mfs[0].label == "small");

    CHECK_THROWS_AS(addvar(base, "input", "x", 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(addvar(base, "input", "x", 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(addvar(base, "between", "x", 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("addmf validates the target variable and label") {
    Fis f = addvar(newfis("t"), "input", "x", 0.0, 1.0);
    f = addmf(std::move(f), "input", 1, "small", "trapmf",
              std::vector<double>{0.0, 0.1, 0.2, 0.3});
    CHECK_THROWS_AS(addmf(f, "input", 1, "small", "trapmf",
                          std::vector<double>{0.4, 0.5, 0.6, 0.7}),
                    std::invalid_argument);  // duplicate label
    CHECK_THROWS_AS(addmf(f, "input", 2, "big", "trapmf",
                          std::vector<double>{0.4, 0.5, 0.6, 0.7}),
                    std::invalid_argument);  // no such variable
    CHECK_THROWS_AS(addmf(f, "input", 0, "big", "trapmf",
                          std::vector<double>{0.4, 0.5, 0.6, 0.7}),
                    std::invalid_argument);  // indices are 1-based
    CHECK_THROWS_AS(addmf(f, "output", 1, "y", "trapmf",
                          std::vector<double>{0.4, 0.5, 0.6, 0.7}),
                    std::invalid_argument);  // no output variable yet
    CHECK_THROWS_AS(addmf(f, "input", 1, "big", "sigmf", std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);  // unknown MF kind

    Fis g = addmf(f, "input", 1, "wide", "gaussmf", std::vector<double>{0.2, 0.5});
    CHECK(g.inputs[0].mfs.size() == 2);
    CHECK(g.inputs[0].mfs[1].kind == MfKind::gaussian);
}

TEST_CASE("addrule validates shape, ranges, and codes") {
    Fis f = make_iris();
    CHECK(f.rules.size() == 5);
    for (const Rule& r : f.rules) {
        CHECK(r.weight == 1.0);
        CHECK(r.connective == Connective::and_rule);
        CHECK(r.antecedents.size() == 2);
        CHECK(r.consequents.size() == 1);
    }
    CHECK(f.rules[3].antecedents == std::vector<int>{2, 3});
    CHECK(f.rules[3].consequents == std::vector<int>{3});

    Fis base = make_iris();
    CHECK_THROWS_AS(addrule(base, {{1, 1, 1, 1}}), std::invalid_argument);  // short row
    CHECK(message_of([&] { addrule(base, {{1, 1, 1, 1, 1}, {1, 1, 1, 1}}); })
              .find("row 2") != std::string::npos);
    CHECK_THROWS_AS(addrule(base, {{1.5, 1, 1, 1, 1}}), std::invalid_argument);  // fractional
    CHECK_THROWS_AS(addrule(base, {{4, 1, 1, 1, 1}}), std::invalid_argument);   // no MF 4
    CHECK_THROWS_AS(addrule(base, {{-1, 1, 1, 1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(addrule(base, {{1, 1, 0, 1, 1}}), std::invalid_argument);  // consequent 0
    CHECK_THROWS_AS(addrule(base, {{1, 1, 1, 0, 1}}), std::invalid_argument);  // weight 0
    CHECK_THROWS_AS(addrule(base, {{1, 1, 1, 2, 1}}), std::invalid_argument);  // weight > 1
    CHECK_THROWS_AS(addrule(base, {{1, 1, 1, 1, 3}}), std::invalid_argument);  // bad connective
    CHECK(base.rules.size() == 5);  // failed calls never mutate the argument

    Fis g = addrule(base, {{0, 2, 2, 0.5, 2}});  // don't care + OR + fractional weight
    CHECK(g.rules.size() == 6);
    CHECK(g.rules[5].antecedents == std::vector<int>{0, 2});
    CHECK(g.rules[5].weight == 0.5);
    CHECK(g.rules[5].connective == Connective::or_rule);
}

TEST_CASE("rule firing anchors on the iris system") {
    Fis f = make_iris();

    auto firing = [&](double x1, double x2, std::size_t rule) {
        return rule_firing(f, fuzzify(f, x1, x2), f.rules[rule]).item();
    };
    // Both petals tiny: only the setosa rule fires, and at full strength.
    CHECK(firing(0.05, 0.05, 0) == 1.0);
    for (std::size_t r = 1; r < 5; ++r) CHECK(firing(0.05, 0.05, r) == 0.0);
    // Both petals mid-range: only the versicolor rule fires.
    CHECK(firing(0.5, 0.5, 1) == 1.0);
    CHECK(firing(0.5, 0.5, 0) == 0.0);
    CHECK(firing(0.5, 0.5, 2) == 0.0);
    // Mixed point: prod-AND multiplies the two grades.
    double g1 = evalmf(std::vector<double>{0.3}, f.inputs[0].mfs[1]).data()[0];
    double g2 = evalmf(std::vector<double>{0.7}, f.inputs[1].mfs[1]).data()[0];
    CHECK(firing(0.3, 0.7, 1) == doctest::Approx(g1 * g2).epsilon(1e-12));
}

TEST_CASE("rule firing honours connectives, weights, and don't-cares") {
    Fis f = make_iris();
    f = addrule(std::move(f), {{0, 2, 2, 1, 1},      // AND with a don't-care
                               {3, 3, 3, 0.25, 1},   // weighted AND
                               {1, 3, 2, 1, 2},      // OR
                               {0, 0, 1, 1, 1},      // all don't-care AND
                               {0, 0, 1, 1, 2}});    // all don't-care OR
    auto firing = [&](double x1, double x2, std::size_t rule) {
        return rule_firing(f, fuzzify(f, x1, x2), f.rules[rule]).item();
    };

    // Don't-care skips the input: firing equals the width grade alone.
    double gw = evalmf(std::vector<double>{0.45}, f.inputs[1].mfs[1]).data()[0];
    CHECK(firing(0.05, 0.45, 5) == doctest::Approx(gw).epsilon(1e-12));
    // Weight scales the t-norm result.
    CHECK(firing(0.95, 0.95, 6) == doctest::Approx(0.25).epsilon(1e-12));
    // OR takes the s-norm (max) of the member grades.
    double gl = evalmf(std::vector<double>{0.05}, f.inputs[0].mfs[0]).data()[0];
    double gh = evalmf(std::vector<double>{0.7}, f.inputs[1].mfs[2]).data()[0];
    CHECK(firing(0.05, 0.7, 7) == doctest::Approx(std::max(gl, gh)).epsilon(1e-12));
    // Empty antecedent lists collapse to the connective identity.
    CHECK(firing(0.5, 0.5, 8) == 1.0);
    CHECK(firing(0.5, 0.5, 9) == 0.0);

    // probor OR: a + b - ab.
    Fis p = newfis("p", "min", "probor");
    p = addvar(std::move(p), "input", "x", 0.0, 1.0);
    p = addvar(std::move(p), "input", "y", 0.0, 1.0);
    p = addvar(std::move(p), "output", "z", 0.0, 1.0);
    p = addmf(std::move(p), "input", 1, "m", "trapmf", std::vector<double>{0.0, 0.2, 0.4, 0.9});
    p = addmf(std::move(p), "input", 2, "m", "trapmf", std::vector<double>{0.0, 0.5, 0.6, 1.0});
    p = addmf(std::move(p), "output", 1, "m", "trapmf", std::vector<double>{0.0, 0.4, 0.6, 1.0});
    p = addrule(std::move(p), {{1, 1, 1, 1, 2}});
    double a = evalmf(std::vector<double>{0.1}, p.inputs[0].mfs[0]).data()[0];
    double b = evalmf(std::vector<double>{0.25}, p.inputs[1].mfs[0]).data()[0];
    std::vector<std::vector<Value>> grades(2);
    grades[0].push_back(evalmf(Value(0.1), p.inputs[0].mfs[0]));
    grades[1].push_back(evalmf(Value(0.25), p.inputs[1].mfs[0]));
    CHECK(rule_firing(p, grades, p.rules[0]).item() ==
          doctest::Approx(a + b - a * b).epsilon(1e-12));
}

TEST_CASE("prod firing never exceeds min firing") {
    Fis fp = make_iris();
    Fis fm = fp;
    fm.and_method = TNorm::min;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        double x1 = u(rng), x2 = u(rng);
        auto grades = fuzzify(fp, x1, x2);
        for (std::size_t r = 0; r < fp.rules.size(); ++r) {
            double wp = rule_firing(fp, grades, fp.rules[r]).item();
            double wm = rule_firing(fm, grades, fm.rules[r]).item();
            CHECK(wp <= wm + 1e-15);
        }
    }
}

TEST_CASE("aggregation combines implicated rule outputs pointwise") {
    Fis f = newfis("agg", "min", "max", "prod");
    f = addvar(std::move(f), "input", "x", 0.0, 1.0);
    f = addvar(std::move(f), "output", "y", 0.0, 1.0);
    f = addmf(std::move(f), "input", 1, "a", "trapmf", std::vector<double>{0.0, 0.2, 0.3, 0.5});
    f = addmf(std::move(f), "input", 1, "b", "trapmf", std::vector<double>{0.5, 0.7, 0.8, 1.0});
    f = addmf(std::move(f), "output", 1, "lo", "trapmf", std::vector<double>{0.0, 0.0, 0.2, 0.6});
    f = addmf(std::move(f), "output", 1, "hi", "trapmf", std::vector<double>{0.4, 0.8, 1.0, 1.0});
    f = addrule(std::move(f), {{1, 1, 1, 1}, {2, 2, 1, 1}});

    std::vector<Value> firings = {Value(0.4), Value(0.8)};
    std::vector<Value> mu = {make_value({1.0, 0.5, 0.0}), make_value({0.0, 0.5, 1.0})};
    Value agg = aggregate_output(f, firings, mu);
    CHECK(agg.data()[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(agg.data()[1] == doctest::Approx(0.4).epsilon(1e-12));  // max(0.2, 0.4)
    CHECK(agg.data()[2] == doctest::Approx(0.8).epsilon(1e-12));

    f.imp_method = ImpMethod::min;  // clipping instead of scaling
    agg = aggregate_output(f, firings, mu);
    CHECK(agg.data()[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(agg.data()[1] == doctest::Approx(0.5).epsilon(1e-12));  // max(min(.4,.5), min(.8,.5))
    CHECK(agg.data()[2] == doctest::Approx(0.8).epsilon(1e-12));

    CHECK_THROWS_AS(aggregate_output(f, std::vector<Value>{Value(0.4)}, mu),
                    std::invalid_argument);
    CHECK_THROWS_AS(aggregate_output(f, firings, mu, 1), std::invalid_argument);
}

TEST_CASE("defuzz grid spans cell centers") {
    std::vector<double> g = defuzz_grid(0.0, 4.0, 4);
    CHECK(g == std::vector<double>{0.5, 1.5, 2.5, 3.5});
    g = defuzz_grid(0.5, 3.5, 501);
    CHECK(g.size() == 501);
    CHECK(g.front() > 0.5);
    CHECK(g.back() < 3.5);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK_THROWS_AS(defuzz_grid(0.0, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(defuzz_grid(1.0, 1.0, 10), std::invalid_argument);
}

TEST_CASE("centroid defuzzification anchors") {
    std::vector<double> grid = defuzz_grid(0.5, 3.5, 501);

    // Symmetric triangle centered on 2 -> exactly 2.
    MembershipFunction tri = genmf("trapmf", std::vector<double>{0.5, 2.0, 2.0, 3.5});
    Value mu = evalmf(grid, tri);
    CHECK(defuzz_centroid(grid, mu).item() == doctest::Approx(2.0).epsilon(1e-12));

    // Left shoulder triangle: analytic centroid (0.5 + 0.5 + 2) / 3 = 1.
    MembershipFunction shoulder = genmf("trapmf", std::vector<double>{0.5, 0.5, 0.5, 2.0});
    mu = evalmf(grid, shoulder);
    bool degenerate = true;
    double c = defuzz_centroid(grid, mu, &degenerate).item();
    CHECK_FALSE(degenerate);
    CHECK(std::fabs(c - 1.0) < 1e-3);
    // Independent midpoint-rule cross-check of the same integral.
    double ref = centroid_reference(
        [&](double z) { return evalmf(std::vector<double>{z}, shoulder).data()[0]; }, 0.5, 3.5,
        501);
    CHECK(c == doctest::Approx(ref).epsilon(1e-12));

    // Zero mass falls back to the grid midpoint and reports it.
    Value zero = make_value(std::vector<double>(grid.size(), 0.0));
    degenerate = false;
    c = defuzz_centroid(grid, zero, &degenerate).item();
    CHECK(degenerate);
    CHECK(c == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(defuzz_centroid(grid, make_value({1.0, 2.0})), std::invalid_argument);
}

TEST_CASE("evalfis anchors on the iris system") {
    Fis f = make_iris();
    CHECK(std::fabs(eval_one(f, 0.05, 0.05) - 1.0) < 1e-3);  // setosa shoulder centroid
    CHECK(eval_one(f, 0.5, 0.5) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::fabs(eval_one(f, 0.0, 0.0) - 1.0) < 1e-3);
    CHECK(std::fabs(eval_one(f, 1.0, 1.0) - 3.0) < 1e-3);

    // No rule covers (Mid, Low): the row defuzzifies to the range midpoint
    // and is reported, not failed.
    EvalDiagnostics diag;
    CHECK(eval_one(f, 0.5, 0.05, 501, &diag) == 2.0);
    CHECK(diag.degenerate_rows == 1);
    CHECK(diag.clamped_inputs == 0);

    // Out-of-range inputs clamp to the variable range.
    CHECK(eval_one(f, -0.2, 1.3, 501, &diag) == eval_one(f, 0.0, 1.0));
    CHECK(diag.clamped_inputs == 2);

    // Output stays within the output range on a sweep.
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        double y = eval_one(f, u(rng), u(rng));
        CHECK(y >= 0.5);
        CHECK(y <= 3.5);
    }
}

TEST_CASE("evalfis batch equals one row at a time, bit for bit") {
    Fis f = make_iris();
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 24;
    Matrix batch(n, 2);
    for (std::size_t r = 0; r < n; ++r) {
        batch.at(r, 0) = u(rng);
        batch.at(r, 1) = u(rng);
    }
    Value all = evalfis(batch, f);
    REQUIRE(all.size() == n);
    for (std::size_t r = 0; r < n; ++r) {
        double single = eval_one(f, batch.at(r, 0), batch.at(r, 1));
        CHECK(all.data()[r] == single);
    }
}

TEST_CASE("evalfis rejects structurally broken systems and inputs") {
    Fis f = make_iris();
    Matrix x(1, 2);
    x.at(0, 0) = 0.3;
    x.at(0, 1) = 0.4;

    Fis norules = f;
    norules.rules.clear();
    CHECK_THROWS_AS(evalfis(x, norules), std::invalid_argument);

    Fis noout = f;
    noout.outputs.clear();
    CHECK_THROWS_AS(evalfis(x, noout), std::invalid_argument);

    Fis badrule = f;
    badrule.rules[0].antecedents[0] = 7;
    CHECK_THROWS_AS(evalfis(x, badrule), std::invalid_argument);

    Matrix wide(1, 3);
    CHECK_THROWS_AS(evalfis(wide, f), std::invalid_argument);
    Matrix empty(0, 2);
    CHECK_THROWS_AS(evalfis(empty, f), std::invalid_argument);

    Matrix bad(1, 2);
    bad.at(0, 0) = std::nan("");
    bad.at(0, 1) = 0.4;
    CHECK(message_of([&] { evalfis(bad, f); }).find("row 1") != std::string::npos);
}

TEST_CASE("mf curve sampling is endpoint-inclusive and matches evalmf") {
    Fis f = make_iris();
    std::vector<MfCurvePoint> pts = sample_mf_curves(f, "input", 1, 5);
    REQUIRE(pts.size() == 15);  // 3 MFs x 5 samples, MF by MF
    CHECK(pts[0].label == "Low");
    CHECK(pts[5].label == "Mid");
    CHECK(pts[10].label == "High");
    CHECK(pts[0].x == 0.0);
    CHECK(pts[4].x == 1.0);
    for (int j = 0; j < 5; ++j) {
        double x = j * 0.25;
        CHECK(pts[static_cast<std::size_t>(j)].mu ==
              evalmf(std::vector<double>{x}, f.inputs[0].mfs[0]).data()[0]);
    }
    std::vector<MfCurvePoint> out = sample_mf_curves(f, "output", 1, 3);
    CHECK(out.size() == 9);
    CHECK(out[0].x == 0.5);
    CHECK(out[2].x == 3.5);

    CHECK_THROWS_AS(sample_mf_curves(f, "input", 3, 5), std::invalid_argument);
    CHECK_THROWS_AS(sample_mf_curves(f, "input", 1, 1), std::invalid_argument);
}

TEST_CASE("gensurf sweeps the input plane") {
    Fis f = make_iris();
    std::vector<SurfacePoint> surf = gensurf(f, 21);
    REQUIRE(surf.size() == 441);
    CHECK(surf.front().x1 == 0.0);
    CHECK(surf.front().x2 == 0.0);
    CHECK(surf.back().x1 == 1.0);
    CHECK(surf.back().x2 == 1.0);
    CHECK(std::fabs(surf.front().y - 1.0) < 1e-3);
    CHECK(std::fabs(surf.back().y - 3.0) < 1e-3);
    // Row-major with x1 as the outer axis.
    CHECK(surf[1].x1 == 0.0);
    CHECK(surf[1].x2 == doctest::Approx(0.05).epsilon(1e-12));
    for (const SurfacePoint& p : surf) {
        CHECK(p.y >= 0.5);
        CHECK(p.y <= 3.5);
    }

    Fis one_input = addvar(newfis("t"), "input", "x", 0.0, 1.0);
    CHECK_THROWS_AS(gensurf(one_input), std::invalid_argument);
    CHECK_THROWS_AS(gensurf(f, 1), std::invalid_argument);
}

TEST_CASE("json round trip preserves the system exactly") {
    Fis f = make_iris();
    f = addrule(std::move(f), {{0, 2, 2, 0.5, 2}});  // exercise OR + weight in the format
    // Mark one parameter trainable to check the flag survives.
    Fis g = addmf(std::move(f), "input", 1, "Extra", "gaussmf",
                  {make_scalar(0.2, true), make_scalar(0.55)});

    nlohmann::json j = fis_to_json(g);
    Fis back = fis_from_json(j);
    CHECK(fis_to_json(back).dump() == j.dump());  // lossless double round trip

    CHECK(back.name == g.name);
    CHECK(back.and_method == TNorm::prod);
    CHECK(back.imp_method == ImpMethod::prod);
    CHECK(back.rules.size() == 6);
    CHECK(back.rules[5].weight == 0.5);
    CHECK(back.rules[5].connective == Connective::or_rule);
    REQUIRE(back.inputs[0].mfs.size() == 4);
    CHECK(back.inputs[0].mfs[3].params[0].requires_grad());
    CHECK_FALSE(back.inputs[0].mfs[3].params[1].requires_grad());
    CHECK(back.inputs[0].mfs[3].params[0].item() == 0.2);

    // Rebuilt systems evaluate identically.
    Matrix x(1, 2);
    x.at(0, 0) = 0.31;
    x.at(0, 1) = 0.62;
    CHECK(evalfis(x, back).data()[0] == evalfis(x, g).data()[0]);
}

TEST_CASE("fis files save and load through the filesystem") {
    TempDir dir;
    const std::string path = dir.path() + "/model.json";
    Fis f = make_iris();
    save_fis(f, path);
    Fis back = load_fis(path);
    CHECK(fis_to_json(back).dump() == fis_to_json(f).dump());

    CHECK_THROWS_AS(load_fis(dir.path() + "/missing.json"), std::runtime_error);
    testutil::write_file(dir.path() + "/broken.json", "{ not json");
    CHECK(message_of([&] { load_fis(dir.path() + "/broken.json"); }).find("broken.json") !=
          std::string::npos);
}
