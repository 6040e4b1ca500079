#include "fuzzygrad/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <stdexcept>

#include "fuzzygrad/dataset.hpp"
#include "fuzzygrad/fis_json.hpp"
#include "fuzzygrad/training.hpp"

namespace fuzzygrad::cli {

namespace fs = std::filesystem;

// Shortest round-trip decimal text; locale-free, so output files are
// byte-stable across runs and machines.
static std::string fmt(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

static std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

static std::ofstream open_out(const std::string& path) {
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

static std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        std::string f = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                      : comma - start);
        if (!f.empty() && f.back() == '\r') f.pop_back();
        fields.push_back(std::move(f));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

// ------------------------------------------------------------- data + model

struct IrisData {
    Matrix features;  // normalized to [0, 1]
    std::vector<double> target;
    std::vector<std::string> class_names;
};

static IrisData load_iris(const std::string& path) {
    Dataset ds = load_table(path, {"Petal.Length", "Petal.Width"}, "Species");
    auto [norm, bounds] = range_normalize(ds.features);
    return {std::move(norm), std::move(ds.target), std::move(ds.class_names)};
}

static Fis initial_iris_fis() {
    std::vector<Value> theta;
    for (double t : iris_initial_theta()) theta.emplace_back(t);
    return iris_model_template()(theta);
}

static Fis resolve_fis(const CliConfig& cfg) {
    return cfg.fis_path.empty() ? initial_iris_fis() : load_fis(cfg.fis_path);
}

// --------------------------------------------------------------- SVG charts

struct Series {
    std::string name;
    std::vector<double> ys;
};

static std::string svg_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

static void write_svg_chart(const std::string& path, const std::string& title,
                            std::span<const double> xs, std::span<const Series> series) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    const double width = 640, height = 400, ml = 64, mr = 120, mt = 40, mb = 48;
    double xmin = xs.front(), xmax = xs.back();
    if (xmin == xmax) xmax = xmin + 1;
    double ymin = series.front().ys.front(), ymax = ymin;
    for (const Series& s : series)
        for (double y : s.ys) {
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    double pad = (ymax - ymin) * 0.05;
    if (pad == 0) pad = 0.5;
    ymin -= pad;
    ymax += pad;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << ml << "\" y=\"22\" font-size=\"15\">" << title << "</text>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << py(ymin) << "\" x2=\"" << width - mr
        << "\" y2=\"" << py(ymin) << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << py(ymin) << "\" x2=\"" << ml << "\" y2=\""
        << py(ymax) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml << "\" y=\"" << height - mb + 16 << "\">" << svg_num(xmin)
        << "</text>\n"
        << "<text x=\"" << width - mr << "\" y=\"" << height - mb + 16
        << "\" text-anchor=\"end\">" << svg_num(xmax) << "</text>\n"
        << "<text x=\"" << ml - 6 << "\" y=\"" << py(ymin) << "\" text-anchor=\"end\">"
        << svg_num(ymin) << "</text>\n"
        << "<text x=\"" << ml - 6 << "\" y=\"" << py(ymax) + 10 << "\" text-anchor=\"end\">"
        << svg_num(ymax) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % std::size(palette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i)
            out << px(xs[i]) << ',' << py(series[s].ys[i]) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << width - mr + 8 << "\" y=\"" << mt + 14 * (s + 1)
            << "\" fill=\"" << color << "\">" << series[s].name << "</text>\n";
    }
    out << "</svg>\n";
}

// ------------------------------------------------------------- subcommands

TrainOutputs train_and_write(const CliConfig& cfg) {
    IrisData data = load_iris(cfg.data_path);
    ModelTemplate tmpl = iris_model_template();
    ReparamVector init = make_reparam(iris_initial_theta(), iris_reparam_layout());
    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.stepsize = cfg.stepsize;
    tc.grid_points = cfg.grid_points;
    TrainResult res = train(tmpl, init, data.features, data.target, tc);

    const int num_classes = static_cast<int>(data.class_names.size());
    TrainOutputs out;
    out.initial_rmse = res.err_history.front();
    out.best_rmse = res.best_err;
    out.best_epoch = res.best_epoch;
    Value y0 = evalfis(data.features, initial_iris_fis(), cfg.grid_points);
    out.misclassified_initial =
        count_misclassified(classify(y0.data().v, num_classes), data.target);
    Value yb = evalfis(data.features, res.best_fis, cfg.grid_points);
    out.misclassified_best = count_misclassified(classify(yb.data().v, num_classes), data.target);

    out.history_path = join_path(cfg.output_dir, "history.csv");
    {
        std::ofstream f = open_out(out.history_path);
        f << "epoch,rmse";
        for (std::size_t k = 1; k <= res.theta_history.front().size(); ++k) f << ",theta" << k;
        f << "\n";
        for (std::size_t e = 0; e < res.err_history.size(); ++e) {
            f << (e + 1) << ',' << fmt(res.err_history[e]);
            for (double t : res.theta_history[e]) f << ',' << fmt(t);
            f << "\n";
        }
    }
    out.best_fis_path = join_path(cfg.output_dir, "best_fis.json");
    save_fis(res.best_fis, out.best_fis_path);
    return out;
}

EvalOutputs eval_and_write(const CliConfig& cfg) {
    IrisData data = load_iris(cfg.data_path);
    Fis fis = resolve_fis(cfg);
    Value y = evalfis(data.features, fis, cfg.grid_points);
    const int num_classes = static_cast<int>(data.class_names.size());
    std::vector<int> cls = classify(y.data().v, num_classes);

    EvalOutputs out;
    out.rmse = rmse(data.target, y).item();
    out.misclassified = count_misclassified(cls, data.target);
    out.predictions_path = join_path(cfg.output_dir, "predictions.csv");
    std::ofstream f = open_out(out.predictions_path);
    f << "row,y,class,target\n";
    for (std::size_t i = 0; i < data.target.size(); ++i)
        f << (i + 1) << ',' << fmt(y.data()[i]) << ',' << cls[i] << ',' << fmt(data.target[i])
          << "\n";
    return out;
}

std::vector<std::string> plot_mf_and_write(const CliConfig& cfg) {
    Fis fis = resolve_fis(cfg);
    std::vector<std::string> written;
    for (std::size_t i = 0; i < fis.inputs.size(); ++i) {
        const std::string& var_name = fis.inputs[i].name;
        auto curves = sample_mf_curves(fis, "input", i + 1, cfg.grid_points);
        std::string csv_path = join_path(cfg.output_dir, "mf_" + var_name + ".csv");
        {
            std::ofstream f = open_out(csv_path);
            f << "x,label,mu\n";
            for (const MfCurvePoint& p : curves)
                f << fmt(p.x) << ',' << p.label << ',' << fmt(p.mu) << "\n";
        }
        written.push_back(csv_path);
        if (cfg.svg) {
            const std::size_t n = static_cast<std::size_t>(cfg.grid_points);
            std::vector<double> xs;
            std::vector<Series> series;
            for (std::size_t p = 0; p < curves.size(); p += n) {
                Series s;
                s.name = curves[p].label;
                for (std::size_t j = 0; j < n; ++j) {
                    if (series.empty()) xs.push_back(curves[p + j].x);
                    s.ys.push_back(curves[p + j].mu);
                }
                series.push_back(std::move(s));
            }
            std::string svg_path = join_path(cfg.output_dir, "mf_" + var_name + ".svg");
            write_svg_chart(svg_path, var_name, xs, series);
            written.push_back(svg_path);
        }
    }
    return written;
}

std::vector<std::string> plot_learning_and_write(const CliConfig& cfg) {
    const std::string history_path = join_path(cfg.output_dir, "history.csv");
    std::ifstream in(history_path);
    if (!in)
        throw std::runtime_error("cannot open '" + history_path + "' (run the train command first)");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("'" + history_path + "' is empty");
    const std::vector<std::string> header = split_line(line);
    if (header.size() < 2 || header[0] != "epoch")
        throw std::runtime_error("'" + history_path + "' is not a history file");
    std::vector<double> epochs;
    std::vector<Series> columns;  // one per non-epoch column
    for (std::size_t c = 1; c < header.size(); ++c) columns.push_back({header[c], {}});
    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error("'" + history_path + "': row " + std::to_string(row_number) +
                                     " has " + std::to_string(fields.size()) +
                                     " fields, expected " + std::to_string(header.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(fields[c].data(), fields[c].data() + fields[c].size(), x);
            if (ec != std::errc() || ptr != fields[c].data() + fields[c].size())
                throw std::runtime_error("'" + history_path + "': row " +
                                         std::to_string(row_number) + ", column '" + header[c] +
                                         "': cannot parse '" + fields[c] + "'");
            if (c == 0)
                epochs.push_back(x);
            else
                columns[c - 1].ys.push_back(x);
        }
    }
    if (epochs.empty()) throw std::runtime_error("'" + history_path + "' has no data rows");

    std::vector<std::string> written;
    std::string long_path = join_path(cfg.output_dir, "learning_curves.csv");
    {
        std::ofstream f = open_out(long_path);
        f << "epoch,series,value\n";
        for (std::size_t e = 0; e < epochs.size(); ++e)
            for (const Series& s : columns)
                f << fmt(epochs[e]) << ',' << s.name << ',' << fmt(s.ys[e]) << "\n";
    }
    written.push_back(long_path);
    if (cfg.svg) {
        std::vector<Series> rmse_series, theta_series;
        for (Series& s : columns)
            (s.name == "rmse" ? rmse_series : theta_series).push_back(std::move(s));
        if (!rmse_series.empty()) {
            std::string p = join_path(cfg.output_dir, "learning_rmse.svg");
            write_svg_chart(p, "RMSE by epoch", epochs, rmse_series);
            written.push_back(p);
        }
        if (!theta_series.empty()) {
            std::string p = join_path(cfg.output_dir, "learning_theta.svg");
            write_svg_chart(p, "Breakpoints by epoch", epochs, theta_series);
            written.push_back(p);
        }
    }
    return written;
}

GradcheckReport gradcheck_report(const CliConfig& cfg) {
    IrisData data = load_iris(cfg.data_path);
    const ReparamLayout layout = iris_reparam_layout();
    const std::vector<double> theta0 = iris_initial_theta();
    ModelTemplate tmpl = iris_model_template();

    auto loss_at = [&](std::span<const double> psi_raw) {
        ReparamVector rv;
        rv.layout = layout;
        rv.psi.reserve(psi_raw.size());
        for (double p : psi_raw) rv.psi.emplace_back(p);  // untracked: forward only
        std::vector<Value> theta = get_theta(rv);
        Fis fis = tmpl(theta);
        Value y = evalfis(data.features, fis, cfg.grid_points);
        return rmse(data.target, y).item();
    };

    ReparamVector rv = make_reparam(theta0, layout);
    std::vector<Value> theta = get_theta(rv);
    Fis fis = tmpl(theta);
    Value y = evalfis(data.features, fis, cfg.grid_points);
    Value err = rmse(data.target, y);
    backward(err);
    std::vector<double> grads;
    grads.reserve(rv.psi.size());
    for (const Value& p : rv.psi) grads.push_back(grad_of(p).v[0]);
    if (cfg.corrupt_gradient) grads[0] += 0.5;

    const std::vector<double> psi0 = get_psi(theta0, layout);
    GradcheckReport rep;
    for (std::size_t i = 0; i < psi0.size(); ++i) {
        std::vector<double> p = psi0;
        p[i] = psi0[i] + rep.step;
        const double fp = loss_at(p);
        p[i] = psi0[i] - rep.step;
        const double fm = loss_at(p);
        const double fd = (fp - fm) / (2.0 * rep.step);
        const double denom = std::max({std::abs(grads[i]), std::abs(fd), 1e-6});
        rep.max_rel_err = std::max(rep.max_rel_err, std::abs(grads[i] - fd) / denom);
    }
    rep.pass = rep.max_rel_err < 1e-4;
    return rep;
}

// ---------------------------------------------------------------- wrappers

template <class Fn>
static int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int run_train(const CliConfig& cfg) {
    return guarded([&] {
        TrainOutputs out = train_and_write(cfg);
        std::cout << "initial_rmse=" << fmt(out.initial_rmse) << " best_rmse=" << fmt(out.best_rmse)
                  << " misclassified_initial=" << out.misclassified_initial
                  << " misclassified_best=" << out.misclassified_best
                  << " best_epoch=" << out.best_epoch << "\n"
                  << "wrote " << out.history_path << "\n"
                  << "wrote " << out.best_fis_path << "\n";
        return kExitOk;
    });
}

int run_eval(const CliConfig& cfg) {
    return guarded([&] {
        EvalOutputs out = eval_and_write(cfg);
        std::cout << "rmse=" << fmt(out.rmse) << " misclassified=" << out.misclassified << "\n"
                  << "wrote " << out.predictions_path << "\n";
        return kExitOk;
    });
}

int run_plot_mf(const CliConfig& cfg) {
    return guarded([&] {
        for (const std::string& path : plot_mf_and_write(cfg)) std::cout << "wrote " << path << "\n";
        return kExitOk;
    });
}

int run_plot_learning(const CliConfig& cfg) {
    return guarded([&] {
        for (const std::string& path : plot_learning_and_write(cfg))
            std::cout << "wrote " << path << "\n";
        return kExitOk;
    });
}

int run_gradcheck(const CliConfig& cfg) {
    return guarded([&] {
        GradcheckReport rep = gradcheck_report(cfg);
        std::cout << "step=" << fmt(rep.step) << " max_rel_err=" << fmt(rep.max_rel_err) << ' '
                  << (rep.pass ? "PASS" : "FAIL") << "\n";
        return rep.pass ? kExitOk : kExitGradcheckFailed;
    });
}

int run_main(int argc, const char* const* argv) {
    CLI::App app{"Differentiable Mamdani fuzzy inference on the Iris data"};
    app.require_subcommand(1);
    CliConfig cfg;

    auto add_data = [&](CLI::App* sub) {
        sub->add_option("--data", cfg.data_path,
                        "CSV with Petal.Length, Petal.Width and Species columns")
            ->required();
    };
    auto add_grid = [&](CLI::App* sub, const char* what) {
        sub->add_option("--grid", cfg.grid_points, what)->check(CLI::PositiveNumber);
    };
    auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.output_dir, "Output directory");
    };
    auto add_fis = [&](CLI::App* sub) {
        sub->add_option("--fis", cfg.fis_path,
                        "System JSON to use (default: the built-in initial system)")
            ->check(CLI::ExistingFile);
    };
    auto add_svg = [&](CLI::App* sub) {
        sub->add_flag("--svg", cfg.svg, "Also write SVG charts");
    };

    CLI::App* cmd_train = app.add_subcommand(
        "train", "Fit the input breakpoints; writes history.csv and best_fis.json");
    add_data(cmd_train);
    cmd_train->add_option("--epochs", cfg.epochs, "Training epochs")->check(CLI::PositiveNumber);
    cmd_train->add_option("--stepsize", cfg.stepsize, "Gradient step size")
        ->check(CLI::NonNegativeNumber);
    add_grid(cmd_train, "Defuzzification grid resolution");
    add_out(cmd_train);

    CLI::App* cmd_eval =
        app.add_subcommand("eval", "Evaluate a system on a dataset; writes predictions.csv");
    add_data(cmd_eval);
    add_fis(cmd_eval);
    add_grid(cmd_eval, "Defuzzification grid resolution");
    add_out(cmd_eval);

    CLI::App* cmd_plot_mf =
        app.add_subcommand("plot-mf", "Sample the input membership curves; writes mf_<var>.csv");
    add_fis(cmd_plot_mf);
    add_grid(cmd_plot_mf, "Samples per curve");
    add_out(cmd_plot_mf);
    add_svg(cmd_plot_mf);

    CLI::App* cmd_plot_learning = app.add_subcommand(
        "plot-learning", "Reshape history.csv into long-format learning_curves.csv");
    add_out(cmd_plot_learning);
    add_svg(cmd_plot_learning);

    CLI::App* cmd_gradcheck = app.add_subcommand(
        "gradcheck", "Compare backward gradients against central finite differences");
    add_data(cmd_gradcheck);
    add_grid(cmd_gradcheck, "Defuzzification grid resolution");
    cmd_gradcheck->add_flag("--corrupt-gradient", cfg.corrupt_gradient, "")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (cmd_train->parsed()) return run_train(cfg);
    if (cmd_eval->parsed()) return run_eval(cfg);
    if (cmd_plot_mf->parsed()) return run_plot_mf(cfg);
    if (cmd_plot_learning->parsed()) return run_plot_learning(cfg);
    if (cmd_gradcheck->parsed()) return run_gradcheck(cfg);
    return kExitUsage;
}

}  // namespace fuzzygrad::cli
