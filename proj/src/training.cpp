#include "fuzzygrad/training.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fuzzygrad {

Value rmse(std::span<const double> target, const Value& pred) {
    if (target.empty()) throw std::invalid_argument("rmse: empty target");
    if (pred.shape().matrix || pred.size() != target.size())
        throw std::invalid_argument("rmse: predictions " + to_string(pred.shape()) +
                                    " do not match " + std::to_string(target.size()) +
                                    " targets");
    Value t = make_value(std::vector<double>(target.begin(), target.end()));
    return sqrt(mean(square(sub(pred, t))));
}

TrainResult train(const ModelTemplate& tmpl, const ReparamVector& init, const Matrix& features,
                  std::span<const double> target, const TrainConfig& config) {
    if (!tmpl) throw std::invalid_argument("train: empty model template");
    if (config.epochs < 1)
        throw std::invalid_argument("train: epochs must be >= 1, got " +
                                    std::to_string(config.epochs));
    if (!(config.stepsize >= 0.0))
        throw std::invalid_argument("train: stepsize must be >= 0, got " +
                                    std::to_string(config.stepsize));
    if (config.loss != "rmse")
        throw std::invalid_argument("train: unsupported loss '" + config.loss +
                                    "' (only \"rmse\")");
    if (features.rows != target.size())
        throw std::invalid_argument("train: " + std::to_string(features.rows) +
                                    " feature rows vs " + std::to_string(target.size()) +
                                    " targets");

    std::vector<Value> psi = init.psi;
    TrainResult res;
    res.best_err = std::numeric_limits<double>::infinity();
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        ReparamVector rv{psi, init.layout};
        std::vector<Value> theta = get_theta(rv);
        Fis fis = tmpl(theta);
        Value pred = evalfis(features, fis, config.grid_points);
        Value err = rmse(target, pred);
        const double e = err.item();
        if (!std::isfinite(e))
            throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
        res.err_history.push_back(e);
        std::vector<double> th(theta.size());
        for (std::size_t i = 0; i < theta.size(); ++i) th[i] = theta[i].item();
        res.theta_history.push_back(th);
        if (e < res.best_err) {
            res.best_err = e;
            res.best_epoch = epoch;
            std::vector<Value> frozen;
            frozen.reserve(th.size());
            for (double x : th) frozen.emplace_back(x);
            res.best_fis = tmpl(frozen);
        }
        if (epoch == config.epochs) break;
        backward(err);
        std::vector<Value> next;
        next.reserve(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double updated = psi[i].item() - config.stepsize * grad_of(psi[i]).v[0];
            if (!std::isfinite(updated))
                throw std::runtime_error("train: non-finite parameter update at epoch " +
                                         std::to_string(epoch));
            next.push_back(make_scalar(updated, true));
        }
        psi = std::move(next);
    }
    return res;
}

// ------------------------------------------------------------ the Iris system

Fis build_iris_fis(std::span<const Value> theta1, std::span<const Value> theta2) {
    if (theta1.size() != 8 || theta2.size() != 8)
        throw std::invalid_argument("build_iris_fis: expected 8 breakpoints per input, got " +
                                    std::to_string(theta1.size()) + " and " +
                                    std::to_string(theta2.size()));
    Fis fis = newfis("Iris Classification", "prod", "max", "prod", "max", "centroid");
    fis = addvar(std::move(fis), "input", "Petal.Length", 0.0, 1.0);
    fis = addvar(std::move(fis), "input", "Petal.Width", 0.0, 1.0);
    fis = addvar(std::move(fis), "output", "Species", 0.5, 3.5);
    auto add_input_mfs = [](Fis f, std::size_t var, std::span<const Value> th) {
        f = addmf(std::move(f), "input", var, "Low", "trapmf",
                  std::vector<Value>{Value(0.0), Value(0.0), th[0], th[1]});
        f = addmf(std::move(f), "input", var, "Mid", "trapmf",
                  std::vector<Value>{th[2], th[3], th[4], th[5]});
        f = addmf(std::move(f), "input", var, "High", "trapmf",
                  std::vector<Value>{th[6], th[7], Value(1.0), Value(1.0)});
        return f;
    };
    fis = add_input_mfs(std::move(fis), 1, theta1);
    fis = add_input_mfs(std::move(fis), 2, theta2);
    fis = addmf(std::move(fis), "output", 1, "setosa", "trapmf",
                std::vector<double>{0.5, 0.5, 0.5, 2.0, 1.0});
    fis = addmf(std::move(fis), "output", 1, "versicolor", "trapmf",
                std::vector<double>{0.5, 2.0, 2.0, 3.5, 1.0});
    fis = addmf(std::move(fis), "output", 1, "virginica", "trapmf",
                std::vector<double>{2.0, 3.5, 3.5, 3.5, 1.0});
    fis = addrule(std::move(fis), {{1, 1, 1, 1, 1},
                                   {2, 2, 2, 1, 1},
                                   {3, 3, 3, 1, 1},
                                   {2, 3, 3, 1, 1},
                                   {3, 2, 3, 1, 1}});
    return fis;
}

ReparamLayout iris_reparam_layout() { return {{2, 4, 2, 2, 4, 2}}; }

std::vector<double> iris_initial_theta() {
    return {0.1, 0.39, 0.11, 0.4, 0.6, 0.89, 0.61, 0.9,
            0.1, 0.39, 0.11, 0.4, 0.6, 0.89, 0.61, 0.9};
}

ModelTemplate iris_model_template() {
    return [](std::span<const Value> theta) {
        if (theta.size() != 16)
            throw std::invalid_argument("iris model: expected 16 breakpoints, got " +
                                        std::to_string(theta.size()));
        return build_iris_fis(theta.subspan(0, 8), theta.subspan(8, 8));
    };
}

std::vector<int> classify(std::span<const double> y, int num_classes) {
    if (num_classes < 1)
        throw std::invalid_argument("classify: num_classes must be >= 1, got " +
                                    std::to_string(num_classes));
    std::vector<int> out;
    out.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i]))
            throw std::invalid_argument("classify: non-finite value at index " +
                                        std::to_string(i));
        int c = static_cast<int>(std::floor(y[i] + 0.5));
        if (c < 1) c = 1;
        if (c > num_classes) c = num_classes;
        out.push_back(c);
    }
    return out;
}

int count_misclassified(std::span<const int> predicted, std::span<const double> target) {
    if (predicted.size() != target.size())
        throw std::invalid_argument("count_misclassified: size mismatch");
    int n = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (static_cast<double>(predicted[i]) != target[i]) ++n;
    return n;
}

}  // namespace fuzzygrad
