#pragma once

#include <functional>
#include <span>

#include "fuzzygrad/fis.hpp"
#include "fuzzygrad/reparam.hpp"

namespace fuzzygrad {

// Root-mean-square error between a crisp target vector and predictions.
Value rmse(std::span<const double> target, const Value& pred);

struct TrainConfig {
    int epochs = 100;
    double stepsize = 0.3;
    int grid_points = 501;
    std::string loss = "rmse";
};

struct TrainResult {
    std::vector<double> err_history;                 // loss at each epoch, pre-update
    std::vector<std::vector<double>> theta_history;  // breakpoints used at each epoch
    Fis best_fis;                                    // detached snapshot at the lowest loss
    double best_err = 0.0;
    int best_epoch = 0;  // 1-based
};

// Builds a fresh system from the current breakpoints each epoch.
using ModelTemplate = std::function<Fis(std::span<const Value>)>;

// Plain gradient descent on the unconstrained psi. Each epoch: rebuild the
// system, evaluate, record loss and breakpoints, snapshot the best system,
// then step. The final epoch is recorded without a step, so exactly
// config.epochs evaluations happen. A non-finite loss aborts with the epoch
// in the error.
TrainResult train(const ModelTemplate& tmpl, const ReparamVector& init, const Matrix& features,
                  std::span<const double> target, const TrainConfig& config);

// The Iris template: two inputs (normalized petal length and width) with
// Low/Mid/High trapezoids driven by 8 breakpoints each, one output with
// fixed species trapezoids, five rules under prod/prod inference.
Fis build_iris_fis(std::span<const Value> theta1, std::span<const Value> theta2);
ReparamLayout iris_reparam_layout();
std::vector<double> iris_initial_theta();
ModelTemplate iris_model_template();

// Crisp outputs to class codes 1..num_classes by rounding half up.
std::vector<int> classify(std::span<const double> y, int num_classes = 3);
int count_misclassified(std::span<const int> predicted, std::span<const double> target);

}  // namespace fuzzygrad
