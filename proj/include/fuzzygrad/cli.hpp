#pragma once

#include <string>
#include <vector>

namespace fuzzygrad::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitGradcheckFailed = 3;

struct CliConfig {
    std::string data_path;
    std::string fis_path;  // empty: use the built-in initial Iris system
    int epochs = 100;
    double stepsize = 0.3;
    int grid_points = 501;
    std::string output_dir = ".";
    bool svg = false;
    bool corrupt_gradient = false;  // test hook: breaks one gradient on purpose
};

struct TrainOutputs {
    double initial_rmse = 0.0;
    double best_rmse = 0.0;
    int misclassified_initial = 0;
    int misclassified_best = 0;
    int best_epoch = 0;
    std::string history_path;
    std::string best_fis_path;
};

struct EvalOutputs {
    double rmse = 0.0;
    int misclassified = 0;
    std::string predictions_path;
};

struct GradcheckReport {
    double step = 1e-6;
    double max_rel_err = 0.0;
    bool pass = false;
};

// File-producing cores of the subcommands; throw on failure.
TrainOutputs train_and_write(const CliConfig& cfg);
EvalOutputs eval_and_write(const CliConfig& cfg);
std::vector<std::string> plot_mf_and_write(const CliConfig& cfg);
std::vector<std::string> plot_learning_and_write(const CliConfig& cfg);
GradcheckReport gradcheck_report(const CliConfig& cfg);

// Subcommand entry points: run the core, print a summary, map exceptions to
// exit codes.
int run_train(const CliConfig& cfg);
int run_eval(const CliConfig& cfg);
int run_plot_mf(const CliConfig& cfg);
int run_plot_learning(const CliConfig& cfg);
int run_gradcheck(const CliConfig& cfg);

// Full command line: parse argv and dispatch. Usage problems exit 1,
// runtime failures 2, a failed gradient check 3.
int run_main(int argc, const char* const* argv);

}  // namespace fuzzygrad::cli
