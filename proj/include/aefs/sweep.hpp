#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "aefs/baselines.hpp"
#include "aefs/eval.hpp"
#include "aefs/io.hpp"
#include "aefs/prox.hpp"

namespace aefs {

/// Hyperparameter grid. Defaults: alpha, beta in {1e-3, ..., 1e3}, hidden in
/// {128, 256, 512, 1024}, s in {50, 100, ..., 300}.
struct SweepGrid {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<long long> hiddens;
    std::vector<std::size_t> s_values;

    static SweepGrid defaults();
};

enum class Method { Aefs, Rsr };

std::string to_string(Method method);
Method parse_method(const std::string& name);

struct SweepOptions {
    Method method = Method::Aefs;
    TrainConfig train;          ///< alpha, beta and hidden_size are overridden per grid point
    RsrConfig rsr;              ///< lambda is overridden per grid point (taken from alphas)
    std::vector<Task> tasks{Task::Clustering};
    ExperimentOptions eval;     ///< task field is overridden per entry of `tasks`
    std::size_t threads = 1;
    std::string dataset_name = "dataset";
    bool include_all_features = false;
};

struct GridPointResult {
    double alpha = 0.0;
    double beta = 0.0;
    long long hidden = 0;
    FeatureRanking ranking;
    TrainTrace trace;
    std::vector<ReportRow> rows;  ///< one per (task, s)
};

struct SweepResult {
    std::vector<GridPointResult> points;  ///< in grid order
    std::vector<ReportRow> best;          ///< best row per (task, s), ties to the earlier grid point
};

/// Trains one ranking per grid point and evaluates every s; s values above d are dropped.
SweepResult sweep(const Dataset& ds, const SweepGrid& grid, const SweepOptions& options);

}  // namespace aefs
