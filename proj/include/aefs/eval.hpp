#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "aefs/numerics.hpp"
#include "aefs/selector.hpp"

namespace aefs {

struct LabelVector {
    std::vector<int> labels;
    int num_classes = 0;

    std::size_t size() const noexcept { return labels.size(); }
    void validate() const;

    /// Builds a LabelVector with num_classes = max label + 1.
    static LabelVector from(std::vector<int> labels);
};

/// Lloyd's algorithm from k distinct seeded sample points; empty clusters are
/// re-seeded with the point farthest from its current centroid.
LabelVector kmeans(const Matrix& x, int k, std::uint64_t seed, std::size_t max_iters = 300);

/// Optimal one-to-one assignment maximizing the total weight; returns, for each row,
/// the assigned column. `weights` must be square.
std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& weights);

/// Clustering accuracy under the best cluster-to-class mapping.
double best_map_accuracy(const LabelVector& truth, const LabelVector& pred);

struct LeaveOneOut {};
struct Split {
    double ratio = 0.5;  ///< fraction of samples used as the training side
    std::uint64_t seed = 0;
};
using NnProtocol = std::variant<LeaveOneOut, Split>;

/// 1-nearest-neighbour accuracy, Euclidean distance, ties to the smallest training index.
double nn_classify_accuracy(const Matrix& x, const LabelVector& labels, const NnProtocol& protocol);

enum class Task { Clustering, Classification };

std::string to_string(Task task);
Task parse_task(const std::string& name);

struct EvalReport {
    Task task = Task::Clustering;
    std::size_t s = 0;
    double acc_mean = 0.0;
    double acc_std = 0.0;
    std::size_t restarts = 1;
    nlohmann::json config = nlohmann::json::object();
};

struct ExperimentOptions {
    Task task = Task::Clustering;
    std::size_t restarts = 20;
    std::uint64_t master_seed = 0;
    NnProtocol protocol = LeaveOneOut{};  ///< classification only
    std::size_t kmeans_iters = 300;
};

/// Seed used for restart `index` of an experiment.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

EvalReport run_experiment(const Matrix& x_full, const LabelVector& labels, const FeatureRanking& ranking,
                          std::size_t s, const ExperimentOptions& options);

/// Same as run_experiment but on an explicit column subset (used for random-subset baselines).
EvalReport evaluate_columns(const Matrix& x_full, const LabelVector& labels,
                            const std::vector<std::size_t>& columns, const ExperimentOptions& options);

}  // namespace aefs
