#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "aefs/model.hpp"
#include "aefs/numerics.hpp"

namespace aefs {

/// Rows of W1 with norm above this count as selected in traces.
inline constexpr double kSupportEps = 1e-8;

struct FixedStep {
    double t = 0.1;
};

/// Prox-gradient line search: a trial step is accepted when
/// F(W+) <= F(W) - (c / t) * ||W+ - W||_F^2, otherwise t is multiplied by `shrink`.
/// The next iteration starts from t / shrink.
struct Backtracking {
    double t0 = 0.1;
    double shrink = 0.5;
    double c = 1e-4;
};

using StepPolicy = std::variant<FixedStep, Backtracking>;

void validate(const StepPolicy& step);

struct TrainConfig {
    Eigen::Index hidden_size = 128;
    Hyperparams hp;
    std::size_t max_epochs = 1000;
    double tol = 1e-6;              ///< relative objective change over `window` iterations
    std::size_t window = 5;
    StepPolicy step = Backtracking{};
    std::uint64_t seed = 0;
    double init_scale = 1.0;
    Activation act_hidden = Activation::Sigmoid;
    Activation act_output = Activation::Identity;
    std::size_t batch_size = 0;     ///< 0 means full batch; mini-batches give up monotone descent

    void validate() const;
};

struct TrainTrace {
    std::vector<double> objective_history;  ///< initial objective, then one entry per iteration
    std::size_t epochs_run = 0;
    bool converged = false;
    std::size_t final_row_support = 0;
};

/// Multivariate soft threshold: 0 if ||w|| <= lambda, else w * (1 - lambda / ||w||).
Vector vector_soft_threshold(const Vector& w, double lambda);

/// Row-wise vector_soft_threshold.
Matrix group_soft_threshold(const Matrix& w, double lambda);

/// One forward-backward step: prox on W1 with threshold alpha * t, plain gradient step on W2.
AutoencoderParams proximal_step(const AutoencoderParams& params, const Matrix& x,
                                const Hyperparams& hp, double t);

struct TrainResult {
    AutoencoderParams params;
    TrainTrace trace;
};

/// Trains from the seeded Gaussian initialization described by `cfg`.
TrainResult train(const Matrix& x, const TrainConfig& cfg);

/// Trains from caller-supplied initial weights; cfg.hidden_size must match.
TrainResult train(const Matrix& x, const TrainConfig& cfg, AutoencoderParams init);

// Generic engine shared by the autoencoder and the linear baseline.

/// smooth(blocks) + l21_weight * ||blocks[0]||_{2,1}
struct CompositeProblem {
    /// May return +inf for points where the model blows up.
    std::function<double(const std::vector<Matrix>&)> smooth_value;
    std::function<std::vector<Matrix>(const std::vector<Matrix>&)> smooth_gradient;
    double l21_weight = 0.0;
};

struct SolverOptions {
    std::size_t max_iters = 1000;
    double tol = 1e-6;
    std::size_t window = 5;
    StepPolicy step = Backtracking{};
};

struct SolveResult {
    std::vector<Matrix> blocks;
    TrainTrace trace;
};

double composite_value(const CompositeProblem& problem, const std::vector<Matrix>& blocks);

SolveResult proximal_gradient(const CompositeProblem& problem, std::vector<Matrix> init,
                              const SolverOptions& options);

}  // namespace aefs
