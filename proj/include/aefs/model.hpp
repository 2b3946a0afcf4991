#pragma once

#include <cstdint>

#include "aefs/numerics.hpp"

namespace aefs {

/// Two-layer autoencoder without bias units: recon = act_output(act_hidden(X W1) W2).
struct AutoencoderParams {
    Matrix w1;  ///< d x h encoder weights; row i belongs to feature i
    Matrix w2;  ///< h x d decoder weights
    Activation act_hidden = Activation::Sigmoid;
    Activation act_output = Activation::Identity;

    Eigen::Index input_dim() const noexcept { return w1.rows(); }
    Eigen::Index hidden_dim() const noexcept { return w1.cols(); }

    /// Throws InvalidArgument unless the shapes are consistent and all entries finite.
    void validate() const;
};

struct Hyperparams {
    double alpha = 0.0;  ///< l2,1 weight on W1
    double beta = 0.0;   ///< weight decay on W1 and W2

    void validate() const;
};

struct Gradients {
    Matrix g1;
    Matrix g2;
};

struct ForwardResult {
    Matrix hidden;  ///< m x h
    Matrix recon;   ///< m x d
};

ForwardResult forward(const AutoencoderParams& params, const Matrix& x);

/// Full objective: reconstruction + alpha * ||W1||_{2,1} + beta/2 * (||W1||_F^2 + ||W2||_F^2).
double objective(const AutoencoderParams& params, const Matrix& x, const Hyperparams& hp);

/// The objective with the l2,1 term left out; this is the part the gradient step sees.
double smooth_objective(const AutoencoderParams& params, const Matrix& x, const Hyperparams& hp);

/// Exact chain-rule gradient of smooth_objective with respect to W1 and W2.
Gradients smooth_gradients(const AutoencoderParams& params, const Matrix& x, const Hyperparams& hp);

/// Central-difference estimate of smooth_gradients, one entry at a time.
Gradients finite_difference_gradient(const AutoencoderParams& params, const Matrix& x,
                                     const Hyperparams& hp, double eps = 1e-5);

/// Largest |a - b| / max(1, |a|, |b|) over both gradient blocks.
double max_relative_error(const Gradients& a, const Gradients& b);

/// Seeded Gaussian initialization with std = scale / sqrt(fan_in).
AutoencoderParams init_params(Eigen::Index input_dim, Eigen::Index hidden_dim, std::uint64_t seed,
                              double scale = 1.0, Activation act_hidden = Activation::Sigmoid,
                              Activation act_output = Activation::Identity);

/// Random instance (Gaussian X, seeded init) comparing smooth_gradients against
/// finite_difference_gradient; returns max_relative_error.
double gradient_check(std::uint64_t seed, Eigen::Index m, Eigen::Index d, Eigen::Index h,
                      Activation act_hidden, Activation act_output, const Hyperparams& hp = {0.1, 0.01},
                      double eps = 1e-5);

}  // namespace aefs
