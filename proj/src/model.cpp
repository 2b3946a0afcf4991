#include "aefs/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "aefs/error.hpp"

namespace aefs {
namespace {

std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_input(const AutoencoderParams& params, const Matrix& x) {
    params.validate();
    require_valid(x, "input");
    if (x.cols() != params.input_dim()) {
        throw InvalidArgument("input is " + shape(x) + " but W1 is " + shape(params.w1) +
                              "; column count must equal W1 rows");
    }
}

struct Activations {
    Matrix pre_hidden;  // X W1
    Matrix hidden;
    Matrix pre_output;  // H W2
    Matrix recon;
};

Activations run(const AutoencoderParams& params, const Matrix& x) {
    Activations a;
    a.pre_hidden = x * params.w1;
    a.hidden = activate(params.act_hidden, a.pre_hidden);
    a.pre_output = a.hidden * params.w2;
    a.recon = activate(params.act_output, a.pre_output);
    return a;
}

double finite_or_throw(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw InvalidArgument(std::string(what) + " is not finite (training diverged?)");
    }
    return value;
}

double smooth_value(const AutoencoderParams& params, const Matrix& x, const Hyperparams& hp) {
    const Matrix recon = run(params, x).recon;
    const double m = static_cast<double>(x.rows());
    return (x - recon).squaredNorm() / (2.0 * m) +
           0.5 * hp.beta * (params.w1.squaredNorm() + params.w2.squaredNorm());
}

}  // namespace

void AutoencoderParams::validate() const {
    require_valid(w1, "W1");
    require_valid(w2, "W2");
    if (w1.cols() != w2.rows() || w1.rows() != w2.cols()) {
        throw InvalidArgument("W1 is " + shape(w1) + " and W2 is " + shape(w2) +
                              "; expected d x h and h x d");
    }
}

void Hyperparams::validate() const {
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
        throw InvalidArgument("alpha and beta must be finite and nonnegative");
    }
}

ForwardResult forward(const AutoencoderParams& params, const Matrix& x) {
    check_input(params, x);
    Activations a = run(params, x);
    return {std::move(a.hidden), std::move(a.recon)};
}

double smooth_objective(const AutoencoderParams& params, const Matrix& x, const Hyperparams& hp) {
    check_input(params, x);
    hp.validate();
    return finite_or_throw(smooth_value(params, x, hp), "objective");
}

double objective(const AutoencoderParams& params, const Matrix& x, const Hyperparams& hp) {
    const double smooth = smooth_objective(params, x, hp);
    return finite_or_throw(smooth + hp.alpha * l21_norm(params.w1), "objective");
}

Gradients smooth_gradients(const AutoencoderParams& params, const Matrix& x, const Hyperparams& hp) {
    check_input(params, x);
    hp.validate();
    const Activations a = run(params, x);
    const double inv_m = 1.0 / static_cast<double>(x.rows());

    // Error terms are taken at the pre-activations of each layer.
    const Matrix delta_out =
        ((a.recon - x).array() * activate_derivative(params.act_output, a.pre_output).array()).matrix();
    const Matrix delta_hidden =
        ((delta_out * params.w2.transpose()).array() *
         activate_derivative(params.act_hidden, a.pre_hidden).array())
            .matrix();

    Gradients g;
    g.g2 = inv_m * (a.hidden.transpose() * delta_out) + hp.beta * params.w2;
    g.g1 = inv_m * (x.transpose() * delta_hidden) + hp.beta * params.w1;
    return g;
}

Gradients finite_difference_gradient(const AutoencoderParams& params, const Matrix& x,
                                     const Hyperparams& hp, double eps) {
    check_input(params, x);
    hp.validate();
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw InvalidArgument("finite-difference eps must be positive, got " + std::to_string(eps));
    }
    AutoencoderParams probe = params;
    auto differentiate = [&](Matrix& w) {
        Matrix grad(w.rows(), w.cols());
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                const double saved = w(i, j);
                w(i, j) = saved + eps;
                const double up = smooth_value(probe, x, hp);
                w(i, j) = saved - eps;
                const double down = smooth_value(probe, x, hp);
                w(i, j) = saved;
                grad(i, j) = (up - down) / (2.0 * eps);
            }
        }
        return grad;
    };
    Gradients g;
    g.g1 = differentiate(probe.w1);
    g.g2 = differentiate(probe.w2);
    return g;
}

double max_relative_error(const Gradients& a, const Gradients& b) {
    if (a.g1.rows() != b.g1.rows() || a.g1.cols() != b.g1.cols() || a.g2.rows() != b.g2.rows() ||
        a.g2.cols() != b.g2.cols()) {
        throw InvalidArgument("gradient shapes differ");
    }
    double worst = 0.0;
    auto scan = [&worst](const Matrix& p, const Matrix& q) {
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            const double u = p.data()[i];
            const double v = q.data()[i];
            const double denom = std::max({1.0, std::abs(u), std::abs(v)});
            worst = std::max(worst, std::abs(u - v) / denom);
        }
    };
    scan(a.g1, b.g1);
    scan(a.g2, b.g2);
    return worst;
}

AutoencoderParams init_params(Eigen::Index input_dim, Eigen::Index hidden_dim, std::uint64_t seed,
                              double scale, Activation act_hidden, Activation act_output) {
    if (input_dim < 1 || hidden_dim < 1) {
        throw InvalidArgument("input and hidden dimensions must be >= 1");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw InvalidArgument("init scale must be positive");
    }
    std::mt19937_64 rng(seed);
    auto fill = [&rng](Eigen::Index rows, Eigen::Index cols, double stddev) {
        std::normal_distribution<double> normal(0.0, stddev);
        Matrix w(rows, cols);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
        return w;
    };
    AutoencoderParams p;
    p.w1 = fill(input_dim, hidden_dim, scale / std::sqrt(static_cast<double>(input_dim)));
    p.w2 = fill(hidden_dim, input_dim, scale / std::sqrt(static_cast<double>(hidden_dim)));
    p.act_hidden = act_hidden;
    p.act_output = act_output;
    return p;
}

double gradient_check(std::uint64_t seed, Eigen::Index m, Eigen::Index d, Eigen::Index h,
                      Activation act_hidden, Activation act_output, const Hyperparams& hp, double eps) {
    if (m < 1) throw InvalidArgument("gradient check needs m >= 1");
    AutoencoderParams params = init_params(d, h, seed, 1.0, act_hidden, act_output);
    std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix x(m, d);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    return max_relative_error(smooth_gradients(params, x, hp), finite_difference_gradient(params, x, hp, eps));
}

}  // namespace aefs
