#include "aefs/baselines.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "aefs/error.hpp"

namespace aefs {

void RsrConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("RSR lambda must be >= 0");
    if (max_iters < 1) throw InvalidArgument("RSR max_iters must be >= 1");
    if (!(tol >= 0.0)) throw InvalidArgument("RSR tol must be >= 0");
    if (window < 1) throw InvalidArgument("RSR window must be >= 1");
    aefs::validate(step);
}

double rsr_objective(const Matrix& w, const Matrix& x, double lambda) {
    require_valid(x, "input");
    require_valid(w, "W");
    if (w.rows() != x.cols() || w.cols() != x.cols()) {
        throw InvalidArgument("RSR weights must be d x d for d = " + std::to_string(x.cols()));
    }
    return (x - x * w).squaredNorm() + lambda * l21_norm(w);
}

RsrResult rsr_solve(const Matrix& x, const RsrConfig& cfg) {
    require_valid(x, "input");
    return rsr_solve(x, cfg, Matrix::Zero(x.cols(), x.cols()));
}

RsrResult rsr_solve(const Matrix& x, const RsrConfig& cfg, Matrix init) {
    cfg.validate();
    require_valid(x, "input");
    if (init.rows() != x.cols() || init.cols() != x.cols()) {
        throw InvalidArgument("RSR initial W must be d x d");
    }
    // Gram matrix once; the residual and gradient only need X^T X.
    const Matrix gram = x.transpose() * x;
    const double x_sq = x.squaredNorm();

    CompositeProblem problem;
    problem.smooth_value = [&gram, x_sq](const std::vector<Matrix>& blocks) {
        const Matrix& w = blocks[0];
        if (!w.allFinite()) return std::numeric_limits<double>::infinity();
        // ||X - XW||^2 = ||X||^2 - 2 tr(W^T G) + tr(W^T G W)
        const double value = x_sq - 2.0 * (gram.array() * w.array()).sum() +
                             (w.array() * (gram * w).array()).sum();
        return std::max(value, 0.0);
    };
    problem.smooth_gradient = [&gram](const std::vector<Matrix>& blocks) {
        return std::vector<Matrix>{2.0 * (gram * blocks[0] - gram)};
    };
    problem.l21_weight = cfg.lambda;

    SolverOptions options{cfg.max_iters, cfg.tol, cfg.window, cfg.step};
    SolveResult solved = proximal_gradient(problem, {std::move(init)}, options);
    return {std::move(solved.blocks[0]), std::move(solved.trace)};
}

double rsr_lambda_max(const Matrix& x) {
    require_valid(x, "input");
    const Matrix gram = x.transpose() * x;
    return 2.0 * gram.rowwise().norm().maxCoeff();
}

double linear_aefs_objective(const Matrix& w1, const Matrix& w2, const Matrix& x, double alpha) {
    require_valid(x, "input");
    require_valid(w1, "W1");
    require_valid(w2, "W2");
    if (w1.rows() != x.cols() || w2.cols() != x.cols() || w1.cols() != w2.rows()) {
        throw InvalidArgument("linear AEFS shapes: X " + std::to_string(x.rows()) + "x" +
                              std::to_string(x.cols()) + ", W1 " + std::to_string(w1.rows()) + "x" +
                              std::to_string(w1.cols()) + ", W2 " + std::to_string(w2.rows()) + "x" +
                              std::to_string(w2.cols()));
    }
    if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
    const double m = static_cast<double>(x.rows());
    return (x - x * w1 * w2).squaredNorm() / (2.0 * m) + alpha * l21_norm(w1);
}

}  // namespace aefs
