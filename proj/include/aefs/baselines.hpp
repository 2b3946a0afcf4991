#pragma once

#include <cstddef>
#include <cstdint>

#include "aefs/prox.hpp"

namespace aefs {

/// Regularized self-representation: min_W ||X - XW||_F^2 + lambda ||W||_{2,1}.
/// Note the missing 1/(2m) factor; it matches linear AEFS when lambda = 2 m alpha.
struct RsrConfig {
    double lambda = 1.0;
    std::size_t max_iters = 1000;
    double tol = 1e-6;
    std::size_t window = 5;
    StepPolicy step = Backtracking{};
    std::uint64_t seed = 0;  ///< provenance only; the solver starts from W = 0

    void validate() const;
};

struct RsrResult {
    Matrix w;  ///< d x d
    TrainTrace trace;
};

double rsr_objective(const Matrix& w, const Matrix& x, double lambda);

RsrResult rsr_solve(const Matrix& x, const RsrConfig& cfg);

/// Warm-started variant used by lambda paths.
RsrResult rsr_solve(const Matrix& x, const RsrConfig& cfg, Matrix init);

/// Smallest lambda for which W = 0 is optimal: 2 max_i ||x_i^T X||_2 over columns x_i.
double rsr_lambda_max(const Matrix& x);

/// (1/2m) ||X - X W1 W2||_F^2 + alpha ||W1||_{2,1}
double linear_aefs_objective(const Matrix& w1, const Matrix& w2, const Matrix& x, double alpha);

}  // namespace aefs
