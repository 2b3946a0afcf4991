#include "aefs/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "aefs/error.hpp"

namespace aefs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double initial_step(const StepPolicy& step) {
    return std::visit([](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, FixedStep>) {
            return s.t;
        } else {
            return s.t0;
        }
    }, step);
}

bool all_finite(const std::vector<Matrix>& blocks) {
    return std::all_of(blocks.begin(), blocks.end(), [](const Matrix& b) { return b.allFinite(); });
}

std::vector<Matrix> forward_backward(const CompositeProblem& problem, const std::vector<Matrix>& blocks,
                                     const std::vector<Matrix>& grad, double t) {
    std::vector<Matrix> next(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        next[b] = blocks[b] - t * grad[b];
    }
    next[0] = group_soft_threshold(next[0], problem.l21_weight * t);
    return next;
}

double squared_distance(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += (a[i] - b[i]).squaredNorm();
    return total;
}

/// One accepted iteration of the engine; keeps the running step size between calls.
class Stepper {
public:
    Stepper(const CompositeProblem& problem, const StepPolicy& policy)
        : problem_(problem), policy_(policy), t_(initial_step(policy)) {}

    struct Outcome {
        double value;
        bool stalled;  // line search found no decrease at any representable step
    };

    Outcome step(std::vector<Matrix>& blocks, double current, std::size_t iteration) {
        const std::vector<Matrix> grad = problem_.smooth_gradient(blocks);
        if (!all_finite(grad)) {
            throw DivergenceError("non-finite gradient; step size too large", iteration);
        }
        if (const auto* fixed = std::get_if<FixedStep>(&policy_)) {
            std::vector<Matrix> next = forward_backward(problem_, blocks, grad, fixed->t);
            const double value = composite_value(problem_, next);
            if (!std::isfinite(value)) {
                throw DivergenceError("non-finite objective; step size too large", iteration);
            }
            blocks = std::move(next);
            return {value, false};
        }
        const auto& bt = std::get<Backtracking>(policy_);
        const double t_min = bt.t0 * 1e-20;
        const double t_max = bt.t0 * 1e4;
        for (double t = t_; t >= t_min; t *= bt.shrink) {
            std::vector<Matrix> next = forward_backward(problem_, blocks, grad, t);
            const double value = composite_value(problem_, next);
            const double moved = squared_distance(next, blocks);
            if (std::isfinite(value) && value <= current - (bt.c / t) * moved) {
                t_ = std::min(t / bt.shrink, t_max);
                const bool stalled = moved == 0.0;
                blocks = std::move(next);
                return {value, stalled};
            }
        }
        return {current, true};
    }

private:
    const CompositeProblem& problem_;
    StepPolicy policy_;
    double t_;
};

bool window_converged(const std::vector<double>& history, std::size_t window, double tol) {
    if (history.size() <= window) return false;
    const double then = history[history.size() - 1 - window];
    const double now = history.back();
    if (now == 0.0 && then == 0.0) return true;
    const double scale = std::max(std::abs(then), std::numeric_limits<double>::min());
    return std::abs(then - now) / scale < tol;
}

std::size_t row_support(const Matrix& w) {
    const Vector norms = w.rowwise().norm();
    return static_cast<std::size_t>((norms.array() > kSupportEps).count());
}

CompositeProblem autoencoder_problem(const Matrix& x, const Hyperparams& hp, Activation act_hidden,
                                     Activation act_output) {
    CompositeProblem problem;
    auto unpack = [act_hidden, act_output](const std::vector<Matrix>& blocks) {
        AutoencoderParams p;
        p.w1 = blocks[0];
        p.w2 = blocks[1];
        p.act_hidden = act_hidden;
        p.act_output = act_output;
        return p;
    };
    problem.smooth_value = [&x, hp, unpack](const std::vector<Matrix>& blocks) {
        if (!all_finite(blocks)) return kInf;
        try {
            return smooth_objective(unpack(blocks), x, hp);
        } catch (const InvalidArgument&) {
            return kInf;
        }
    };
    problem.smooth_gradient = [&x, hp, unpack](const std::vector<Matrix>& blocks) {
        Gradients g = smooth_gradients(unpack(blocks), x, hp);
        return std::vector<Matrix>{std::move(g.g1), std::move(g.g2)};
    };
    problem.l21_weight = hp.alpha;
    return problem;
}

}  // namespace

void validate(const StepPolicy& step) {
    if (const auto* fixed = std::get_if<FixedStep>(&step)) {
        if (!(fixed->t > 0.0) || !std::isfinite(fixed->t)) {
            throw InvalidArgument("fixed step size must be positive");
        }
        return;
    }
    const auto& bt = std::get<Backtracking>(step);
    if (!(bt.t0 > 0.0) || !std::isfinite(bt.t0)) throw InvalidArgument("t0 must be positive");
    if (!(bt.shrink > 0.0 && bt.shrink < 1.0)) throw InvalidArgument("shrink must lie in (0, 1)");
    if (!(bt.c >= 0.0 && bt.c < 0.5)) throw InvalidArgument("sufficient-decrease c must lie in [0, 0.5)");
}

void TrainConfig::validate() const {
    if (hidden_size < 1) throw InvalidArgument("hidden size must be >= 1");
    hp.validate();
    if (max_epochs < 1) throw InvalidArgument("max_epochs must be >= 1");
    if (!(tol >= 0.0)) throw InvalidArgument("tol must be >= 0");
    if (window < 1) throw InvalidArgument("stopping window must be >= 1");
    if (!(init_scale > 0.0) || !std::isfinite(init_scale)) throw InvalidArgument("init_scale must be positive");
    aefs::validate(step);
}

Vector vector_soft_threshold(const Vector& w, double lambda) {
    if (!(lambda >= 0.0)) {
        throw InvalidArgument("soft threshold lambda must be >= 0, got " + std::to_string(lambda));
    }
    const double norm = w.norm();
    if (norm <= lambda || norm == 0.0) {
        return Vector::Zero(w.size());
    }
    return w * ((norm - lambda) / norm);
}

Matrix group_soft_threshold(const Matrix& w, double lambda) {
    if (!(lambda >= 0.0)) {
        throw InvalidArgument("group soft threshold lambda must be >= 0, got " + std::to_string(lambda));
    }
    Matrix out = w;
    if (lambda == 0.0) return out;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        const double norm = w.row(i).norm();
        if (norm <= lambda) {
            out.row(i).setZero();
        } else {
            out.row(i) *= (norm - lambda) / norm;
        }
    }
    return out;
}

AutoencoderParams proximal_step(const AutoencoderParams& params, const Matrix& x, const Hyperparams& hp,
                                double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw InvalidArgument("step size must be positive, got " + std::to_string(t));
    }
    const Gradients g = smooth_gradients(params, x, hp);
    if (!g.g1.allFinite() || !g.g2.allFinite()) {
        throw DivergenceError("non-finite gradient; step size too large", 0);
    }
    AutoencoderParams next = params;
    next.w1 = group_soft_threshold(params.w1 - t * g.g1, hp.alpha * t);
    next.w2 = params.w2 - t * g.g2;
    return next;
}

double composite_value(const CompositeProblem& problem, const std::vector<Matrix>& blocks) {
    const double smooth = problem.smooth_value(blocks);
    if (!std::isfinite(smooth)) return kInf;
    return smooth + problem.l21_weight * blocks[0].rowwise().norm().sum();
}

SolveResult proximal_gradient(const CompositeProblem& problem, std::vector<Matrix> init,
                              const SolverOptions& options) {
    if (init.empty()) throw InvalidArgument("proximal_gradient needs at least one block");
    if (!(problem.l21_weight >= 0.0)) throw InvalidArgument("l21 weight must be >= 0");
    if (options.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
    validate(options.step);

    SolveResult result;
    result.blocks = std::move(init);
    TrainTrace& trace = result.trace;
    double current = composite_value(problem, result.blocks);
    if (!std::isfinite(current)) throw DivergenceError("initial objective is not finite", 0);
    trace.objective_history.push_back(current);

    Stepper stepper(problem, options.step);
    for (std::size_t it = 1; it <= options.max_iters; ++it) {
        const Stepper::Outcome out = stepper.step(result.blocks, current, it);
        trace.epochs_run = it;
        current = out.value;
        trace.objective_history.push_back(current);
        if (out.stalled || window_converged(trace.objective_history, options.window, options.tol)) {
            trace.converged = true;
            break;
        }
    }
    trace.final_row_support = row_support(result.blocks[0]);
    return result;
}

TrainResult train(const Matrix& x, const TrainConfig& cfg) {
    cfg.validate();
    require_valid(x, "training data");
    return train(x, cfg,
                 init_params(x.cols(), cfg.hidden_size, cfg.seed, cfg.init_scale, cfg.act_hidden,
                             cfg.act_output));
}

TrainResult train(const Matrix& x, const TrainConfig& cfg, AutoencoderParams init) {
    cfg.validate();
    require_valid(x, "training data");
    init.validate();
    if (init.hidden_dim() != cfg.hidden_size || init.input_dim() != x.cols()) {
        throw InvalidArgument("initial weights do not match data width / hidden size");
    }
    init.act_hidden = cfg.act_hidden;
    init.act_output = cfg.act_output;

    TrainResult result;
    if (cfg.batch_size == 0 || cfg.batch_size >= static_cast<std::size_t>(x.rows())) {
        SolverOptions options{cfg.max_epochs, cfg.tol, cfg.window, cfg.step};
        SolveResult solved = proximal_gradient(
            autoencoder_problem(x, cfg.hp, cfg.act_hidden, cfg.act_output),
            {std::move(init.w1), std::move(init.w2)}, options);
        result.params.w1 = std::move(solved.blocks[0]);
        result.params.w2 = std::move(solved.blocks[1]);
        result.params.act_hidden = cfg.act_hidden;
        result.params.act_output = cfg.act_output;
        result.trace = std::move(solved.trace);
        return result;
    }

    // Mini-batch: one prox step per batch, objective recorded on the full data after each epoch.
    const CompositeProblem full = autoencoder_problem(x, cfg.hp, cfg.act_hidden, cfg.act_output);
    std::vector<Matrix> blocks{std::move(init.w1), std::move(init.w2)};
    TrainTrace& trace = result.trace;
    double current = composite_value(full, blocks);
    if (!std::isfinite(current)) throw DivergenceError("initial objective is not finite", 0);
    trace.objective_history.push_back(current);

    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(x.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    std::size_t iteration = 0;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(rows.begin(), rows.end(), rng);
        for (std::size_t start = 0; start < rows.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(rows.size(), start + cfg.batch_size);
            Matrix batch(static_cast<Eigen::Index>(stop - start), x.cols());
            for (std::size_t r = start; r < stop; ++r) {
                batch.row(static_cast<Eigen::Index>(r - start)) = x.row(rows[r]);
            }
            const CompositeProblem local = autoencoder_problem(batch, cfg.hp, cfg.act_hidden, cfg.act_output);
            Stepper stepper(local, cfg.step);
            stepper.step(blocks, composite_value(local, blocks), ++iteration);
        }
        current = composite_value(full, blocks);
        if (!std::isfinite(current)) throw DivergenceError("objective diverged", iteration);
        trace.epochs_run = epoch;
        trace.objective_history.push_back(current);
        if (window_converged(trace.objective_history, cfg.window, cfg.tol)) {
            trace.converged = true;
            break;
        }
    }
    trace.final_row_support = row_support(blocks[0]);
    result.params.w1 = std::move(blocks[0]);
    result.params.w2 = std::move(blocks[1]);
    result.params.act_hidden = cfg.act_hidden;
    result.params.act_output = cfg.act_output;
    return result;
}

}  // namespace aefs
