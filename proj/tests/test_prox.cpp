#include <doctest.h>

#include <cmath>
#include <random>

#include "aefs/error.hpp"
#include "aefs/io.hpp"
#include "aefs/prox.hpp"
#include "support.hpp"

using namespace aefs;
using aefs::testing::random_matrix;

namespace {

/// argmin_w 0.5 ||w - v||^2 + lambda ||w|| by successively refined 2-D grids.
Eigen::Vector2d grid_prox(const Eigen::Vector2d& v, double lambda) {
    auto f = [&](const Eigen::Vector2d& w) { return 0.5 * (w - v).squaredNorm() + lambda * w.norm(); };
    Eigen::Vector2d center = v;
    double radius = v.norm() + 1.0;
    Eigen::Vector2d best = Eigen::Vector2d::Zero();
    double best_f = f(best);
    for (int level = 0; level < 7; ++level) {
        const int n = 100;
        for (int i = -n; i <= n; ++i) {
            for (int j = -n; j <= n; ++j) {
                const Eigen::Vector2d w = center + radius * Eigen::Vector2d(i, j) / n;
                const double value = f(w);
                if (value < best_f) {
                    best_f = value;
                    best = w;
                }
            }
        }
        center = best;
        radius /= 20.0;
    }
    return best;
}

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

bool non_increasing(const std::vector<double>& h) {
    for (std::size_t i = 1; i < h.size(); ++i) {
        if (h[i] > h[i - 1]) return false;
    }
    return true;
}

TrainConfig small_config() {
    TrainConfig cfg;
    cfg.hidden_size = 4;
    cfg.hp = {0.05, 0.01};
    cfg.tol = 1e-4;
    cfg.max_epochs = 200;
    cfg.seed = 9;
    return cfg;
}

}  // namespace

TEST_CASE("vector_soft_threshold examples") {
    CHECK(vector_soft_threshold(Vector::Zero(4), 1.5).isZero());
    CHECK(vector_soft_threshold(vec({1, 0}), 2.0).isZero());
    const Vector out = vector_soft_threshold(vec({3, 4}), 2.5);
    CHECK(out(0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(out(1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(vector_soft_threshold(vec({1, 1}), -0.1), InvalidArgument);
}

TEST_CASE("group_soft_threshold examples") {
    const Matrix w = random_matrix(5, 3, 1);
    CHECK(group_soft_threshold(w, 0.0) == w);
    CHECK(group_soft_threshold(w, w.rowwise().norm().maxCoeff()).isZero());
    const Matrix out = group_soft_threshold(w, 0.7);
    for (Eigen::Index i = 0; i < 5; ++i) {
        const Vector expected = vector_soft_threshold(w.row(i).transpose(), 0.7);
        CHECK((out.row(i).transpose() - expected).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(group_soft_threshold(w, -1.0), InvalidArgument);
}

TEST_CASE("property: closed form matches grid-searched proximal operator") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    std::uniform_real_distribution<double> lam(0.0, 2.5);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Vector2d v(coord(rng), coord(rng));
        const double lambda = lam(rng);
        const Vector closed = vector_soft_threshold(v, lambda);
        const Eigen::Vector2d grid = grid_prox(v, lambda);
        CHECK((closed - grid).cwiseAbs().maxCoeff() < 1e-4);
    }
}

TEST_CASE("property: exact support rule") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lam(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix w = random_matrix(12, 4, 50 + trial, 0.6);
        const double lambda = lam(rng);
        const Matrix out = group_soft_threshold(w, lambda);
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            const bool zero = (out.row(i).array() == 0.0).all();
            CHECK(zero == (w.row(i).norm() <= lambda));
        }
    }
}

TEST_CASE("property: shrinkage is monotone in lambda and non-expansive") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> lam(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix a = random_matrix(8, 5, 700 + trial);
        const Matrix b = random_matrix(8, 5, 800 + trial);
        double l1 = lam(rng), l2 = lam(rng);
        if (l1 > l2) std::swap(l1, l2);
        const Vector n1 = group_soft_threshold(a, l1).rowwise().norm();
        const Vector n2 = group_soft_threshold(a, l2).rowwise().norm();
        CHECK((n2.array() <= n1.array() + 1e-15).all());
        const double gap = (group_soft_threshold(a, l1) - group_soft_threshold(b, l1)).norm();
        CHECK(gap <= (a - b).norm() + 1e-12);
    }
}

TEST_CASE("proximal_step with alpha = 0 is a plain gradient step") {
    const Matrix x = random_matrix(10, 5, 5);
    const AutoencoderParams p = init_params(5, 3, 6);
    const Hyperparams hp{0.0, 0.1};
    const AutoencoderParams next = proximal_step(p, x, hp, 0.3);
    const Gradients g = smooth_gradients(p, x, hp);
    CHECK(next.w1.isApprox(p.w1 - 0.3 * g.g1));
    CHECK(next.w2.isApprox(p.w2 - 0.3 * g.g2));
}

TEST_CASE("proximal_step with a vanishing step leaves the weights in place") {
    const Matrix x = random_matrix(10, 5, 7);
    const AutoencoderParams p = init_params(5, 3, 8);
    const AutoencoderParams next = proximal_step(p, x, {0.5, 0.1}, 1e-12);
    CHECK((next.w1 - p.w1).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((next.w2 - p.w2).cwiseAbs().maxCoeff() < 1e-9);
    CHECK_THROWS_AS(proximal_step(p, x, {0.5, 0.1}, 0.0), InvalidArgument);
}

TEST_CASE("proximal_step with a backtracked step decreases the objective") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix x = random_matrix(15, 6, 900 + seed);
        const AutoencoderParams p = init_params(6, 4, 950 + seed);
        const Hyperparams hp{0.1, 0.01};
        const double before = objective(p, x, hp);
        double t = 1.0;
        bool decreased = false;
        for (int k = 0; k < 40 && !decreased; ++k, t *= 0.5) {
            decreased = objective(proximal_step(p, x, hp, t), x, hp) <= before;
        }
        CHECK(decreased);
    }
}

TEST_CASE("train is bit-for-bit deterministic") {
    const Matrix x = random_matrix(30, 6, 10);
    const TrainConfig cfg = small_config();
    const TrainResult a = train(x, cfg);
    const TrainResult b = train(x, cfg);
    CHECK(a.params.w1 == b.params.w1);
    CHECK(a.params.w2 == b.params.w2);
    CHECK(a.trace.objective_history == b.trace.objective_history);
    CHECK(a.trace.epochs_run == b.trace.epochs_run);
}

TEST_CASE("one fixed step with a large threshold zeroes the encoder exactly") {
    const Matrix x = random_matrix(20, 5, 11);
    TrainConfig cfg = small_config();
    const double t = 0.05;
    cfg.step = FixedStep{t};
    cfg.max_epochs = 1;
    const AutoencoderParams init = init_params(5, cfg.hidden_size, cfg.seed);
    const Matrix moved = init.w1 - t * smooth_gradients(init, x, cfg.hp).g1;
    cfg.hp.alpha = moved.rowwise().norm().maxCoeff() / t;
    const TrainResult r = train(x, cfg);
    CHECK(r.params.w1.isZero(0.0));
    CHECK(r.trace.final_row_support == 0);
}

TEST_CASE("one fixed-step epoch equals proximal_step") {
    const Matrix x = random_matrix(20, 5, 12);
    TrainConfig cfg = small_config();
    cfg.step = FixedStep{0.2};
    cfg.max_epochs = 1;
    const AutoencoderParams init = init_params(5, cfg.hidden_size, cfg.seed, cfg.init_scale);
    const TrainResult r = train(x, cfg);
    const AutoencoderParams expected = proximal_step(init, x, cfg.hp, 0.2);
    CHECK(r.params.w1 == expected.w1);
    CHECK(r.params.w2 == expected.w2);
    CHECK(r.trace.objective_history.size() == 2);
}

TEST_CASE("backtracking training on a synthetic instance descends monotonically and converges") {
    SyntheticSpec spec;
    spec.num_samples = 200;
    spec.num_sources = 3;
    spec.num_redundant = 4;
    spec.num_noise = 1;
    spec.nonlinearity = Nonlinearity::Product;
    const Matrix x = normalize(gen_synthetic(spec, 13).data.x, NormalizeMode::ZScore);
    TrainConfig cfg;
    cfg.hidden_size = 8;
    cfg.hp = {0.05, 0.01};
    cfg.tol = 1e-4;
    cfg.max_epochs = 2000;
    cfg.seed = 14;
    const TrainResult r = train(x, cfg);
    CHECK(non_increasing(r.trace.objective_history));
    CHECK(r.trace.converged);
    CHECK(r.trace.epochs_run <= 2000);
    CHECK(r.trace.objective_history.back() < r.trace.objective_history.front());
}

TEST_CASE("a fixed step that is far too large reports divergence with the iteration") {
    const Matrix x = 10.0 * random_matrix(20, 5, 15);
    TrainConfig cfg = small_config();
    cfg.act_hidden = Activation::Identity;
    cfg.step = FixedStep{1e3};
    cfg.max_epochs = 500;
    try {
        train(x, cfg);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.iteration() >= 1);
    }
}

TEST_CASE("train validates its configuration") {
    const Matrix x = random_matrix(10, 4, 16);
    TrainConfig cfg = small_config();
    cfg.hidden_size = 0;
    CHECK_THROWS_AS(train(x, cfg), InvalidArgument);
    cfg = small_config();
    cfg.step = Backtracking{0.1, 1.5, 1e-4};
    CHECK_THROWS_AS(train(x, cfg), InvalidArgument);
    cfg = small_config();
    CHECK_THROWS_AS(train(x, cfg, init_params(4, 5, 1)), InvalidArgument);
}

TEST_CASE("mini-batch mode is deterministic and records one objective per epoch") {
    const Matrix x = random_matrix(40, 5, 17);
    TrainConfig cfg = small_config();
    cfg.batch_size = 8;
    cfg.max_epochs = 10;
    cfg.tol = 0.0;
    const TrainResult a = train(x, cfg);
    const TrainResult b = train(x, cfg);
    CHECK(a.params.w1 == b.params.w1);
    CHECK(a.trace.objective_history.size() == 11);
    CHECK(a.trace.objective_history.back() < a.trace.objective_history.front());
}

TEST_CASE("generic engine solves a group-lasso denoising problem exactly") {
    // min 0.5 ||W - V||^2 + lambda ||W||_{2,1} has the closed form prox(V).
    const Matrix v = random_matrix(6, 3, 18);
    CompositeProblem problem;
    problem.smooth_value = [&v](const std::vector<Matrix>& b) { return 0.5 * (b[0] - v).squaredNorm(); };
    problem.smooth_gradient = [&v](const std::vector<Matrix>& b) { return std::vector<Matrix>{b[0] - v}; };
    problem.l21_weight = 0.8;
    SolverOptions options;
    options.max_iters = 500;
    options.tol = 1e-14;
    options.step = Backtracking{1.0, 0.5, 1e-4};
    const SolveResult r = proximal_gradient(problem, {Matrix::Zero(6, 3)}, options);
    CHECK((r.blocks[0] - group_soft_threshold(v, 0.8)).cwiseAbs().maxCoeff() < 1e-10);
}
