#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "aefs/error.hpp"
#include "aefs/eval.hpp"
#include "support.hpp"

using namespace aefs;
using aefs::testing::random_matrix;
using aefs::testing::random_orthogonal;

namespace {

/// Maximum over all injective maps of predicted labels onto true labels.
double brute_force_accuracy(const LabelVector& truth, const LabelVector& pred) {
    const int n = std::max(truth.num_classes, pred.num_classes);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            hits += perm[static_cast<std::size_t>(pred.labels[i])] == truth.labels[i];
        }
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(truth.size());
}

LabelVector random_labels(std::size_t m, int k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    LabelVector lv;
    lv.num_classes = k;
    for (std::size_t i = 0; i < m; ++i) lv.labels.push_back(pick(rng));
    return lv;
}

/// k well-separated distinct points, each repeated `copies` times.
std::pair<Matrix, LabelVector> duplicated_points(int k, int copies, std::uint64_t seed) {
    const Matrix centers = 10.0 * random_matrix(k, 3, seed);
    Matrix x(k * copies, 3);
    LabelVector lv;
    lv.num_classes = k;
    for (int c = 0; c < copies; ++c) {
        for (int j = 0; j < k; ++j) {
            x.row(c * k + j) = centers.row(j);
            lv.labels.push_back(j);
        }
    }
    return {x, lv};
}

}  // namespace

TEST_CASE("best_map_accuracy examples") {
    const LabelVector truth = LabelVector::from({0, 0, 1, 1, 2, 2});
    CHECK(best_map_accuracy(truth, truth) == 1.0);
    CHECK(best_map_accuracy(truth, LabelVector::from({2, 2, 0, 0, 1, 1})) == 1.0);
    CHECK(best_map_accuracy(LabelVector::from({0, 0, 1, 1}), LabelVector::from({1, 1, 1, 0})) == 0.75);
    CHECK_THROWS_AS(best_map_accuracy(truth, LabelVector::from({0, 1})), InvalidArgument);
}

TEST_CASE("property: assignment accuracy equals brute force") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> classes(1, 6);
    std::uniform_int_distribution<std::size_t> size(1, 40);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = size(rng);
        const LabelVector truth = random_labels(m, classes(rng), rng);
        const LabelVector pred = random_labels(m, classes(rng), rng);
        CHECK(best_map_accuracy(truth, pred) == brute_force_accuracy(truth, pred));
    }
}

TEST_CASE("property: assignment symmetry and sample-order invariance") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = 1 + trial % 6;
        const LabelVector truth = random_labels(30, k, rng);
        const LabelVector pred = random_labels(30, k, rng);
        const double acc = best_map_accuracy(truth, pred);
        CHECK(acc == best_map_accuracy(pred, truth));
        std::vector<std::size_t> perm(30);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        LabelVector t2 = truth, p2 = pred;
        for (std::size_t i = 0; i < 30; ++i) {
            t2.labels[i] = truth.labels[perm[i]];
            p2.labels[i] = pred.labels[perm[i]];
        }
        CHECK(best_map_accuracy(t2, p2) == acc);
    }
}

TEST_CASE("max_weight_assignment finds the optimal permutation") {
    const std::vector<std::vector<double>> w{{1, 9, 2}, {8, 1, 1}, {2, 2, 7}};
    CHECK(max_weight_assignment(w) == std::vector<std::size_t>{1, 0, 2});
    CHECK(max_weight_assignment({}).empty());
    CHECK_THROWS_AS(max_weight_assignment({{1, 2}}), InvalidArgument);
}

TEST_CASE("kmeans recovers duplicated points exactly") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [x, truth] = duplicated_points(5, 10, 100 + seed);
        const LabelVector pred = kmeans(x, 5, seed);
        CHECK(best_map_accuracy(truth, pred) == 1.0);
    }
}

TEST_CASE("kmeans edge cases and determinism") {
    const Matrix x = random_matrix(25, 4, 3);
    const LabelVector one = kmeans(x, 1, 7);
    CHECK(std::all_of(one.labels.begin(), one.labels.end(), [](int l) { return l == 0; }));
    CHECK(kmeans(x, 4, 11).labels == kmeans(x, 4, 11).labels);
    CHECK_THROWS_AS(kmeans(x, 26, 0), InvalidArgument);
    CHECK_THROWS_AS(kmeans(x, 0, 0), InvalidArgument);

    // Fewer distinct points than clusters still yields k non-empty clusters.
    const Matrix dup = Matrix::Ones(6, 2);
    const LabelVector lv = kmeans(dup, 3, 1);
    std::vector<int> counts(3, 0);
    for (int l : lv.labels) ++counts[static_cast<std::size_t>(l)];
    CHECK(std::all_of(counts.begin(), counts.end(), [](int c) { return c > 0; }));
}

TEST_CASE("nn_classify_accuracy examples") {
    const auto [x, labels] = duplicated_points(4, 2, 5);
    CHECK(nn_classify_accuracy(x, labels, LeaveOneOut{}) == 1.0);

    const Matrix single = random_matrix(10, 3, 6);
    CHECK(nn_classify_accuracy(single, LabelVector{std::vector<int>(10, 0), 1}, LeaveOneOut{}) == 1.0);

    Matrix line(4, 1);
    line << 0, 1, 10, 11;
    CHECK(nn_classify_accuracy(line, LabelVector::from({0, 0, 1, 1}), LeaveOneOut{}) == 1.0);
}

TEST_CASE("nn_classify_accuracy ties go to the smallest training index") {
    Matrix x(3, 1);
    x << 0, -1, 1;  // sample 0 is equidistant from samples 1 and 2
    const double acc = nn_classify_accuracy(x, LabelVector::from({0, 0, 1}), LeaveOneOut{});
    // 0 -> 1 (correct), 1 -> 0 (correct), 2 -> 0 (wrong)
    CHECK(acc == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("nn_classify_accuracy errors") {
    CHECK_THROWS_AS(nn_classify_accuracy(Matrix::Ones(1, 2), LabelVector::from({0}), LeaveOneOut{}), InvalidArgument);
    const Matrix x = random_matrix(5, 2, 7);
    const LabelVector lv = LabelVector::from({0, 1, 0, 1, 0});
    CHECK_THROWS_AS(nn_classify_accuracy(x, lv, Split{1.0, 0}), InvalidArgument);
    CHECK_THROWS_AS(nn_classify_accuracy(x, lv, Split{0.05, 0}), InvalidArgument);
    const double acc = nn_classify_accuracy(x, lv, Split{0.6, 3});
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
}

TEST_CASE("property: 1-NN accuracy is invariant to rotations and translations") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix x = random_matrix(40, 5, 400 + trial);
        const LabelVector lv = random_labels(40, 3, rng);
        const Matrix q = random_orthogonal(5, 500 + trial);
        const Eigen::RowVectorXd shift = random_matrix(1, 5, 600 + trial) * 3.0;
        const Matrix moved = (x * q).rowwise() + shift;
        CHECK(std::abs(nn_classify_accuracy(x, lv, LeaveOneOut{}) - nn_classify_accuracy(moved, lv, LeaveOneOut{})) <
              1e-9);
    }
}

TEST_CASE("run_experiment aggregates restarts") {
    const auto [x, labels] = duplicated_points(3, 10, 9);
    FeatureRanking ranking = rank_rows(Matrix::Identity(3, 3), "aefs");
    ExperimentOptions opts;
    opts.restarts = 5;
    const EvalReport rep = run_experiment(x, labels, ranking, 3, opts);
    CHECK(rep.acc_mean == 1.0);
    CHECK(rep.acc_std == 0.0);
    CHECK(rep.restarts == 5);

    opts.task = Task::Classification;
    const EvalReport loo = run_experiment(x, labels, ranking, 2, opts);
    CHECK(loo.restarts == 1);
    CHECK(loo.acc_std == 0.0);

    opts.protocol = Split{0.5, 0};
    const EvalReport split = run_experiment(x, labels, ranking, 2, opts);
    CHECK(split.restarts == 5);
    CHECK(split.acc_mean >= 0.0);
    CHECK(split.acc_mean <= 1.0);
}

TEST_CASE("run_experiment on random data stays within bounds and is reproducible") {
    std::mt19937_64 rng(10);
    const Matrix x = random_matrix(50, 6, 11);
    const LabelVector lv = random_labels(50, 4, rng);
    const FeatureRanking ranking = rank_rows(random_matrix(6, 3, 12), "aefs");
    ExperimentOptions opts;
    opts.restarts = 4;
    opts.master_seed = 99;
    const EvalReport a = run_experiment(x, lv, ranking, 3, opts);
    const EvalReport b = run_experiment(x, lv, ranking, 3, opts);
    CHECK(a.acc_mean == b.acc_mean);
    CHECK(a.acc_std == b.acc_std);
    CHECK(a.acc_mean >= 0.0);
    CHECK(a.acc_mean <= 1.0);
    CHECK_THROWS_AS(run_experiment(x, lv, ranking, 7, opts), InvalidArgument);
}

TEST_CASE("derived seeds differ across restarts") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}
