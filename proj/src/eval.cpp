#include "aefs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "aefs/error.hpp"

namespace aefs {
namespace {

double squared_distance(const Matrix& x, Eigen::Index a, const Matrix& c, Eigen::Index b) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double diff = x(a, j) - c(b, j);
        total += diff * diff;
    }
    return total;
}

void check_same_rows(const Matrix& x, const LabelVector& labels) {
    require_valid(x, "samples");
    labels.validate();
    if (static_cast<std::size_t>(x.rows()) != labels.size()) {
        throw InvalidArgument("sample count " + std::to_string(x.rows()) + " differs from label count " +
                              std::to_string(labels.size()));
    }
}

/// Index of the nearest training sample to `query`; ties go to the smallest index.
Eigen::Index nearest(const Matrix& x, Eigen::Index query, const std::vector<Eigen::Index>& train) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index best_index = -1;
    for (Eigen::Index t : train) {
        if (t == query) continue;
        const double d = squared_distance(x, query, x, t);
        if (d < best || (d == best && t < best_index)) {
            best = d;
            best_index = t;
        }
    }
    return best_index;
}

struct MeanStd {
    double mean;
    double stddev;
};

MeanStd population_stats(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

}  // namespace

void LabelVector::validate() const {
    if (labels.empty()) throw InvalidArgument("label vector is empty");
    if (num_classes < 1) throw InvalidArgument("label vector needs num_classes >= 1");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes) {
            throw InvalidArgument("label " + std::to_string(labels[i]) + " at sample " + std::to_string(i) +
                                  " outside [0, " + std::to_string(num_classes) + ")");
        }
    }
}

LabelVector LabelVector::from(std::vector<int> labels) {
    LabelVector lv;
    const int top = labels.empty() ? -1 : *std::max_element(labels.begin(), labels.end());
    lv.labels = std::move(labels);
    lv.num_classes = top + 1;
    return lv;
}

LabelVector kmeans(const Matrix& x, int k, std::uint64_t seed, std::size_t max_iters) {
    require_valid(x, "samples");
    const Eigen::Index m = x.rows();
    if (k < 1 || k > m) {
        throw InvalidArgument("k-means needs 1 <= k <= m, got k = " + std::to_string(k) + ", m = " +
                              std::to_string(m));
    }
    if (max_iters < 1) throw InvalidArgument("k-means max_iters must be >= 1");

    std::mt19937_64 rng(seed);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix centroids(k, x.cols());
    for (int c = 0; c < k; ++c) centroids.row(c) = x.row(perm[static_cast<std::size_t>(c)]);

    std::vector<int> assign(static_cast<std::size_t>(m), -1);
    std::vector<double> dist(static_cast<std::size_t>(m), 0.0);
    for (std::size_t it = 0; it < max_iters; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < m; ++i) {
            int best_c = 0;
            double best_d = squared_distance(x, i, centroids, 0);
            for (int c = 1; c < k; ++c) {
                const double d = squared_distance(x, i, centroids, c);
                if (d < best_d) {
                    best_d = d;
                    best_c = c;
                }
            }
            const auto ui = static_cast<std::size_t>(i);
            changed |= assign[ui] != best_c;
            assign[ui] = best_c;
            dist[ui] = best_d;
        }

        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (int a : assign) ++counts[static_cast<std::size_t>(a)];
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] != 0) continue;
            // Farthest point among clusters that can spare one.
            Eigen::Index far = -1;
            for (Eigen::Index i = 0; i < m; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                if (counts[static_cast<std::size_t>(assign[ui])] < 2) continue;
                if (far < 0 || dist[ui] > dist[static_cast<std::size_t>(far)]) far = i;
            }
            const auto uf = static_cast<std::size_t>(far);
            --counts[static_cast<std::size_t>(assign[uf])];
            assign[uf] = c;
            dist[uf] = 0.0;
            counts[static_cast<std::size_t>(c)] = 1;
            changed = true;
        }

        centroids.setZero();
        for (Eigen::Index i = 0; i < m; ++i) centroids.row(assign[static_cast<std::size_t>(i)]) += x.row(i);
        for (int c = 0; c < k; ++c) centroids.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

        if (!changed) break;
    }
    LabelVector out;
    out.labels = std::move(assign);
    out.num_classes = k;
    return out;
}

std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
    const std::size_t n = weights.size();
    for (const auto& row : weights) {
        if (row.size() != n) throw InvalidArgument("assignment matrix must be square");
    }
    if (n == 0) return {};
    double top = 0.0;
    for (const auto& row : weights) {
        for (double w : row) top = std::max(top, w);
    }
    // Hungarian method (shortest augmenting path with potentials) on cost = top - weight,
    // 1-based rows/cols with a virtual column 0.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
    for (std::size_t row = 1; row <= n; ++row) {
        match_col[0] = row;
        std::size_t col0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[col0] = true;
            const std::size_t r0 = match_col[col0];
            double delta = inf;
            std::size_t col1 = 0;
            for (std::size_t col = 1; col <= n; ++col) {
                if (used[col]) continue;
                const double cur = (top - weights[r0 - 1][col - 1]) - u[r0] - v[col];
                if (cur < minv[col]) {
                    minv[col] = cur;
                    way[col] = col0;
                }
                if (minv[col] < delta) {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for (std::size_t col = 0; col <= n; ++col) {
                if (used[col]) {
                    u[match_col[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
        } while (match_col[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            match_col[col0] = match_col[col1];
            col0 = col1;
        } while (col0 != 0);
    }
    std::vector<std::size_t> assignment(n, 0);
    for (std::size_t col = 1; col <= n; ++col) assignment[match_col[col] - 1] = col - 1;
    return assignment;
}

double best_map_accuracy(const LabelVector& truth, const LabelVector& pred) {
    truth.validate();
    pred.validate();
    if (truth.size() != pred.size()) {
        throw InvalidArgument("label vectors differ in length: " + std::to_string(truth.size()) + " vs " +
                              std::to_string(pred.size()));
    }
    const auto n = static_cast<std::size_t>(std::max(truth.num_classes, pred.num_classes));
    std::vector<std::vector<double>> confusion(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        confusion[static_cast<std::size_t>(pred.labels[i])][static_cast<std::size_t>(truth.labels[i])] += 1.0;
    }
    const std::vector<std::size_t> map = max_weight_assignment(confusion);
    double hits = 0.0;
    for (std::size_t p = 0; p < n; ++p) hits += confusion[p][map[p]];
    return hits / static_cast<double>(truth.size());
}

double nn_classify_accuracy(const Matrix& x, const LabelVector& labels, const NnProtocol& protocol) {
    check_same_rows(x, labels);
    const Eigen::Index m = x.rows();
    if (m < 2) throw InvalidArgument("nearest-neighbour evaluation needs at least 2 samples");

    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
    if (std::holds_alternative<LeaveOneOut>(protocol)) {
        train.resize(static_cast<std::size_t>(m));
        std::iota(train.begin(), train.end(), 0);
        test = train;
    } else {
        const auto& split = std::get<Split>(protocol);
        if (!(split.ratio > 0.0 && split.ratio < 1.0)) {
            throw InvalidArgument("split ratio must lie in (0, 1)");
        }
        std::vector<Eigen::Index> perm(static_cast<std::size_t>(m));
        std::iota(perm.begin(), perm.end(), 0);
        std::mt19937_64 rng(split.seed);
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto n_train = static_cast<std::size_t>(std::llround(split.ratio * static_cast<double>(m)));
        if (n_train == 0 || n_train >= perm.size()) {
            throw InvalidArgument("split ratio leaves an empty train or test side");
        }
        train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
        test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
        std::sort(train.begin(), train.end());
    }

    std::size_t hits = 0;
    for (Eigen::Index q : test) {
        const Eigen::Index nn = nearest(x, q, train);
        hits += labels.labels[static_cast<std::size_t>(nn)] == labels.labels[static_cast<std::size_t>(q)];
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

std::string to_string(Task task) {
    return task == Task::Clustering ? "clustering" : "classification";
}

Task parse_task(const std::string& name) {
    if (name == "clustering") return Task::Clustering;
    if (name == "classification") return Task::Classification;
    throw InvalidArgument("unknown task '" + name + "' (expected clustering or classification)");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    // splitmix64 finalizer
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

EvalReport evaluate_columns(const Matrix& x_full, const LabelVector& labels,
                            const std::vector<std::size_t>& columns, const ExperimentOptions& options) {
    check_same_rows(x_full, labels);
    if (columns.empty()) throw InvalidArgument("no columns to evaluate");
    if (options.restarts < 1) throw InvalidArgument("restarts must be >= 1");
    const Matrix x = take_columns(x_full, columns);

    EvalReport report;
    report.task = options.task;
    report.s = columns.size();
    std::vector<double> accs;
    if (options.task == Task::Clustering) {
        for (std::size_t r = 0; r < options.restarts; ++r) {
            const LabelVector pred =
                kmeans(x, labels.num_classes, derive_seed(options.master_seed, r), options.kmeans_iters);
            accs.push_back(best_map_accuracy(labels, pred));
        }
    } else if (std::holds_alternative<LeaveOneOut>(options.protocol)) {
        accs.push_back(nn_classify_accuracy(x, labels, options.protocol));
    } else {
        Split split = std::get<Split>(options.protocol);
        for (std::size_t r = 0; r < options.restarts; ++r) {
            split.seed = derive_seed(options.master_seed, r);
            accs.push_back(nn_classify_accuracy(x, labels, split));
        }
    }
    const MeanStd stats = population_stats(accs);
    report.restarts = accs.size();
    report.acc_mean = stats.mean;
    report.acc_std = accs.size() == 1 ? 0.0 : stats.stddev;
    report.config = {{"master_seed", options.master_seed}};
    return report;
}

EvalReport run_experiment(const Matrix& x_full, const LabelVector& labels, const FeatureRanking& ranking,
                          std::size_t s, const ExperimentOptions& options) {
    ranking.validate();
    if (ranking.d() != static_cast<std::size_t>(x_full.cols())) {
        throw InvalidArgument("ranking covers " + std::to_string(ranking.d()) + " features but data has " +
                              std::to_string(x_full.cols()));
    }
    EvalReport report = evaluate_columns(x_full, labels, select_top(ranking, s), options);
    report.config["method"] = ranking.method;
    return report;
}

}  // namespace aefs
