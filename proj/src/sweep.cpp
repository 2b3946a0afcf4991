#include "aefs/sweep.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "aefs/error.hpp"

namespace aefs {
namespace {

struct GridPoint {
    double alpha;
    double beta;
    long long hidden;
};

std::vector<GridPoint> expand(const SweepGrid& grid, Method method) {
    std::vector<GridPoint> points;
    if (method == Method::Rsr) {
        for (double a : grid.alphas) points.push_back({a, 0.0, 0});
        return points;
    }
    for (long long h : grid.hiddens) {
        for (double a : grid.alphas) {
            for (double b : grid.betas) points.push_back({a, b, h});
        }
    }
    return points;
}

GridPointResult run_point(const Dataset& ds, const GridPoint& point, const std::vector<std::size_t>& s_values,
                          const SweepOptions& options) {
    GridPointResult out;
    out.alpha = point.alpha;
    out.beta = point.beta;
    out.hidden = point.hidden;
    std::uint64_t seed = 0;
    if (options.method == Method::Aefs) {
        TrainConfig cfg = options.train;
        cfg.hp = {point.alpha, point.beta};
        cfg.hidden_size = point.hidden;
        seed = cfg.seed;
        const TrainResult trained = train(ds.x, cfg);
        out.ranking = rank_features(trained.params);
        out.ranking.config = {{"alpha", point.alpha},          {"beta", point.beta},
                              {"hidden", point.hidden},        {"seed", cfg.seed},
                              {"epochs_run", trained.trace.epochs_run},
                              {"converged", trained.trace.converged}};
        out.trace = trained.trace;
    } else {
        RsrConfig cfg = options.rsr;
        cfg.lambda = point.alpha;
        seed = cfg.seed;
        const RsrResult solved = rsr_solve(ds.x, cfg);
        out.ranking = rank_rows(solved.w, "rsr");
        out.ranking.config = {{"lambda", point.alpha}, {"seed", cfg.seed},
                              {"epochs_run", solved.trace.epochs_run}, {"converged", solved.trace.converged}};
        out.trace = solved.trace;
    }
    for (Task task : options.tasks) {
        ExperimentOptions eval = options.eval;
        eval.task = task;
        for (std::size_t s : s_values) {
            ReportRow row;
            row.dataset = options.dataset_name;
            row.method = to_string(options.method);
            row.report = run_experiment(ds.x, *ds.labels, out.ranking, s, eval);
            row.alpha = point.alpha;
            row.beta = point.beta;
            row.hidden = point.hidden;
            row.seed = seed;
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

}  // namespace

SweepGrid SweepGrid::defaults() {
    SweepGrid g;
    g.alphas = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
    g.betas = g.alphas;
    g.hiddens = {128, 256, 512, 1024};
    g.s_values = {50, 100, 150, 200, 250, 300};
    return g;
}

std::string to_string(Method method) {
    return method == Method::Aefs ? "aefs" : "rsr";
}

Method parse_method(const std::string& name) {
    if (name == "aefs") return Method::Aefs;
    if (name == "rsr") return Method::Rsr;
    throw InvalidArgument("unknown method '" + name + "' (expected aefs or rsr)");
}

SweepResult sweep(const Dataset& ds, const SweepGrid& grid, const SweepOptions& options) {
    ds.validate();
    if (!ds.labels) throw InvalidArgument("sweep needs a labelled dataset");
    if (options.tasks.empty()) throw InvalidArgument("sweep needs at least one task");
    const auto d = static_cast<std::size_t>(ds.x.cols());
    std::vector<std::size_t> s_values;
    for (std::size_t s : grid.s_values) {
        if (s >= 1 && s <= d) s_values.push_back(s);
    }
    if (s_values.empty()) throw InvalidArgument("no selection size in the grid fits d = " + std::to_string(d));
    const std::vector<GridPoint> points = expand(grid, options.method);
    if (points.empty()) throw InvalidArgument("empty hyperparameter grid");

    SweepResult result;
    result.points.resize(points.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                result.points[i] = run_point(ds, points[i], s_values, options);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(options.threads, points.size()));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    // Rows within a grid point are ordered (task, s); pick the best per slot.
    const std::size_t slots = result.points.front().rows.size();
    for (std::size_t k = 0; k < slots; ++k) {
        const ReportRow* best = nullptr;
        for (const GridPointResult& p : result.points) {
            const ReportRow& row = p.rows[k];
            if (!best || row.report.acc_mean > best->report.acc_mean) best = &row;
        }
        result.best.push_back(*best);
    }
    if (options.include_all_features) {
        std::vector<std::size_t> all(d);
        for (std::size_t j = 0; j < d; ++j) all[j] = j;
        for (Task task : options.tasks) {
            ExperimentOptions eval = options.eval;
            eval.task = task;
            ReportRow row;
            row.dataset = options.dataset_name;
            row.method = "allfea";
            row.report = evaluate_columns(ds.x, *ds.labels, all, eval);
            result.best.push_back(std::move(row));
        }
    }
    return result;
}

}  // namespace aefs
