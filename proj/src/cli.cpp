#include "aefs/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aefs/baselines.hpp"
#include "aefs/error.hpp"
#include "aefs/eval.hpp"
#include "aefs/io.hpp"
#include "aefs/model.hpp"
#include "aefs/prox.hpp"
#include "aefs/selector.hpp"
#include "aefs/sweep.hpp"

namespace aefs {
namespace {

namespace fs = std::filesystem;

struct InputFlags {
    std::string path;
    bool header = false;
    int label_column = -2;  // -2: none, -1: last column
    std::string normalize = "zscore";

    void attach(CLI::App& app, bool need_labels) {
        app.add_option("--input", path, "Input CSV file")->required()->check(CLI::ExistingFile);
        app.add_flag("--header", header, "First CSV row holds feature names");
        auto* opt = app.add_option("--label-column", label_column,
                                   "0-based label column (-1 = last column)");
        if (need_labels) opt->required();
        app.add_option("--normalize", normalize, "zscore | minmax | none")
            ->check(CLI::IsMember({"zscore", "minmax", "none"}));
    }

    Dataset load() const {
        CsvOptions csv;
        csv.has_header = header;
        if (label_column == -1) {
            csv.label_last = true;
        } else if (label_column >= 0) {
            csv.label_column = static_cast<std::size_t>(label_column);
        } else if (label_column != -2) {
            throw InvalidArgument("--label-column must be >= -1");
        }
        Dataset ds = load_csv(path, csv);
        if (normalize != "none") ds = aefs::normalize(ds, parse_normalize(normalize));
        return ds;
    }

    std::string dataset_name() const {
        return fs::path(path).stem().string() + "/" + normalize;
    }
};

struct TrainFlags {
    long long hidden = 128;
    double alpha = 0.01;
    double beta = 0.001;
    std::size_t epochs = 1000;
    double tol = 1e-6;
    std::string step = "backtracking";
    double t = 0.1;
    std::uint64_t seed = 0;
    double init_scale = 1.0;
    std::string act_hidden = "sigmoid";
    std::string act_output = "identity";
    std::size_t batch_size = 0;

    void attach(CLI::App& app, bool with_hp) {
        app.add_option("--hidden", hidden, "Hidden layer size");
        if (with_hp) {
            app.add_option("--alpha", alpha, "l2,1 weight on W1")->check(CLI::NonNegativeNumber);
            app.add_option("--beta", beta, "Weight decay")->check(CLI::NonNegativeNumber);
        }
        app.add_option("--epochs", epochs, "Maximum iterations")->check(CLI::PositiveNumber);
        app.add_option("--tol", tol, "Relative objective change stopping threshold")
            ->check(CLI::NonNegativeNumber);
        app.add_option("--step", step, "backtracking | fixed")->check(CLI::IsMember({"backtracking", "fixed"}));
        app.add_option("--t", t, "Fixed step size, or initial step for backtracking")->check(CLI::PositiveNumber);
        app.add_option("--seed", seed, "Random seed");
        app.add_option("--init-scale", init_scale, "Initialization scale")->check(CLI::PositiveNumber);
        app.add_option("--act-hidden", act_hidden, "sigmoid | tanh | relu | identity");
        app.add_option("--act-output", act_output, "sigmoid | tanh | relu | identity");
        app.add_option("--batch-size", batch_size, "Mini-batch size (0 = full batch)");
    }

    StepPolicy policy() const {
        if (step == "fixed") return FixedStep{t};
        Backtracking bt;
        bt.t0 = t;
        return bt;
    }

    TrainConfig config() const {
        TrainConfig cfg;
        cfg.hidden_size = hidden;
        cfg.hp = {alpha, beta};
        cfg.max_epochs = epochs;
        cfg.tol = tol;
        cfg.step = policy();
        cfg.seed = seed;
        cfg.init_scale = init_scale;
        cfg.act_hidden = parse_activation(act_hidden);
        cfg.act_output = parse_activation(act_output);
        cfg.batch_size = batch_size;
        return cfg;
    }

    nlohmann::json summary() const {
        return {{"hidden", hidden}, {"alpha", alpha},          {"beta", beta},
                {"epochs", epochs}, {"tol", tol},              {"step", step},
                {"t", t},           {"seed", seed},            {"init_scale", init_scale},
                {"act_hidden", act_hidden}, {"act_output", act_output}, {"batch_size", batch_size}};
    }
};

nlohmann::json trace_summary(const TrainTrace& trace) {
    return {{"epochs_run", trace.epochs_run},
            {"converged", trace.converged},
            {"final_objective", trace.objective_history.back()},
            {"final_row_support", trace.final_row_support}};
}

void write_trace(const std::string& path, const TrainTrace& trace) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "iteration,objective\n";
    for (std::size_t i = 0; i < trace.objective_history.size(); ++i) {
        out << i << ',' << format_double(trace.objective_history[i]) << '\n';
    }
}

std::vector<std::size_t> default_s_values(std::size_t d) {
    std::vector<std::size_t> out;
    for (std::size_t s : SweepGrid::defaults().s_values) {
        if (s <= d) out.push_back(s);
    }
    if (out.empty()) out.push_back(d);
    return out;
}

std::vector<Task> parse_tasks(const std::string& name) {
    if (name == "both") return {Task::Clustering, Task::Classification};
    return {parse_task(name)};
}

struct EvalFlags {
    std::string task = "clustering";
    std::size_t restarts = 20;
    std::uint64_t eval_seed = 0;
    std::string protocol = "loo";
    double split_ratio = 0.5;

    void attach(CLI::App& app) {
        app.add_option("--task", task, "clustering | classification | both")
            ->check(CLI::IsMember({"clustering", "classification", "both"}));
        app.add_option("--restarts", restarts, "k-means restarts / split repetitions")->check(CLI::PositiveNumber);
        app.add_option("--eval-seed", eval_seed, "Master seed for evaluation restarts");
        app.add_option("--protocol", protocol, "Classification protocol: loo | split")
            ->check(CLI::IsMember({"loo", "split"}));
        app.add_option("--split-ratio", split_ratio, "Training fraction for the split protocol");
    }

    ExperimentOptions options() const {
        ExperimentOptions o;
        o.restarts = restarts;
        o.master_seed = eval_seed;
        if (protocol == "split") {
            o.protocol = Split{split_ratio, 0};
        } else {
            o.protocol = LeaveOneOut{};
        }
        return o;
    }
};

int run(int argc, const char* const* argv) {
    CLI::App app{"AEFS: autoencoder feature selection with l2,1-regularized encoder weights"};
    app.name("aefs");
    app.require_subcommand(1);

    // select
    InputFlags sel_in;
    TrainFlags sel_train;
    std::string sel_out, sel_model, sel_trace;
    auto* select = app.add_subcommand("select", "Train AEFS and write the feature ranking JSON");
    sel_in.attach(*select, false);
    sel_train.attach(*select, true);
    select->add_option("--out", sel_out, "Ranking JSON output")->required();
    select->add_option("--model-out", sel_model, "Also write the trained weights as JSON");
    select->add_option("--trace-out", sel_trace, "Write the objective history as CSV");

    // baseline-rsr
    InputFlags rsr_in;
    RsrConfig rsr_cfg;
    std::string rsr_out, rsr_trace, rsr_step = "backtracking";
    double rsr_t = 0.1;
    auto* rsr = app.add_subcommand("baseline-rsr", "Solve the RSR baseline and write its ranking JSON");
    rsr_in.attach(*rsr, false);
    rsr->add_option("--lambda", rsr_cfg.lambda, "l2,1 weight")->check(CLI::NonNegativeNumber);
    rsr->add_option("--iters", rsr_cfg.max_iters, "Maximum iterations")->check(CLI::PositiveNumber);
    rsr->add_option("--tol", rsr_cfg.tol, "Relative objective change stopping threshold");
    rsr->add_option("--seed", rsr_cfg.seed, "Recorded in the ranking provenance");
    rsr->add_option("--step", rsr_step, "backtracking | fixed")->check(CLI::IsMember({"backtracking", "fixed"}));
    rsr->add_option("--t", rsr_t, "Fixed step size, or initial step for backtracking")->check(CLI::PositiveNumber);
    rsr->add_option("--out", rsr_out, "Ranking JSON output")->required();
    rsr->add_option("--trace-out", rsr_trace, "Write the objective history as CSV");

    // evaluate
    InputFlags ev_in;
    EvalFlags ev_flags;
    std::string ev_ranking, ev_out, ev_name;
    std::vector<std::size_t> ev_s;
    bool ev_all = false;
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate a ranking by clustering / 1-NN accuracy");
    ev_in.attach(*evaluate, true);
    ev_flags.attach(*evaluate);
    evaluate->add_option("--ranking", ev_ranking, "Ranking JSON")->check(CLI::ExistingFile);
    evaluate->add_option("--s", ev_s, "Selection sizes (default 50,100,...,300 up to d)")->delimiter(',');
    evaluate->add_flag("--all-features", ev_all, "Also evaluate all features (method allfea)");
    evaluate->add_option("--dataset-name", ev_name, "Dataset column of the report");
    evaluate->add_option("--out", ev_out, "Report CSV output")->required();

    // reconstruct
    InputFlags rc_in;
    TrainFlags rc_train;
    std::string rc_model, rc_out, rc_map, rc_impute = "mean";
    std::size_t rc_s = 0;
    auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct the data from its top-s features");
    rc_in.attach(*reconstruct, false);
    rc_train.attach(*reconstruct, true);
    reconstruct->add_option("--model", rc_model, "Trained weights JSON (otherwise trains with the given flags)")
        ->check(CLI::ExistingFile);
    reconstruct->add_option("--s", rc_s, "Number of selected features")->required();
    reconstruct->add_option("--impute", rc_impute, "zero | mean")->check(CLI::IsMember({"zero", "mean"}));
    reconstruct->add_option("--out", rc_out, "Reconstructed matrix CSV")->required();
    reconstruct->add_option("--weight-map-out", rc_map, "Per-feature ||w_i||_2 CSV");

    // gradcheck
    std::uint64_t gc_seed = 0;
    double gc_tol = 1e-5;
    long long gc_m = 20, gc_d = 15, gc_h = 7;
    auto* gradcheck = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
    gradcheck->add_option("--seed", gc_seed, "Random seed");
    gradcheck->add_option("--tol", gc_tol, "Maximum allowed relative error")->check(CLI::PositiveNumber);
    gradcheck->add_option("--samples", gc_m, "Samples")->check(CLI::PositiveNumber);
    gradcheck->add_option("--features", gc_d, "Features")->check(CLI::PositiveNumber);
    gradcheck->add_option("--hidden", gc_h, "Hidden units")->check(CLI::PositiveNumber);

    // synth
    SyntheticSpec sy_spec;
    std::string sy_nonlin = "product", sy_out, sy_truth;
    std::uint64_t sy_seed = 0;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with nonlinear redundancy");
    synth->add_option("--samples", sy_spec.num_samples, "Rows")->check(CLI::PositiveNumber);
    synth->add_option("--sources", sy_spec.num_sources, "Independent source features")->check(CLI::PositiveNumber);
    synth->add_option("--redundant", sy_spec.num_redundant, "Nonlinear functions of sources");
    synth->add_option("--noise", sy_spec.num_noise, "Pure noise features");
    synth->add_option("--nonlinearity", sy_nonlin, "square | product | sigmoid_mix")
        ->check(CLI::IsMember({"square", "product", "sigmoid_mix"}));
    synth->add_option("--noise-std", sy_spec.noise_std, "Noise added to redundant features")
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", sy_seed, "Random seed");
    synth->add_option("--out", sy_out, "CSV output (header row, label last)")->required();
    synth->add_option("--truth-out", sy_truth, "JSON with the source column indices");

    // sweep
    InputFlags sw_in;
    TrainFlags sw_train;
    EvalFlags sw_eval;
    SweepGrid sw_grid = SweepGrid::defaults();
    std::string sw_method = "aefs", sw_out, sw_name, sw_rankings;
    std::size_t sw_threads = 1, sw_rsr_iters = 1000;
    bool sw_all = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "Grid search over alpha, beta and hidden size; best report per s");
    sw_in.attach(*sweep_cmd, true);
    sw_train.attach(*sweep_cmd, false);
    sw_eval.attach(*sweep_cmd);
    sweep_cmd->add_option("--method", sw_method, "aefs | rsr (rsr uses --alphas as lambda)")
        ->check(CLI::IsMember({"aefs", "rsr"}));
    sweep_cmd->add_option("--alphas", sw_grid.alphas, "alpha grid")->delimiter(',');
    sweep_cmd->add_option("--betas", sw_grid.betas, "beta grid")->delimiter(',');
    sweep_cmd->add_option("--hiddens", sw_grid.hiddens, "hidden size grid")->delimiter(',');
    sweep_cmd->add_option("--s", sw_grid.s_values, "selection sizes")->delimiter(',');
    sweep_cmd->add_option("--rsr-iters", sw_rsr_iters, "RSR iterations")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--threads", sw_threads, "Grid points evaluated concurrently")->check(CLI::PositiveNumber);
    sweep_cmd->add_flag("--all-features", sw_all, "Also report the all-features baseline");
    sweep_cmd->add_option("--dataset-name", sw_name, "Dataset column of the report");
    sweep_cmd->add_option("--rankings-dir", sw_rankings, "Write every grid point's ranking JSON here");
    sweep_cmd->add_option("--out", sw_out, "Report CSV output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (select->parsed()) {
        const Dataset ds = sel_in.load();
        const TrainResult trained = train(ds.x, sel_train.config());
        FeatureRanking ranking = rank_features(trained.params);
        ranking.config = sel_train.summary();
        ranking.config["dataset"] = sel_in.dataset_name();
        ranking.config["trace"] = trace_summary(trained.trace);
        write_ranking(sel_out, ranking);
        if (!sel_model.empty()) write_params(sel_model, trained.params);
        write_trace(sel_trace, trained.trace);
        return 0;
    }
    if (rsr->parsed()) {
        const Dataset ds = rsr_in.load();
        if (rsr_step == "fixed") {
            rsr_cfg.step = FixedStep{rsr_t};
        } else {
            Backtracking bt;
            bt.t0 = rsr_t;
            rsr_cfg.step = bt;
        }
        const RsrResult solved = rsr_solve(ds.x, rsr_cfg);
        FeatureRanking ranking = rank_rows(solved.w, "rsr");
        ranking.config = {{"lambda", rsr_cfg.lambda}, {"iters", rsr_cfg.max_iters}, {"tol", rsr_cfg.tol},
                          {"seed", rsr_cfg.seed},     {"step", rsr_step},           {"t", rsr_t},
                          {"dataset", rsr_in.dataset_name()}, {"trace", trace_summary(solved.trace)}};
        write_ranking(rsr_out, ranking);
        write_trace(rsr_trace, solved.trace);
        return 0;
    }
    if (evaluate->parsed()) {
        if (ev_ranking.empty() && !ev_all) throw InvalidArgument("evaluate needs --ranking or --all-features");
        const Dataset ds = ev_in.load();
        const std::string name = ev_name.empty() ? ev_in.dataset_name() : ev_name;
        const auto d = static_cast<std::size_t>(ds.x.cols());
        std::vector<ReportRow> rows;
        for (Task task : parse_tasks(ev_flags.task)) {
            ExperimentOptions opts = ev_flags.options();
            opts.task = task;
            if (!ev_ranking.empty()) {
                const FeatureRanking ranking = read_ranking(ev_ranking);
                const std::vector<std::size_t> sizes = ev_s.empty() ? default_s_values(d) : ev_s;
                for (std::size_t s : sizes) {
                    ReportRow row;
                    row.dataset = name;
                    row.method = ranking.method;
                    row.report = run_experiment(ds.x, *ds.labels, ranking, s, opts);
                    row.alpha = ranking.config.value("alpha", ranking.config.value("lambda", 0.0));
                    row.beta = ranking.config.value("beta", 0.0);
                    row.hidden = ranking.config.value("hidden", 0LL);
                    row.seed = ranking.config.value("seed", std::uint64_t{0});
                    rows.push_back(std::move(row));
                }
            }
            if (ev_all) {
                std::vector<std::size_t> all(d);
                for (std::size_t j = 0; j < d; ++j) all[j] = j;
                ReportRow row;
                row.dataset = name;
                row.method = "allfea";
                row.report = evaluate_columns(ds.x, *ds.labels, all, opts);
                rows.push_back(std::move(row));
            }
        }
        write_report_csv(fs::path(ev_out), rows);
        return 0;
    }
    if (reconstruct->parsed()) {
        const Dataset ds = rc_in.load();
        const AutoencoderParams params = rc_model.empty() ? train(ds.x, rc_train.config()).params
                                                          : read_params(rc_model);
        const FeatureRanking ranking = rank_features(params);
        const Matrix recon =
            reconstruct_from_selected(params, ds.x, select_top(ranking, rc_s), parse_impute(rc_impute));
        write_matrix_csv(rc_out, recon);
        if (!rc_map.empty()) {
            write_matrix_csv(rc_map, Eigen::Map<const Matrix>(ranking.scores.data(), 1,
                                                              static_cast<Eigen::Index>(ranking.d())));
        }
        std::cout << "rmse " << format_double(rmse(ds.x, recon)) << '\n';
        return 0;
    }
    if (gradcheck->parsed()) {
        const Activation kinds[] = {Activation::Sigmoid, Activation::Tanh, Activation::Identity};
        double worst = 0.0;
        for (Activation a : kinds) {
            for (Activation b : kinds) {
                const double err = gradient_check(gc_seed, gc_m, gc_d, gc_h, a, b);
                std::cout << to_string(a) << '/' << to_string(b) << " max_rel_err " << err << '\n';
                worst = std::max(worst, err);
            }
        }
        const bool ok = worst < gc_tol;
        std::cout << (ok ? "PASS" : "FAIL") << " max_rel_err " << worst << " tol " << gc_tol << '\n';
        return ok ? 0 : 1;
    }
    if (synth->parsed()) {
        sy_spec.nonlinearity = parse_nonlinearity(sy_nonlin);
        const SyntheticData data = gen_synthetic(sy_spec, sy_seed);
        write_csv(sy_out, data.data);
        if (!sy_truth.empty()) {
            std::ofstream out(sy_truth, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open '" + sy_truth + "' for writing");
            out << nlohmann::json{{"source_indices", data.source_indices},
                                  {"label_column", sy_spec.dim()}}
                       .dump(2)
                << '\n';
        }
        return 0;
    }
    if (sweep_cmd->parsed()) {
        const Dataset ds = sw_in.load();
        SweepOptions opts;
        opts.method = parse_method(sw_method);
        opts.train = sw_train.config();
        opts.rsr.max_iters = sw_rsr_iters;
        opts.tasks = parse_tasks(sw_eval.task);
        opts.eval = sw_eval.options();
        opts.threads = sw_threads;
        opts.dataset_name = sw_name.empty() ? sw_in.dataset_name() : sw_name;
        opts.include_all_features = sw_all;
        const SweepResult result = aefs::sweep(ds, sw_grid, opts);
        if (!sw_rankings.empty()) {
            fs::create_directories(sw_rankings);
            for (const GridPointResult& p : result.points) {
                const std::string file = sw_method + "_a" + format_double(p.alpha) + "_b" + format_double(p.beta) +
                                         "_h" + std::to_string(p.hidden) + ".json";
                write_ranking(fs::path(sw_rankings) / file, p.ranking);
            }
        }
        write_report_csv(fs::path(sw_out), result.best);
        return 0;
    }
    return 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "aefs: error: " << e.what() << '\n';
        return 1;
    }
}

int cli_main(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"aefs"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace aefs
