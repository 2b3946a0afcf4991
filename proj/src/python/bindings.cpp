#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aefs/aefs.hpp"

namespace py = pybind11;
using namespace aefs;

namespace {

StepPolicy make_step(const std::string& step, double t) {
    if (step == "fixed") return FixedStep{t};
    if (step == "backtracking") return Backtracking{t};
    throw InvalidArgument("step must be 'backtracking' or 'fixed'");
}

py::dict trace_dict(const TrainTrace& trace) {
    py::dict d;
    d["objective_history"] = trace.objective_history;
    d["epochs_run"] = trace.epochs_run;
    d["converged"] = trace.converged;
    d["final_row_support"] = trace.final_row_support;
    return d;
}

AutoencoderParams make_params(const Matrix& w1, const Matrix& w2, const std::string& act_hidden,
                              const std::string& act_output) {
    AutoencoderParams p;
    p.w1 = w1;
    p.w2 = w2;
    p.act_hidden = parse_activation(act_hidden);
    p.act_output = parse_activation(act_output);
    return p;
}

NnProtocol make_protocol(const std::string& protocol, double ratio, std::uint64_t seed) {
    if (protocol == "loo") return LeaveOneOut{};
    if (protocol == "split") return Split{ratio, seed};
    throw InvalidArgument("protocol must be 'loo' or 'split'");
}

}  // namespace

PYBIND11_MODULE(_aefs, m) {
    m.doc() = "AutoEncoder Feature Selector";

    py::register_exception<DivergenceError>(m, "DivergenceError");
    py::register_exception<ParseError>(m, "ParseError");

    m.def(
        "train",
        [](const Matrix& x, long hidden, double alpha, double beta, std::size_t max_epochs, double tol,
           std::uint64_t seed, const std::string& act_hidden, const std::string& act_output, const std::string& step,
           double t, std::size_t batch_size) {
            TrainConfig cfg;
            cfg.hidden_size = hidden;
            cfg.hp = {alpha, beta};
            cfg.max_epochs = max_epochs;
            cfg.tol = tol;
            cfg.seed = seed;
            cfg.act_hidden = parse_activation(act_hidden);
            cfg.act_output = parse_activation(act_output);
            cfg.step = make_step(step, t);
            cfg.batch_size = batch_size;
            TrainResult r;
            {
                py::gil_scoped_release release;
                r = train(x, cfg);
            }
            py::dict out = trace_dict(r.trace);
            out["w1"] = r.params.w1;
            out["w2"] = r.params.w2;
            return out;
        },
        py::arg("x"), py::arg("hidden") = 128, py::arg("alpha") = 0.0, py::arg("beta") = 0.0,
        py::arg("max_epochs") = 1000, py::arg("tol") = 1e-6, py::arg("seed") = 0, py::arg("act_hidden") = "sigmoid",
        py::arg("act_output") = "identity", py::arg("step") = "backtracking", py::arg("t") = 0.1,
        py::arg("batch_size") = 0,
        "Train the l2,1-penalized autoencoder. Returns w1, w2 and the objective trace.");

    m.def(
        "rank_features",
        [](const Matrix& w1) {
            const FeatureRanking r = rank_rows(w1, "aefs");
            return py::make_tuple(r.scores, r.order);
        },
        py::arg("w1"), "Row norms of W1 and the features sorted by descending norm.");

    m.def(
        "rsr_solve",
        [](const Matrix& x, double lambda, std::size_t max_iters, double tol) {
            RsrConfig cfg;
            cfg.lambda = lambda;
            cfg.max_iters = max_iters;
            cfg.tol = tol;
            const RsrResult r = rsr_solve(x, cfg);
            py::dict out = trace_dict(r.trace);
            out["w"] = r.w;
            return out;
        },
        py::arg("x"), py::arg("lam") = 1.0, py::arg("max_iters") = 1000, py::arg("tol") = 1e-6);
    m.def("rsr_lambda_max", &rsr_lambda_max, py::arg("x"));

    m.def(
        "forward",
        [](const Matrix& x, const Matrix& w1, const Matrix& w2, const std::string& a1, const std::string& a2) {
            const ForwardResult f = forward(make_params(w1, w2, a1, a2), x);
            return py::make_tuple(f.hidden, f.recon);
        },
        py::arg("x"), py::arg("w1"), py::arg("w2"), py::arg("act_hidden") = "sigmoid",
        py::arg("act_output") = "identity");
    m.def(
        "objective",
        [](const Matrix& x, const Matrix& w1, const Matrix& w2, double alpha, double beta, const std::string& a1,
           const std::string& a2) { return objective(make_params(w1, w2, a1, a2), x, {alpha, beta}); },
        py::arg("x"), py::arg("w1"), py::arg("w2"), py::arg("alpha"), py::arg("beta"),
        py::arg("act_hidden") = "sigmoid", py::arg("act_output") = "identity");
    m.def(
        "smooth_gradients",
        [](const Matrix& x, const Matrix& w1, const Matrix& w2, double alpha, double beta, const std::string& a1,
           const std::string& a2) {
            const Gradients g = smooth_gradients(make_params(w1, w2, a1, a2), x, {alpha, beta});
            return py::make_tuple(g.g1, g.g2);
        },
        py::arg("x"), py::arg("w1"), py::arg("w2"), py::arg("alpha"), py::arg("beta"),
        py::arg("act_hidden") = "sigmoid", py::arg("act_output") = "identity");
    m.def(
        "gradient_check",
        [](std::uint64_t seed, long m_, long d, long h, const std::string& a1, const std::string& a2) {
            return gradient_check(seed, m_, d, h, parse_activation(a1), parse_activation(a2));
        },
        py::arg("seed") = 0, py::arg("m") = 20, py::arg("d") = 15, py::arg("h") = 7,
        py::arg("act_hidden") = "sigmoid", py::arg("act_output") = "identity");

    m.def("vector_soft_threshold", &vector_soft_threshold, py::arg("w"), py::arg("lam"));
    m.def("group_soft_threshold", &group_soft_threshold, py::arg("w"), py::arg("lam"));

    m.def(
        "kmeans",
        [](const Matrix& x, int k, std::uint64_t seed, std::size_t max_iters) {
            return kmeans(x, k, seed, max_iters).labels;
        },
        py::arg("x"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iters") = 300);
    m.def(
        "best_map_accuracy",
        [](const std::vector<int>& truth, const std::vector<int>& pred) {
            return best_map_accuracy(LabelVector::from(truth), LabelVector::from(pred));
        },
        py::arg("truth"), py::arg("pred"));
    m.def(
        "nn_classify_accuracy",
        [](const Matrix& x, const std::vector<int>& labels, const std::string& protocol, double ratio,
           std::uint64_t seed) {
            return nn_classify_accuracy(x, LabelVector::from(labels), make_protocol(protocol, ratio, seed));
        },
        py::arg("x"), py::arg("labels"), py::arg("protocol") = "loo", py::arg("ratio") = 0.5, py::arg("seed") = 0);

    m.def(
        "normalize", [](const Matrix& x, const std::string& mode) { return normalize(x, parse_normalize(mode)); },
        py::arg("x"), py::arg("mode") = "zscore");
    m.def(
        "gen_synthetic",
        [](std::size_t samples, std::size_t sources, std::size_t redundant, std::size_t noise,
           const std::string& nonlinearity, double noise_std, std::uint64_t seed) {
            SyntheticSpec spec;
            spec.num_samples = samples;
            spec.num_sources = sources;
            spec.num_redundant = redundant;
            spec.num_noise = noise;
            spec.nonlinearity = parse_nonlinearity(nonlinearity);
            spec.noise_std = noise_std;
            const SyntheticData s = gen_synthetic(spec, seed);
            return py::make_tuple(s.data.x, s.data.labels->labels, s.source_indices);
        },
        py::arg("samples") = 500, py::arg("sources") = 10, py::arg("redundant") = 40, py::arg("noise") = 10,
        py::arg("nonlinearity") = "product", py::arg("noise_std") = 0.1, py::arg("seed") = 0,
        "Returns (x, labels, source_indices).");

    m.def(
        "cli_main", [](const std::vector<std::string>& args) { return cli_main(args); }, py::arg("args"),
        "Run the command-line tool in-process; returns the exit code.");
}
