#include "aefs/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "aefs/error.hpp"

namespace aefs {
namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            return cells;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

bool parse_number(std::string_view cell, double& out) {
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

void Dataset::validate() const {
    require_valid(x, "dataset");
    if (labels) {
        labels->validate();
        if (labels->size() != static_cast<std::size_t>(x.rows())) {
            throw InvalidArgument("dataset has " + std::to_string(x.rows()) + " rows but " +
                                  std::to_string(labels->size()) + " labels");
        }
    }
    if (feature_names && feature_names->size() != static_cast<std::size_t>(x.cols())) {
        throw InvalidArgument("feature name count differs from column count");
    }
}

Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source) {
    std::vector<std::vector<double>> rows;
    std::vector<int> codes;
    std::map<std::string, int, std::less<>> code_of;
    std::optional<std::vector<std::string>> names;
    std::size_t width = 0;
    std::size_t line_no = 0;
    bool header_pending = options.has_header;
    std::optional<std::size_t> label_column = options.label_column;
    std::string line;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string_view> cells = split_commas(line);
        if (options.label_last && !label_column) label_column = cells.size() - 1;
        if (label_column && *label_column >= cells.size()) {
            throw ParseError(source + ": line " + std::to_string(line_no) + ": label column " +
                             std::to_string(*label_column + 1) + " missing (" +
                             std::to_string(cells.size()) + " columns)");
        }
        if (width == 0) {
            width = cells.size();
        } else if (cells.size() != width) {
            throw ParseError(source + ": line " + std::to_string(line_no) + ": expected " +
                             std::to_string(width) + " columns, found " + std::to_string(cells.size()));
        }
        if (header_pending) {
            header_pending = false;
            names.emplace();
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (label_column && c == *label_column) continue;
                names->emplace_back(cells[c]);
            }
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (label_column && c == *label_column) {
                const auto it = code_of.find(cells[c]);
                if (it != code_of.end()) {
                    codes.push_back(it->second);
                } else {
                    const int code = static_cast<int>(code_of.size());
                    code_of.emplace(std::string(cells[c]), code);
                    codes.push_back(code);
                }
                continue;
            }
            double v = 0.0;
            if (!parse_number(cells[c], v)) {
                throw ParseError(source + ": line " + std::to_string(line_no) + ", column " +
                                 std::to_string(c + 1) + ": not a finite number: '" + std::string(cells[c]) +
                                 "'");
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(source + ": no data rows");
    const std::size_t cols = rows.front().size();
    if (cols == 0) throw ParseError(source + ": no feature columns");

    Dataset ds;
    ds.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            ds.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    if (label_column) {
        ds.labels = LabelVector{std::move(codes), static_cast<int>(code_of.size())};
    }
    ds.feature_names = std::move(names);
    ds.source = source + " (" + std::to_string(ds.x.rows()) + "x" + std::to_string(ds.x.cols()) + ")";
    return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return parse_csv(in, options, path.string());
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out = open_for_write(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Dataset& ds) {
    ds.validate();
    std::ofstream out = open_for_write(path);
    if (ds.feature_names) {
        for (std::size_t j = 0; j < ds.feature_names->size(); ++j) {
            if (j) out << ',';
            out << (*ds.feature_names)[j];
        }
        if (ds.labels) out << ",label";
        out << '\n';
    }
    for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
        for (Eigen::Index j = 0; j < ds.x.cols(); ++j) {
            if (j) out << ',';
            out << format_double(ds.x(i, j));
        }
        if (ds.labels) out << ',' << ds.labels->labels[static_cast<std::size_t>(i)];
        out << '\n';
    }
}

NormalizeMode parse_normalize(const std::string& name) {
    if (name == "zscore") return NormalizeMode::ZScore;
    if (name == "minmax") return NormalizeMode::MinMax;
    throw InvalidArgument("unknown normalization '" + name + "' (expected zscore or minmax)");
}

std::string to_string(NormalizeMode mode) {
    return mode == NormalizeMode::ZScore ? "zscore" : "minmax";
}

Matrix normalize(const Matrix& x, NormalizeMode mode) {
    require_valid(x, "dataset");
    Matrix out(x.rows(), x.cols());
    const double m = static_cast<double>(x.rows());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const auto col = x.col(j);
        if (mode == NormalizeMode::ZScore) {
            const double mean = col.mean();
            const double var = (col.array() - mean).square().sum() / m;
            const double sd = std::sqrt(var);
            if (!(sd > 0.0) || sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
                out.col(j).setZero();
            } else {
                out.col(j) = ((col.array() - mean) / sd).matrix();
            }
        } else {
            const double lo = col.minCoeff();
            const double hi = col.maxCoeff();
            if (!(hi > lo)) {
                out.col(j).setZero();
            } else {
                out.col(j) = ((col.array() - lo) / (hi - lo)).matrix();
            }
        }
    }
    return out;
}

Dataset normalize(const Dataset& ds, NormalizeMode mode) {
    Dataset out = ds;
    out.x = normalize(ds.x, mode);
    out.source = ds.source + " [" + to_string(mode) + "]";
    return out;
}

Nonlinearity parse_nonlinearity(const std::string& name) {
    if (name == "square") return Nonlinearity::Square;
    if (name == "product") return Nonlinearity::Product;
    if (name == "sigmoid_mix") return Nonlinearity::SigmoidMix;
    throw InvalidArgument("unknown nonlinearity '" + name + "' (expected square, product or sigmoid_mix)");
}

std::string to_string(Nonlinearity kind) {
    switch (kind) {
        case Nonlinearity::Square: return "square";
        case Nonlinearity::Product: return "product";
        case Nonlinearity::SigmoidMix: return "sigmoid_mix";
    }
    return "unknown";
}

void SyntheticSpec::validate() const {
    if (num_sources < 1) throw InvalidArgument("synthetic data needs at least one source");
    if (num_samples < 1) throw InvalidArgument("synthetic data needs at least one sample");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw InvalidArgument("noise_std must be >= 0");
}

SyntheticData gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    const auto m = static_cast<Eigen::Index>(spec.num_samples);
    const auto ns = static_cast<Eigen::Index>(spec.num_sources);
    const std::size_t d = spec.dim();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<Eigen::Index> pick(0, ns - 1);

    Matrix raw(m, static_cast<Eigen::Index>(d));
    std::vector<std::string> raw_names;
    for (Eigen::Index j = 0; j < ns; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) raw(i, j) = normal(rng);
        raw_names.push_back("source_" + std::to_string(j));
    }
    for (std::size_t r = 0; r < spec.num_redundant; ++r) {
        const auto col = ns + static_cast<Eigen::Index>(r);
        const Eigen::Index a = pick(rng);
        const Eigen::Index b = pick(rng);
        for (Eigen::Index i = 0; i < m; ++i) {
            double v = 0.0;
            switch (spec.nonlinearity) {
                case Nonlinearity::Square: v = raw(i, a) * raw(i, a); break;
                case Nonlinearity::Product: v = raw(i, a) * raw(i, b); break;
                case Nonlinearity::SigmoidMix: v = sigmoid(raw(i, a) + raw(i, b)); break;
            }
            raw(i, col) = spec.noise_std > 0.0 ? v + spec.noise_std * normal(rng) : v;
        }
        raw_names.push_back("redundant_" + std::to_string(r));
    }
    for (std::size_t r = 0; r < spec.num_noise; ++r) {
        const auto col = ns + static_cast<Eigen::Index>(spec.num_redundant + r);
        for (Eigen::Index i = 0; i < m; ++i) raw(i, col) = normal(rng);
        raw_names.push_back("noise_" + std::to_string(r));
    }

    std::vector<std::size_t> perm(d);  // new column k holds raw column perm[k]
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    SyntheticData out;
    Dataset& ds = out.data;
    ds.x.resize(m, static_cast<Eigen::Index>(d));
    std::vector<std::string> names(d);
    for (std::size_t k = 0; k < d; ++k) {
        ds.x.col(static_cast<Eigen::Index>(k)) = raw.col(static_cast<Eigen::Index>(perm[k]));
        names[k] = raw_names[perm[k]];
        if (perm[k] < spec.num_sources) out.source_indices.push_back(k);
    }
    std::vector<int> labels(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        labels[static_cast<std::size_t>(i)] = raw.row(i).head(ns).sum() > 0.0 ? 1 : 0;
    }
    ds.labels = LabelVector{std::move(labels), 2};
    ds.feature_names = std::move(names);
    ds.source = "synthetic(" + to_string(spec.nonlinearity) + ", m=" + std::to_string(spec.num_samples) +
                ", d=" + std::to_string(d) + ", seed=" + std::to_string(seed) + ")";
    return out;
}

nlohmann::json ranking_to_json(const FeatureRanking& ranking) {
    ranking.validate();
    nlohmann::json j;
    j["method"] = ranking.method;
    j["d"] = ranking.d();
    j["scores"] = ranking.scores;
    j["order"] = ranking.order;
    j["config"] = ranking.config;
    return j;
}

FeatureRanking ranking_from_json(const nlohmann::json& j) {
    FeatureRanking r;
    try {
        r.method = j.at("method").get<std::string>();
        r.scores = j.at("scores").get<std::vector<double>>();
        r.order = j.at("order").get<std::vector<std::size_t>>();
        r.config = j.value("config", nlohmann::json::object());
        if (j.at("d").get<std::size_t>() != r.scores.size()) {
            throw ParseError("ranking field d disagrees with the score count");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed ranking JSON: ") + e.what());
    }
    r.validate();
    return r;
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 1 || cols < 1 || data.size() != static_cast<std::size_t>(rows * cols)) {
        throw ParseError("matrix JSON has inconsistent shape");
    }
    Matrix m(rows, cols);
    std::copy(data.begin(), data.end(), m.data());
    return m;
}

}  // namespace

nlohmann::json params_to_json(const AutoencoderParams& params) {
    params.validate();
    return {{"act_hidden", to_string(params.act_hidden)},
            {"act_output", to_string(params.act_output)},
            {"w1", matrix_to_json(params.w1)},
            {"w2", matrix_to_json(params.w2)}};
}

AutoencoderParams params_from_json(const nlohmann::json& j) {
    AutoencoderParams p;
    try {
        p.act_hidden = parse_activation(j.at("act_hidden").get<std::string>());
        p.act_output = parse_activation(j.at("act_output").get<std::string>());
        p.w1 = matrix_from_json(j.at("w1"));
        p.w2 = matrix_from_json(j.at("w2"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model JSON: ") + e.what());
    }
    p.validate();
    return p;
}

void write_params(const std::filesystem::path& path, const AutoencoderParams& params) {
    std::ofstream out = open_for_write(path);
    out << params_to_json(params).dump() << '\n';
}

AutoencoderParams read_params(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return params_from_json(j);
}

void write_ranking(const std::filesystem::path& path, const FeatureRanking& ranking) {
    std::ofstream out = open_for_write(path);
    out << ranking_to_json(ranking).dump(2) << '\n';
}

FeatureRanking read_ranking(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return ranking_from_json(j);
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    out << kReportHeader << '\n';
    for (const ReportRow& row : rows) {
        out << row.dataset << ',' << row.method << ',' << to_string(row.report.task) << ',' << row.report.s
            << ',' << format_double(row.report.acc_mean) << ',' << format_double(row.report.acc_std) << ','
            << row.report.restarts << ',' << format_double(row.alpha) << ',' << format_double(row.beta) << ','
            << row.hidden << ',' << row.seed << '\n';
    }
}

void write_report_csv(const std::filesystem::path& path, const std::vector<ReportRow>& rows) {
    std::ofstream out = open_for_write(path);
    write_report_csv(out, rows);
}

}  // namespace aefs
