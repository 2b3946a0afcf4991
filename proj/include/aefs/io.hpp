#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aefs/eval.hpp"
#include "aefs/model.hpp"
#include "aefs/numerics.hpp"
#include "aefs/selector.hpp"

namespace aefs {

struct Dataset {
    Matrix x;
    std::optional<LabelVector> labels;
    std::optional<std::vector<std::string>> feature_names;
    std::string source;

    void validate() const;
};

struct CsvOptions {
    bool has_header = false;
    std::optional<std::size_t> label_column;  ///< 0-based; may be categorical strings
    bool label_last = false;                   ///< label is the last column; ignored when label_column is set
};

/// Reads comma-separated numeric feature columns. Label strings are coded densely
/// in order of first appearance. Errors carry the 1-based line and column.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source);

/// Writes features (and labels as the last column when present) with round-trip precision.
void write_csv(const std::filesystem::path& path, const Dataset& ds);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

enum class NormalizeMode { ZScore, MinMax };

NormalizeMode parse_normalize(const std::string& name);
std::string to_string(NormalizeMode mode);

/// Per-feature z-score (population variance) or min-max scaling; constant features become 0.
Dataset normalize(const Dataset& ds, NormalizeMode mode);
Matrix normalize(const Matrix& x, NormalizeMode mode);

enum class Nonlinearity { Square, Product, SigmoidMix };

Nonlinearity parse_nonlinearity(const std::string& name);
std::string to_string(Nonlinearity kind);

struct SyntheticSpec {
    std::size_t num_samples = 500;
    std::size_t num_sources = 10;
    std::size_t num_redundant = 40;
    std::size_t num_noise = 10;
    Nonlinearity nonlinearity = Nonlinearity::Product;
    double noise_std = 0.1;

    std::size_t dim() const noexcept { return num_sources + num_redundant + num_noise; }
    void validate() const;
};

struct SyntheticData {
    Dataset data;
    std::vector<std::size_t> source_indices;  ///< column positions of the sources after shuffling
};

/// Sources are standard normals; redundant columns apply the nonlinearity to a randomly
/// drawn pair of sources (the pair may coincide) plus Gaussian noise; noise columns are
/// independent standard normals. Labels are 1 when the sources sum to a positive value.
SyntheticData gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

// Ranking artifact: {"d", "scores", "order", "config", "method"}.
nlohmann::json ranking_to_json(const FeatureRanking& ranking);
FeatureRanking ranking_from_json(const nlohmann::json& j);
void write_ranking(const std::filesystem::path& path, const FeatureRanking& ranking);
FeatureRanking read_ranking(const std::filesystem::path& path);

struct ReportRow {
    std::string dataset;
    std::string method;
    EvalReport report;
    double alpha = 0.0;
    double beta = 0.0;
    long long hidden = 0;
    std::uint64_t seed = 0;
};

inline constexpr const char* kReportHeader =
    "dataset,method,task,s,acc_mean,acc_std,restarts,alpha,beta,hidden,seed";

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);
void write_report_csv(const std::filesystem::path& path, const std::vector<ReportRow>& rows);

nlohmann::json params_to_json(const AutoencoderParams& params);
AutoencoderParams params_from_json(const nlohmann::json& j);
void write_params(const std::filesystem::path& path, const AutoencoderParams& params);
AutoencoderParams read_params(const std::filesystem::path& path);

/// Shortest decimal string that round-trips the double.
std::string format_double(double v);

}  // namespace aefs
