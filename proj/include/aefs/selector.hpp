#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aefs/model.hpp"

namespace aefs {

/// Per-feature importance (row norm of the encoder / self-representation matrix)
/// and the features sorted by descending score, ties broken by ascending index.
struct FeatureRanking {
    std::vector<double> scores;
    std::vector<std::size_t> order;
    std::string method = "aefs";
    nlohmann::json config = nlohmann::json::object();

    std::size_t d() const noexcept { return scores.size(); }

    /// Checks that `order` is a permutation sorted by the tie-break rule.
    void validate() const;
};

enum class Impute { Zero, FeatureMean };

Impute parse_impute(const std::string& name);

FeatureRanking rank_features(const AutoencoderParams& params);

/// Ranks rows of any weight matrix whose rows correspond to features.
FeatureRanking rank_rows(const Matrix& weights, std::string method);

/// First `s` entries of the ranking order, 1 <= s <= d.
std::vector<std::size_t> select_top(const FeatureRanking& ranking, std::size_t s);

/// Replaces unselected columns of `x` by the imputed value and runs the trained model.
Matrix reconstruct_from_selected(const AutoencoderParams& params, const Matrix& x,
                                 const std::vector<std::size_t>& selected, Impute impute);

/// Columns of `x` listed in `selected`, in that order.
Matrix take_columns(const Matrix& x, const std::vector<std::size_t>& selected);

double rmse(const Matrix& a, const Matrix& b);

}  // namespace aefs
