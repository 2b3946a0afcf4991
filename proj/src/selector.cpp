#include "aefs/selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aefs/error.hpp"

namespace aefs {

void FeatureRanking::validate() const {
    const std::size_t n = scores.size();
    if (n == 0) throw InvalidArgument("ranking has no features");
    if (order.size() != n) throw InvalidArgument("ranking order length differs from score count");
    std::vector<bool> seen(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order[k];
        if (i >= n || seen[i]) throw InvalidArgument("ranking order is not a permutation");
        seen[i] = true;
        if (!std::isfinite(scores[i]) || scores[i] < 0.0) {
            throw InvalidArgument("ranking score " + std::to_string(i) + " is not a nonnegative number");
        }
        if (k > 0) {
            const std::size_t prev = order[k - 1];
            if (scores[prev] < scores[i] || (scores[prev] == scores[i] && prev > i)) {
                throw InvalidArgument("ranking order is not sorted by descending score");
            }
        }
    }
}

Impute parse_impute(const std::string& name) {
    if (name == "zero") return Impute::Zero;
    if (name == "mean" || name == "feature_mean") return Impute::FeatureMean;
    throw InvalidArgument("unknown imputation '" + name + "' (expected zero or mean)");
}

FeatureRanking rank_rows(const Matrix& weights, std::string method) {
    const Vector norms = row_norms(weights);
    FeatureRanking r;
    r.method = std::move(method);
    r.scores.assign(norms.data(), norms.data() + norms.size());
    r.order.resize(r.scores.size());
    std::iota(r.order.begin(), r.order.end(), std::size_t{0});
    std::stable_sort(r.order.begin(), r.order.end(),
                     [&s = r.scores](std::size_t a, std::size_t b) { return s[a] > s[b]; });
    return r;
}

FeatureRanking rank_features(const AutoencoderParams& params) {
    params.validate();
    return rank_rows(params.w1, "aefs");
}

std::vector<std::size_t> select_top(const FeatureRanking& ranking, std::size_t s) {
    if (s < 1 || s > ranking.d()) {
        throw InvalidArgument("cannot select " + std::to_string(s) + " of " +
                              std::to_string(ranking.d()) + " features");
    }
    return {ranking.order.begin(), ranking.order.begin() + static_cast<std::ptrdiff_t>(s)};
}

Matrix reconstruct_from_selected(const AutoencoderParams& params, const Matrix& x,
                                 const std::vector<std::size_t>& selected, Impute impute) {
    require_valid(x, "input");
    std::vector<bool> keep(static_cast<std::size_t>(x.cols()), false);
    for (std::size_t i : selected) {
        if (i >= keep.size()) {
            throw InvalidArgument("selected feature " + std::to_string(i) + " out of range for " +
                                  std::to_string(keep.size()) + " features");
        }
        keep[i] = true;
    }
    Matrix masked = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (keep[static_cast<std::size_t>(j)]) continue;
        const double fill = impute == Impute::Zero ? 0.0 : x.col(j).mean();
        masked.col(j).setConstant(fill);
    }
    return forward(params, masked).recon;
}

Matrix take_columns(const Matrix& x, const std::vector<std::size_t>& selected) {
    Matrix out(x.rows(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t k = 0; k < selected.size(); ++k) {
        if (selected[k] >= static_cast<std::size_t>(x.cols())) {
            throw InvalidArgument("column " + std::to_string(selected[k]) + " out of range");
        }
        out.col(static_cast<Eigen::Index>(k)) = x.col(static_cast<Eigen::Index>(selected[k]));
    }
    return out;
}

double rmse(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("rmse: shape mismatch");
    return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

}  // namespace aefs
