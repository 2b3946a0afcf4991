#pragma once

#include <cstdint>
#include <random>

#include "aefs/numerics.hpp"

namespace aefs::testing {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
}

inline Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

/// Random orthogonal matrix via QR of a Gaussian matrix.
inline Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed) {
    const Matrix g = random_matrix(n, n, seed);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ();
}

}  // namespace aefs::testing
