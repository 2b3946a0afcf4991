#include "aefs/numerics.hpp"

#include <cmath>

#include "aefs/error.hpp"

namespace aefs {

std::string to_string(Activation kind) {
    switch (kind) {
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Tanh: return "tanh";
        case Activation::ReLU: return "relu";
        case Activation::Identity: return "identity";
    }
    return "unknown";
}

Activation parse_activation(std::string_view name) {
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "tanh") return Activation::Tanh;
    if (name == "relu") return Activation::ReLU;
    if (name == "identity" || name == "linear") return Activation::Identity;
    throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

void require_valid(const Matrix& m, std::string_view what) {
    if (m.rows() < 1 || m.cols() < 1) {
        throw InvalidArgument(std::string(what) + ": empty matrix (" + std::to_string(m.rows()) +
                              "x" + std::to_string(m.cols()) + ")");
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (!std::isfinite(m(i, j))) {
                throw InvalidArgument(std::string(what) + ": non-finite entry at (" +
                                      std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
}

double l21_norm(const Matrix& m) {
    require_valid(m, "l21_norm");
    return m.rowwise().norm().sum();
}

double frobenius_norm_sq(const Matrix& m) {
    require_valid(m, "frobenius_norm_sq");
    return m.squaredNorm();
}

Vector row_norms(const Matrix& m) {
    require_valid(m, "row_norms");
    return m.rowwise().norm();
}

double sigmoid(double z) noexcept {
    // Branch on sign so exp() never overflows.
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Matrix activate(Activation kind, const Matrix& z) {
    require_valid(z, "activate");
    switch (kind) {
        case Activation::Sigmoid: return z.unaryExpr([](double v) { return sigmoid(v); });
        case Activation::Tanh: return z.array().tanh().matrix();
        case Activation::ReLU: return z.cwiseMax(0.0);
        case Activation::Identity: return z;
    }
    return z;
}

Matrix activate_derivative(Activation kind, const Matrix& z) {
    require_valid(z, "activate_derivative");
    switch (kind) {
        case Activation::Sigmoid:
            return z.unaryExpr([](double v) {
                const double s = sigmoid(v);
                return s * (1.0 - s);
            });
        case Activation::Tanh:
            return z.unaryExpr([](double v) {
                const double t = std::tanh(v);
                return 1.0 - t * t;
            });
        case Activation::ReLU: return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
        case Activation::Identity: return Matrix::Ones(z.rows(), z.cols());
    }
    return z;
}

}  // namespace aefs
