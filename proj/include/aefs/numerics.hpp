#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace aefs {

/// Dense row-major matrix; every public operation rejects empty or non-finite input.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class Activation { Sigmoid, Tanh, ReLU, Identity };

std::string to_string(Activation kind);
Activation parse_activation(std::string_view name);

/// Throws InvalidArgument naming `what` if `m` is empty or holds NaN/Inf.
void require_valid(const Matrix& m, std::string_view what);

/// Sum over rows of the row-wise Euclidean norms.
double l21_norm(const Matrix& m);

/// Sum of squared entries.
double frobenius_norm_sq(const Matrix& m);

/// Euclidean norm of every row.
Vector row_norms(const Matrix& m);

double sigmoid(double z) noexcept;

Matrix activate(Activation kind, const Matrix& z);

/// Elementwise derivative with respect to the pre-activation `z`.
/// ReLU uses the subgradient 0 at exactly 0.
Matrix activate_derivative(Activation kind, const Matrix& z);

}  // namespace aefs
