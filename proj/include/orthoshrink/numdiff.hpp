#pragma once

#include "orthoshrink/types.hpp"

#include <functional>

namespace orthoshrink {

// Finite-difference ground truth for the analytic matrix calculus. These
// evaluate the target function directly and share no code with the closed
// forms they are used to check.

using ScalarField = std::function<double(const Matrix&)>;   // f: R^{n x p} -> R
using MatrixFieldFn = std::function<Matrix(const Matrix&)>; // g: R^{n x p} -> R^{n x p}

inline constexpr double kFdStepGradient = 1e-5;
inline constexpr double kFdStepLaplacian = 1e-4;

/// Entrywise central differences (f(X + h E_ai) - f(X - h E_ai)) / (2h).
Matrix fd_gradient(const Matrix& X, const ScalarField& f, double step = kFdStepGradient);

/// (i, j) entry = sum_a d^2 f / dX_ai dX_aj by nested central differences:
/// 3-point stencil on the diagonal, 4-point off it. Output symmetrized.
Matrix fd_matrix_laplacian(const Matrix& X, const ScalarField& f,
                           double step = kFdStepLaplacian);

/// (i, j) entry = sum_a dg_aj / dX_ai by central differences.
Matrix fd_matrix_divergence(const Matrix& X, const MatrixFieldFn& g,
                            double step = kFdStepGradient);

}  // namespace orthoshrink
