#pragma once

#include "orthoshrink/estimators.hpp"
#include "orthoshrink/objective.hpp"
#include "orthoshrink/spectral.hpp"
#include "orthoshrink/types.hpp"

#include <optional>

namespace orthoshrink {

// Per-sample unbiased risk matrices for orthogonally invariant estimators:
// each function returns the p x p matrix n I_p + V D V^T whose expectation
// over X ~ N(M, I) is the matrix quadratic risk E (Mhat - M)^T (Mhat - M).
// The noise variance is fixed at 1 throughout.

/// The diagonal D entering V D V^T, aligned with descending lambda.
struct RiskDiagonal {
    Vector d;
};

/// (Mhat - M)^T (Mhat - M).
Matrix matrix_quadratic_loss(const Matrix& estimate, const Matrix& mean);

/// General invariant objective:
/// D_kk = 4 (2 lambda_k H''_k + n H'_k + lambda_k H'_k^2
///        + sum_{l != k} lambda_l (H'_k - H'_l) / (lambda_k - lambda_l)).
RiskDiagonal sure_diagonal_general(const Vector& lambda, const InvariantObjective& obj, int n);

/// Spectral shrinkage family:
/// D_kk = c_k (c_k - 2n + 4) / lambda_k
///        - (2 / lambda_k) sum_{l != k} (c_k lambda_l - c_l lambda_k) / (lambda_k - lambda_l).
RiskDiagonal sure_diagonal_shrinkage(const Vector& lambda, const ShrinkageCoefficients& c,
                                     int n);

/// Stein's coefficients c_k = n + p - 2k - 1:
/// D_kk = -(n + p - 2k - 1)(n - 3p + 2k - 1) / lambda_k
///        + 4 sum_{l != k} (k - l) / (lambda_k - lambda_l).
RiskDiagonal sure_diagonal_stein(const Vector& lambda, const ProblemDims& dims);

Matrix sure_matrix_general(const Matrix& X, const SpectralPair& sp,
                           const InvariantObjective& obj, const ProblemDims& dims);
Matrix sure_matrix_general(const Matrix& X, const InvariantObjective& obj,
                           const ProblemDims& dims);

Matrix sure_matrix_shrinkage(const Matrix& X, const SpectralPair& sp,
                             const ShrinkageCoefficients& c, const ProblemDims& dims);
Matrix sure_matrix_shrinkage(const Matrix& X, const ShrinkageCoefficients& c,
                             const ProblemDims& dims);

Matrix sure_matrix_stein(const Matrix& X, const SpectralPair& sp, const ProblemDims& dims);
Matrix sure_matrix_stein(const Matrix& X, const ProblemDims& dims);

/// Frobenius (trace) form:
/// np + 4 sum_k (2 lambda_k H''_k + n H'_k + lambda_k H'_k^2)
///    + 4 sum_k H'_k (2 lambda_k sum_{l != k} 1/(lambda_k - lambda_l) - p + 1).
double sure_frobenius(const Matrix& X, const SpectralPair& sp, const InvariantObjective& obj,
                      const ProblemDims& dims);
double sure_frobenius(const Matrix& X, const InvariantObjective& obj, const ProblemDims& dims);

struct NumericSure {
    Matrix matrix;
    /// Set for positive-part estimators when some singular value sits within
    /// 10 * step * sigma_k of the clipping kink sigma_k^2 = c_k, where the
    /// divergence is not classical.
    bool near_kink = false;
};

/// Finite-difference route: n I_p + div g + (div g)^T + g^T g with
/// g(X) = Mhat(X) - X and the matrix divergence taken by central differences.
NumericSure divergence_sure_numeric(const Matrix& X, const EstimatorSpec& est,
                                    const ProblemDims& dims, double step = 1e-5);

/// Exact matrix quadratic risk of the Efron-Morris estimator at M = 0:
/// (p + 1) I_p, from E[(X^T X)^{-1}] = I_p / (n - p - 1) for a central
/// Wishart Gram matrix.
Matrix em_zero_mean_exact_risk(const ProblemDims& dims);

/// Per-sample risk matrix of an estimator when a closed form exists
/// (mle, shrinkage, pseudo_bayes); nullopt for positive-part kinds.
std::optional<Matrix> analytic_sure(const EstimatorSpec& est, const SvdTriple& svd,
                                    const ProblemDims& dims);

}  // namespace orthoshrink
