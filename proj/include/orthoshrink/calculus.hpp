#pragma once

#include "orthoshrink/objective.hpp"
#include "orthoshrink/spectral.hpp"
#include "orthoshrink/types.hpp"

#include <utility>

namespace orthoshrink {

// Matrix calculus of orthogonally invariant functions h(X) = H(lambda),
// lambda the eigenvalues of X^T X. The matrix gradient is the entrywise
// n x p derivative; the matrix Laplacian is the p x p column-pair sum
// (Lap h)_{ij} = sum_a d^2 h / dX_{ai} dX_{aj}.
//
// All operations require a well-separated spectrum (see eigen_gap_check) and
// throw DegenerateSpectrumError otherwise. Indices are 0-based.

/// Gradient of the i-th eigenvalue: 2 X v_i v_i^T.
Matrix lambda_gradient(const Matrix& X, const SpectralPair& sp, int i);

/// d(v_j v_j^T)/dX_{ak}: derivative of the j-th spectral projector with
/// respect to one observation entry. Symmetric p x p with zero trace.
Matrix projector_jacobian(const Matrix& X, const SpectralPair& sp, int j, int a, int k);

/// Matrix gradient of h: 2 sum_i (dH/dlambda_i) X v_i v_i^T.
Matrix matrix_gradient_invariant(const Matrix& X, const SpectralPair& sp,
                                 const InvariantObjective& obj);
Matrix matrix_gradient_invariant(const Matrix& X, const InvariantObjective& obj);

/// Gram of the matrix gradient: V D V^T with D_kk = 4 lambda_k (dH/dlambda_k)^2.
Matrix gradient_gram(const Matrix& X, const SpectralPair& sp, const InvariantObjective& obj);
Matrix gradient_gram(const Matrix& X, const InvariantObjective& obj);

/// Diagonal of the matrix Laplacian in the eigenbasis:
/// D_kk = 4 lambda_k H''_k + 2n H'_k
///        + 2 sum_{l != k} lambda_l (H'_k - H'_l) / (lambda_k - lambda_l).
Vector laplacian_diagonal(const Vector& lambda, const Vector& grad, const Vector& hess_diag,
                          int n);

/// Matrix Laplacian of h: V D V^T with D from laplacian_diagonal.
Matrix matrix_laplacian_invariant(const Matrix& X, const SpectralPair& sp,
                                  const InvariantObjective& obj);
Matrix matrix_laplacian_invariant(const Matrix& X, const InvariantObjective& obj);

/// Scalar Laplacian, evaluated in its reduced form
/// 4 sum_k lambda_k H''_k
/// + 2 sum_k (n - p + 1 + 2 lambda_k sum_{l != k} 1/(lambda_k - lambda_l)) H'_k.
/// Equals the trace of the matrix Laplacian.
double scalar_laplacian_invariant(const Matrix& X, const SpectralPair& sp,
                                  const InvariantObjective& obj);
double scalar_laplacian_invariant(const Matrix& X, const InvariantObjective& obj);

/// Both routes of the pairwise-sum identity
///   sum_{l != k} (lambda_k + lambda_l)/(lambda_k - lambda_l)
///     = 2 lambda_k sum_{l != k} 1/(lambda_k - lambda_l) - p + 1,
/// returned as (lhs, rhs) for the caller to compare.
std::pair<Vector, Vector> lambda_pair_identity(const Vector& lambda);

}  // namespace orthoshrink
