#pragma once

#include "orthoshrink/types.hpp"

namespace orthoshrink {

inline constexpr double kDefaultGapTol = 1e-8;
inline constexpr double kGapScaleFloor = 1e-300;

/// Eigenpairs of X^T X with eigenvalues sorted descending. Column signs of
/// the eigenvector matrix are not canonicalized; downstream formulas only use
/// sign-invariant combinations (v_k v_k^T, V D V^T).
struct SpectralPair {
    Vector eigenvalues;   // lambda_1 >= ... >= lambda_p >= 0
    Matrix eigenvectors;  // p x p orthogonal, columns match eigenvalue order
    double gap_tolerance = kDefaultGapTol;
};

/// Thin SVD X = U diag(sigma) V^T with sigma descending, sigma_k^2 = lambda_k.
struct SvdTriple {
    Matrix left;             // n x p, U^T U = I_p
    Vector singular_values;  // descending, >= 0
    Matrix right;            // p x p, V^T V = I_p
};

/// Result of the degeneracy guard. When not ok, (first, second) is the
/// offending eigenvalue pair (1-based); first == second == p marks a
/// near-zero smallest eigenvalue.
struct GapReport {
    bool ok = true;
    int first = 0;
    int second = 0;
};

SpectralPair gram_spectral(const Matrix& X);

SvdTriple thin_svd(const Matrix& X);

/// Guards the (lambda_k - lambda_l) denominators and the 1/lambda_k factors
/// used by the derivative and risk formulas. lambda must be sorted descending.
/// ok iff min_{k<l} (lambda_k - lambda_l) / max(lambda_1, floor) > rel_tol
/// and lambda_p / max(lambda_1, floor) > rel_tol.
GapReport eigen_gap_check(const Vector& lambda, double rel_tol = kDefaultGapTol);

/// Throws DegenerateSpectrumError when eigen_gap_check fails.
void require_distinct_spectrum(const Vector& lambda, double rel_tol = kDefaultGapTol);

/// Spectrum view of an SVD (lambda_k = sigma_k^2).
Vector gram_eigenvalues(const SvdTriple& svd);

}  // namespace orthoshrink
