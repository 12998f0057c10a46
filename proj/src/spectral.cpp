#include "orthoshrink/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <string>

namespace orthoshrink {

SpectralPair gram_spectral(const Matrix& X) {
    require_finite(X, "gram_spectral");
    validate_dims({static_cast<int>(X.rows()), static_cast<int>(X.cols())});

    const Matrix gram = X.transpose() * X;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
    if (solver.info() != Eigen::Success) {
        throw NumericError("gram_spectral: eigendecomposition failed");
    }

    // Eigen returns ascending order; flip to descending.
    const auto p = gram.rows();
    SpectralPair out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    // The Gram matrix is PSD; clip the roundoff negatives in the tail.
    for (Eigen::Index k = 0; k < p; ++k) {
        out.eigenvalues[k] = std::max(out.eigenvalues[k], 0.0);
    }
    return out;
}

SvdTriple thin_svd(const Matrix& X) {
    require_finite(X, "thin_svd");
    validate_dims({static_cast<int>(X.rows()), static_cast<int>(X.cols())});

    Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return SvdTriple{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

GapReport eigen_gap_check(const Vector& lambda, double rel_tol) {
    const int p = static_cast<int>(lambda.size());
    if (p == 0) {
        return {};
    }
    const double scale = std::max(lambda[0], kGapScaleFloor);

    // Sorted descending, so the minimum pairwise gap is an adjacent gap.
    GapReport report;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < p; ++k) {
        const double gap = (lambda[k] - lambda[k + 1]) / scale;
        if (gap < worst) {
            worst = gap;
            report.first = k + 1;
            report.second = k + 2;
        }
    }
    if (worst <= rel_tol) {
        report.ok = false;
        return report;
    }
    if (lambda[p - 1] / scale <= rel_tol) {
        return GapReport{false, p, p};
    }
    return {};
}

void require_distinct_spectrum(const Vector& lambda, double rel_tol) {
    const GapReport report = eigen_gap_check(lambda, rel_tol);
    if (!report.ok) {
        const std::string what =
            report.first == report.second
                ? "near-zero eigenvalue at index " + std::to_string(report.first)
                : "near-degenerate eigenvalue pair (" + std::to_string(report.first) +
                      ", " + std::to_string(report.second) + ")";
        throw DegenerateSpectrumError(what, report.first, report.second);
    }
}

Vector gram_eigenvalues(const SvdTriple& svd) {
    return svd.singular_values.array().square();
}

}  // namespace orthoshrink
