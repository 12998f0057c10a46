#include "orthoshrink/risk.hpp"

#include "orthoshrink/calculus.hpp"
#include "orthoshrink/numdiff.hpp"

#include <cmath>

namespace orthoshrink {

Matrix matrix_quadratic_loss(const Matrix& estimate, const Matrix& mean) {
    const Matrix diff = estimate - mean;
    return diff.transpose() * diff;
}

RiskDiagonal sure_diagonal_general(const Vector& lambda, const InvariantObjective& obj,
                                   int n) {
    require_distinct_spectrum(lambda);
    const Vector g = obj.grad(lambda);
    const Vector h2 = obj.hess_diag(lambda);
    const int p = static_cast<int>(lambda.size());

    Vector d(p);
    for (int k = 0; k < p; ++k) {
        double pair_sum = 0.0;
        for (int l = 0; l < p; ++l) {
            if (l == k) continue;
            pair_sum += lambda[l] / (lambda[k] - lambda[l]) * (g[k] - g[l]);
        }
        d[k] = 4.0 * (2.0 * lambda[k] * h2[k] + n * g[k] + lambda[k] * g[k] * g[k] + pair_sum);
    }
    return RiskDiagonal{std::move(d)};
}

RiskDiagonal sure_diagonal_shrinkage(const Vector& lambda, const ShrinkageCoefficients& coeffs,
                                     int n) {
    require_distinct_spectrum(lambda);
    const Vector& c = coeffs.c;
    const int p = static_cast<int>(lambda.size());
    if (c.size() != p) {
        throw std::invalid_argument("sure_diagonal_shrinkage: coefficient length mismatch");
    }

    Vector d(p);
    for (int k = 0; k < p; ++k) {
        double pair_sum = 0.0;
        for (int l = 0; l < p; ++l) {
            if (l == k) continue;
            pair_sum += (c[k] * lambda[l] - c[l] * lambda[k]) / (lambda[k] - lambda[l]);
        }
        d[k] = c[k] * (c[k] - 2.0 * n + 4.0) / lambda[k] - 2.0 / lambda[k] * pair_sum;
    }
    return RiskDiagonal{std::move(d)};
}

RiskDiagonal sure_diagonal_stein(const Vector& lambda, const ProblemDims& dims) {
    require_distinct_spectrum(lambda);
    const int p = dims.p;
    const int n = dims.n;
    if (static_cast<int>(lambda.size()) != p) {
        throw std::invalid_argument("sure_diagonal_stein: lambda length mismatch");
    }

    Vector d(p);
    for (int k = 1; k <= p; ++k) {
        double pair_sum = 0.0;
        for (int l = 1; l <= p; ++l) {
            if (l == k) continue;
            pair_sum += static_cast<double>(k - l) / (lambda[k - 1] - lambda[l - 1]);
        }
        d[k - 1] = -static_cast<double>(n + p - 2 * k - 1) *
                       static_cast<double>(n - 3 * p + 2 * k - 1) / lambda[k - 1] +
                   4.0 * pair_sum;
    }
    return RiskDiagonal{std::move(d)};
}

namespace {

Matrix conjugate_diagonal(const SpectralPair& sp, const Vector& d, int n) {
    const int p = static_cast<int>(d.size());
    return n * Matrix::Identity(p, p) +
           sp.eigenvectors * d.asDiagonal() * sp.eigenvectors.transpose();
}

}  // namespace

Matrix sure_matrix_general(const Matrix& X, const SpectralPair& sp,
                           const InvariantObjective& obj, const ProblemDims& dims) {
    (void)X;
    validate_dims(dims);
    return conjugate_diagonal(sp, sure_diagonal_general(sp.eigenvalues, obj, dims.n).d,
                              dims.n);
}

Matrix sure_matrix_general(const Matrix& X, const InvariantObjective& obj,
                           const ProblemDims& dims) {
    return sure_matrix_general(X, gram_spectral(X), obj, dims);
}

Matrix sure_matrix_shrinkage(const Matrix& X, const SpectralPair& sp,
                             const ShrinkageCoefficients& c, const ProblemDims& dims) {
    (void)X;
    validate_dims(dims);
    return conjugate_diagonal(sp, sure_diagonal_shrinkage(sp.eigenvalues, c, dims.n).d,
                              dims.n);
}

Matrix sure_matrix_shrinkage(const Matrix& X, const ShrinkageCoefficients& c,
                             const ProblemDims& dims) {
    return sure_matrix_shrinkage(X, gram_spectral(X), c, dims);
}

Matrix sure_matrix_stein(const Matrix& X, const SpectralPair& sp, const ProblemDims& dims) {
    (void)X;
    validate_dims(dims);
    return conjugate_diagonal(sp, sure_diagonal_stein(sp.eigenvalues, dims).d, dims.n);
}

Matrix sure_matrix_stein(const Matrix& X, const ProblemDims& dims) {
    return sure_matrix_stein(X, gram_spectral(X), dims);
}

double sure_frobenius(const Matrix& X, const SpectralPair& sp, const InvariantObjective& obj,
                      const ProblemDims& dims) {
    (void)X;
    validate_dims(dims);
    require_distinct_spectrum(sp.eigenvalues, sp.gap_tolerance);

    const Vector& lambda = sp.eigenvalues;
    const Vector g = obj.grad(lambda);
    const Vector h2 = obj.hess_diag(lambda);
    const int n = dims.n;
    const int p = dims.p;

    double out = static_cast<double>(n) * p;
    for (int k = 0; k < p; ++k) {
        double inv_sum = 0.0;
        for (int l = 0; l < p; ++l) {
            if (l == k) continue;
            inv_sum += 1.0 / (lambda[k] - lambda[l]);
        }
        out += 4.0 * (2.0 * lambda[k] * h2[k] + n * g[k] + lambda[k] * g[k] * g[k]);
        out += 4.0 * g[k] * (2.0 * lambda[k] * inv_sum - p + 1);
    }
    return out;
}

double sure_frobenius(const Matrix& X, const InvariantObjective& obj,
                      const ProblemDims& dims) {
    return sure_frobenius(X, gram_spectral(X), obj, dims);
}

NumericSure divergence_sure_numeric(const Matrix& X, const EstimatorSpec& est,
                                    const ProblemDims& dims, double step) {
    validate_dims(dims);
    require_finite(X, "divergence_sure_numeric");

    const auto g = [&est](const Matrix& Y) -> Matrix { return apply_estimator(est, Y) - Y; };
    const Matrix g0 = g(X);
    if (!g0.allFinite()) {
        throw NumericError("divergence_sure_numeric: estimator output not finite");
    }
    const Matrix div = fd_matrix_divergence(X, g, step);

    NumericSure out;
    out.matrix = dims.n * Matrix::Identity(dims.p, dims.p) + div + div.transpose() +
                 g0.transpose() * g0;

    if (est.kind == EstimatorSpec::Kind::positive_part_shrinkage) {
        const Vector sigma = thin_svd(X).singular_values;
        for (int k = 0; k < dims.p; ++k) {
            if (std::abs(sigma[k] * sigma[k] - est.coefficients.c[k]) <
                10.0 * step * sigma[k]) {
                out.near_kink = true;
            }
        }
    }
    return out;
}

Matrix em_zero_mean_exact_risk(const ProblemDims& dims) {
    validate_dims(dims);
    if (dims.n - dims.p - 1 <= 0) {
        throw InvalidDimsError("em_zero_mean_exact_risk: need n - p - 1 > 0");
    }
    return static_cast<double>(dims.p + 1) * Matrix::Identity(dims.p, dims.p);
}

std::optional<Matrix> analytic_sure(const EstimatorSpec& est, const SvdTriple& svd,
                                    const ProblemDims& dims) {
    switch (est.kind) {
        case EstimatorSpec::Kind::mle:
            return dims.n * Matrix::Identity(dims.p, dims.p);
        case EstimatorSpec::Kind::shrinkage: {
            const Vector lambda = gram_eigenvalues(svd);
            const Vector d = sure_diagonal_shrinkage(lambda, est.coefficients, dims.n).d;
            return dims.n * Matrix::Identity(dims.p, dims.p) +
                   svd.right * d.asDiagonal() * svd.right.transpose();
        }
        case EstimatorSpec::Kind::pseudo_bayes: {
            const Vector lambda = gram_eigenvalues(svd);
            const Vector d = sure_diagonal_general(lambda, est.objective, dims.n).d;
            return dims.n * Matrix::Identity(dims.p, dims.p) +
                   svd.right * d.asDiagonal() * svd.right.transpose();
        }
        case EstimatorSpec::Kind::positive_part_shrinkage:
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace orthoshrink
