#include "orthoshrink/calculus.hpp"

#include <stdexcept>
#include <string>

namespace orthoshrink {

namespace {

void check_index(int i, int p, const char* who) {
    if (i < 0 || i >= p) {
        throw std::out_of_range(std::string(who) + ": index " + std::to_string(i) +
                                " out of range for p=" + std::to_string(p));
    }
}

}  // namespace

Matrix lambda_gradient(const Matrix& X, const SpectralPair& sp, int i) {
    const int p = static_cast<int>(sp.eigenvalues.size());
    check_index(i, p, "lambda_gradient");
    require_distinct_spectrum(sp.eigenvalues, sp.gap_tolerance);
    const Vector v = sp.eigenvectors.col(i);
    return 2.0 * (X * v) * v.transpose();
}

Matrix projector_jacobian(const Matrix& X, const SpectralPair& sp, int j, int a, int k) {
    const int p = static_cast<int>(sp.eigenvalues.size());
    const int n = static_cast<int>(X.rows());
    check_index(j, p, "projector_jacobian");
    check_index(k, p, "projector_jacobian");
    if (a < 0 || a >= n) {
        throw std::out_of_range("projector_jacobian: row index out of range");
    }
    require_distinct_spectrum(sp.eigenvalues, sp.gap_tolerance);

    const Vector& lambda = sp.eigenvalues;
    const Matrix& V = sp.eigenvectors;
    const Vector xv = X.row(a) * V;  // (XV)_{a.}

    // dv_j/dX_{ak} = sum_{l != j} v_l / (lambda_j - lambda_l)
    //               * ((XV)_{aj} V_{kl} + (XV)_{al} V_{kj})
    Vector coeff = Vector::Zero(p);
    for (int l = 0; l < p; ++l) {
        if (l == j) continue;
        coeff[l] = (xv[j] * V(k, l) + xv[l] * V(k, j)) / (lambda[j] - lambda[l]);
    }
    const Vector dv = V * coeff;
    const Vector vj = V.col(j);
    return dv * vj.transpose() + vj * dv.transpose();
}

Matrix matrix_gradient_invariant(const Matrix& X, const SpectralPair& sp,
                                 const InvariantObjective& obj) {
    require_distinct_spectrum(sp.eigenvalues, sp.gap_tolerance);
    const Vector g = obj.grad(sp.eigenvalues);
    // 2 sum_i H'_i X v_i v_i^T = 2 X V diag(H') V^T
    return 2.0 * X * (sp.eigenvectors * g.asDiagonal() * sp.eigenvectors.transpose());
}

Matrix matrix_gradient_invariant(const Matrix& X, const InvariantObjective& obj) {
    return matrix_gradient_invariant(X, gram_spectral(X), obj);
}

Matrix gradient_gram(const Matrix& X, const SpectralPair& sp, const InvariantObjective& obj) {
    (void)X;
    require_distinct_spectrum(sp.eigenvalues, sp.gap_tolerance);
    const Vector g = obj.grad(sp.eigenvalues);
    const Vector d = 4.0 * sp.eigenvalues.array() * g.array().square();
    return sp.eigenvectors * d.asDiagonal() * sp.eigenvectors.transpose();
}

Matrix gradient_gram(const Matrix& X, const InvariantObjective& obj) {
    return gradient_gram(X, gram_spectral(X), obj);
}

Vector laplacian_diagonal(const Vector& lambda, const Vector& grad, const Vector& hess_diag,
                          int n) {
    const int p = static_cast<int>(lambda.size());
    Vector d(p);
    for (int k = 0; k < p; ++k) {
        double pair_sum = 0.0;
        for (int l = 0; l < p; ++l) {
            if (l == k) continue;
            pair_sum += lambda[l] / (lambda[k] - lambda[l]) * (grad[k] - grad[l]);
        }
        d[k] = 4.0 * lambda[k] * hess_diag[k] + 2.0 * n * grad[k] + 2.0 * pair_sum;
    }
    return d;
}

Matrix matrix_laplacian_invariant(const Matrix& X, const SpectralPair& sp,
                                  const InvariantObjective& obj) {
    require_distinct_spectrum(sp.eigenvalues, sp.gap_tolerance);
    const Vector d = laplacian_diagonal(sp.eigenvalues, obj.grad(sp.eigenvalues),
                                        obj.hess_diag(sp.eigenvalues),
                                        static_cast<int>(X.rows()));
    return sp.eigenvectors * d.asDiagonal() * sp.eigenvectors.transpose();
}

Matrix matrix_laplacian_invariant(const Matrix& X, const InvariantObjective& obj) {
    return matrix_laplacian_invariant(X, gram_spectral(X), obj);
}

double scalar_laplacian_invariant(const Matrix& X, const SpectralPair& sp,
                                  const InvariantObjective& obj) {
    require_distinct_spectrum(sp.eigenvalues, sp.gap_tolerance);
    const Vector& lambda = sp.eigenvalues;
    const Vector g = obj.grad(lambda);
    const Vector h2 = obj.hess_diag(lambda);
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(lambda.size());

    double out = 0.0;
    for (int k = 0; k < p; ++k) {
        double inv_sum = 0.0;
        for (int l = 0; l < p; ++l) {
            if (l == k) continue;
            inv_sum += 1.0 / (lambda[k] - lambda[l]);
        }
        out += 4.0 * lambda[k] * h2[k];
        out += 2.0 * (n - p + 1 + 2.0 * lambda[k] * inv_sum) * g[k];
    }
    return out;
}

double scalar_laplacian_invariant(const Matrix& X, const InvariantObjective& obj) {
    return scalar_laplacian_invariant(X, gram_spectral(X), obj);
}

std::pair<Vector, Vector> lambda_pair_identity(const Vector& lambda) {
    require_distinct_spectrum(lambda);
    const int p = static_cast<int>(lambda.size());
    Vector lhs = Vector::Zero(p);
    Vector rhs = Vector::Zero(p);
    for (int k = 0; k < p; ++k) {
        double ratio_sum = 0.0;
        double inv_sum = 0.0;
        for (int l = 0; l < p; ++l) {
            if (l == k) continue;
            ratio_sum += (lambda[k] + lambda[l]) / (lambda[k] - lambda[l]);
            inv_sum += 1.0 / (lambda[k] - lambda[l]);
        }
        lhs[k] = ratio_sum;
        rhs[k] = 2.0 * lambda[k] * inv_sum - p + 1;
    }
    return {lhs, rhs};
}

InvariantObjective zero_objective() {
    InvariantObjective obj;
    obj.value = [](const Vector&) { return 0.0; };
    obj.grad = [](const Vector& lambda) { return Vector::Zero(lambda.size()); };
    obj.hess_diag = [](const Vector& lambda) { return Vector::Zero(lambda.size()); };
    obj.label = "zero";
    return obj;
}

}  // namespace orthoshrink
