#include "orthoshrink/numdiff.hpp"

#include <cmath>
#include <stdexcept>

namespace orthoshrink {

namespace {

double checked(double v, const char* who) {
    if (!std::isfinite(v)) {
        throw NumericError(std::string(who) + ": non-finite function value");
    }
    return v;
}

void check_step(double step, const char* who) {
    if (!(step > 0.0)) {
        throw std::invalid_argument(std::string(who) + ": step must be positive");
    }
}

}  // namespace

Matrix fd_gradient(const Matrix& X, const ScalarField& f, double step) {
    check_step(step, "fd_gradient");
    Matrix grad(X.rows(), X.cols());
    Matrix work = X;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        for (Eigen::Index a = 0; a < X.rows(); ++a) {
            const double saved = work(a, j);
            work(a, j) = saved + step;
            const double plus = checked(f(work), "fd_gradient");
            work(a, j) = saved - step;
            const double minus = checked(f(work), "fd_gradient");
            work(a, j) = saved;
            grad(a, j) = (plus - minus) / (2.0 * step);
        }
    }
    return grad;
}

Matrix fd_matrix_laplacian(const Matrix& X, const ScalarField& f, double step) {
    check_step(step, "fd_matrix_laplacian");
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    const double f0 = checked(f(X), "fd_matrix_laplacian");

    Matrix lap = Matrix::Zero(p, p);
    Matrix work = X;
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i; j < p; ++j) {
            double entry = 0.0;
            for (Eigen::Index a = 0; a < n; ++a) {
                if (i == j) {
                    const double saved = work(a, i);
                    work(a, i) = saved + step;
                    const double plus = checked(f(work), "fd_matrix_laplacian");
                    work(a, i) = saved - step;
                    const double minus = checked(f(work), "fd_matrix_laplacian");
                    work(a, i) = saved;
                    entry += (plus - 2.0 * f0 + minus) / (step * step);
                } else {
                    const double si = work(a, i);
                    const double sj = work(a, j);
                    double quad = 0.0;
                    work(a, i) = si + step;
                    work(a, j) = sj + step;
                    quad += checked(f(work), "fd_matrix_laplacian");
                    work(a, j) = sj - step;
                    quad -= checked(f(work), "fd_matrix_laplacian");
                    work(a, i) = si - step;
                    work(a, j) = sj + step;
                    quad -= checked(f(work), "fd_matrix_laplacian");
                    work(a, j) = sj - step;
                    quad += checked(f(work), "fd_matrix_laplacian");
                    work(a, i) = si;
                    work(a, j) = sj;
                    entry += quad / (4.0 * step * step);
                }
            }
            lap(i, j) = entry;
            lap(j, i) = entry;
        }
    }
    return lap;
}

Matrix fd_matrix_divergence(const Matrix& X, const MatrixFieldFn& g, double step) {
    check_step(step, "fd_matrix_divergence");
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();

    Matrix div = Matrix::Zero(p, p);
    Matrix work = X;
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index a = 0; a < n; ++a) {
            const double saved = work(a, i);
            work(a, i) = saved + step;
            const Matrix plus = g(work);
            work(a, i) = saved - step;
            const Matrix minus = g(work);
            work(a, i) = saved;
            if (!plus.allFinite() || !minus.allFinite()) {
                throw NumericError("fd_matrix_divergence: non-finite field value");
            }
            // row a of dg/dX_{ai} contributes to row i of the divergence
            div.row(i) += (plus.row(a) - minus.row(a)) / (2.0 * step);
        }
    }
    return div;
}

}  // namespace orthoshrink
