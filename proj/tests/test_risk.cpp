#include "orthoshrink/risk.hpp"

#include "orthoshrink/calculus.hpp"
#include "test_support.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

using namespace orthoshrink;
using namespace orthoshrink::testing;

TEST_SUITE("risk") {

TEST_CASE("sure_matrix_general: zero objective gives n I") {
    GaussianStream stream(4001);
    const Matrix X = random_gap_matrix(10, 3, stream);
    CHECK(rel_err(sure_matrix_general(X, zero_objective(), {10, 3}),
                  10.0 * Matrix::Identity(3, 3)) < 1e-14);
}

TEST_CASE("sure_matrix_general: Efron-Morris objective closed form") {
    GaussianStream stream(4002);
    const InvariantObjective em = log_objective({Vector::Constant(3, 6.0)});
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix X = random_gap_matrix(10, 3, stream);
        const Matrix closed = 10.0 * Matrix::Identity(3, 3) -
                              36.0 * (X.transpose() * X).inverse();
        REQUIRE(rel_err(sure_matrix_general(X, em, {10, 3}), closed) < 1e-10);
    }
}

TEST_CASE("sure_matrix_general: equals n I + 2 Laplacian + gradient Gram") {
    GaussianStream stream(4003);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix X = random_gap_matrix(8, 5, stream);
        const InvariantObjective obj = polynomial_objective(5, stream);
        const Matrix assembled = 8.0 * Matrix::Identity(5, 5) +
                                 2.0 * matrix_laplacian_invariant(X, obj) +
                                 gradient_gram(X, obj);
        REQUIRE(rel_err(sure_matrix_general(X, obj, {8, 5}), assembled) < 1e-10);
    }
}

TEST_CASE("sure_matrix_shrinkage: closed forms and general-objective cross-check") {
    GaussianStream stream(4004);
    const Matrix X = random_gap_matrix(10, 3, stream);

    CHECK(rel_err(sure_matrix_shrinkage(X, ShrinkageCoefficients{Vector::Zero(3)}, {10, 3}),
                  10.0 * Matrix::Identity(3, 3)) < 1e-14);

    const SpectralPair sp = gram_spectral(X);
    const Matrix em_form =
        10.0 * Matrix::Identity(3, 3) -
        36.0 * sp.eigenvectors * sp.eigenvalues.cwiseInverse().asDiagonal() *
            sp.eigenvectors.transpose();
    CHECK(rel_err(sure_matrix_shrinkage(X, efron_morris_coeffs({10, 3}), {10, 3}), em_form) <
          1e-12);

    for (int trial = 0; trial < 100; ++trial) {
        const Matrix Y = random_gap_matrix(10, 3, stream);
        Vector c(3);
        for (int k = 0; k < 3; ++k) c[k] = 8.0 * std::abs(stream.normal());
        REQUIRE(rel_err(sure_matrix_shrinkage(Y, ShrinkageCoefficients{c}, {10, 3}),
                        sure_matrix_general(Y, log_objective({c}), {10, 3})) < 1e-10);
    }
}

TEST_CASE("sure_matrix_stein: equals the shrinkage formula at Stein's coefficients") {
    GaussianStream stream(4005);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix X = random_gap_matrix(10, 3, stream);
        REQUIRE(rel_err(sure_matrix_stein(X, {10, 3}),
                        sure_matrix_shrinkage(X, stein_coeffs({10, 3}), {10, 3})) < 1e-10);
    }
}

TEST_CASE("sure_diagonal_stein: p = 1 reduces to -(n-2)^2 / lambda") {
    Vector lambda(1);
    lambda << 7.5;
    for (int n = 2; n <= 12; ++n) {
        const Vector d = sure_diagonal_stein(lambda, {n, 1}).d;
        CHECK(d[0] == doctest::Approx(-(n - 2.0) * (n - 2.0) / 7.5));
    }
}

TEST_CASE("sure_diagonal_stein: nonpositive at n >= 3p - 1 (domination certificate)") {
    GaussianStream stream(4006);
    for (int trial = 0; trial < 1000; ++trial) {
        Vector lambda(3);
        for (int k = 0; k < 3; ++k) lambda[k] = 5.0 * std::exp(stream.normal());
        std::sort(lambda.data(), lambda.data() + 3, std::greater<double>());
        if (!eigen_gap_check(lambda).ok) continue;
        const Vector d = sure_diagonal_stein(lambda, {10, 3}).d;
        REQUIRE(d.maxCoeff() <= 1e-12);
    }
}

TEST_CASE("Loewner certificate: Stein SURE matrix is dominated by n I") {
    GaussianStream stream(4007);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix X = random_gap_matrix(10, 3, stream);
        const Matrix diff =
            sure_matrix_stein(X, {10, 3}) - 10.0 * Matrix::Identity(3, 3);
        Eigen::SelfAdjointEigenSolver<Matrix> solver(diff);
        REQUIRE(solver.eigenvalues().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("sure_frobenius: closed values and consistency") {
    GaussianStream stream(4008);
    const Matrix X = random_gap_matrix(10, 3, stream);

    CHECK(sure_frobenius(X, zero_objective(), {10, 3}) == doctest::Approx(30.0));

    const InvariantObjective em = log_objective({Vector::Constant(3, 6.0)});
    const Vector lambda = gram_spectral(X).eigenvalues;
    const double expected = 30.0 - 36.0 * lambda.cwiseInverse().sum();
    CHECK(rel_err(sure_frobenius(X, em, {10, 3}), expected) < 1e-12);

    for (int trial = 0; trial < 100; ++trial) {
        const Matrix Y = random_gap_matrix(8, 5, stream);
        const InvariantObjective obj = polynomial_objective(5, stream);
        REQUIRE(rel_err(sure_frobenius(Y, obj, {8, 5}),
                        sure_matrix_general(Y, obj, {8, 5}).trace()) < 1e-10);
    }
}

TEST_CASE("divergence_sure_numeric: MLE gives exactly n I") {
    GaussianStream stream(4009);
    const Matrix X = random_matrix(10, 3, stream);
    const NumericSure numeric =
        divergence_sure_numeric(X, EstimatorSpec::make_mle(), {10, 3});
    CHECK(abs_err(numeric.matrix, 10.0 * Matrix::Identity(3, 3)) == 0.0);
    CHECK_FALSE(numeric.near_kink);
}

TEST_CASE("divergence_sure_numeric: matches analytic SURE away from degeneracy") {
    GaussianStream stream(4010);
    int checked = 0;
    for (int trial = 0; trial < 30 && checked < 10; ++trial) {
        const Matrix X = random_gap_matrix(10, 3, stream, 1e-2);
        Vector c(3);
        for (int k = 0; k < 3; ++k) c[k] = 3.0 * std::abs(stream.normal());
        const EstimatorSpec est = EstimatorSpec::make_shrinkage({c}, "shrinkage");
        const NumericSure numeric = divergence_sure_numeric(X, est, {10, 3});
        REQUIRE(abs_err(numeric.matrix,
                        sure_matrix_shrinkage(X, ShrinkageCoefficients{c}, {10, 3})) < 1e-4);

        const EstimatorSpec stein =
            EstimatorSpec::make_shrinkage(stein_coeffs({10, 3}), "stein");
        REQUIRE(abs_err(divergence_sure_numeric(X, stein, {10, 3}).matrix,
                        sure_matrix_stein(X, {10, 3})) < 1e-4);
        ++checked;
    }
    CHECK(checked == 10);
}

TEST_CASE("divergence_sure_numeric: kink flag near the clipping boundary") {
    Matrix X = Matrix::Zero(4, 2);
    X(0, 0) = 2.0;
    X(1, 1) = 1.0;

    Vector near(2);
    near << 4.0 - 1e-5, 0.5;  // sigma_1^2 = 4 sits at the kink
    const NumericSure flagged =
        divergence_sure_numeric(X, EstimatorSpec::make_positive_part({near}, "pp"), {4, 2});
    CHECK(flagged.near_kink);

    Vector far(2);
    far << 1.0, 0.5;
    const NumericSure clean =
        divergence_sure_numeric(X, EstimatorSpec::make_positive_part({far}, "pp"), {4, 2});
    CHECK_FALSE(clean.near_kink);
}

TEST_CASE("em_zero_mean_exact_risk") {
    CHECK(abs_err(em_zero_mean_exact_risk({10, 3}), 4.0 * Matrix::Identity(3, 3)) == 0.0);
    CHECK(abs_err(em_zero_mean_exact_risk({6, 2}), 3.0 * Matrix::Identity(2, 2)) == 0.0);
    CHECK_THROWS_AS(em_zero_mean_exact_risk({4, 3}), InvalidDimsError);
}

TEST_CASE("analytic_sure dispatch") {
    GaussianStream stream(4011);
    const Matrix X = random_gap_matrix(10, 3, stream);
    const SvdTriple svd = thin_svd(X);
    const ProblemDims dims{10, 3};

    CHECK(analytic_sure(EstimatorSpec::make_mle(), svd, dims).has_value());
    CHECK_FALSE(
        analytic_sure(EstimatorSpec::make_positive_part(efron_morris_coeffs(dims), "em+"),
                      svd, dims)
            .has_value());

    const auto em = analytic_sure(
        EstimatorSpec::make_shrinkage(efron_morris_coeffs(dims), "em"), svd, dims);
    REQUIRE(em.has_value());
    CHECK(rel_err(*em, sure_matrix_shrinkage(X, efron_morris_coeffs(dims), dims)) < 1e-10);
}

}  // TEST_SUITE
