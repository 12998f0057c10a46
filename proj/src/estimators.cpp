#include "orthoshrink/estimators.hpp"

#include "orthoshrink/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace orthoshrink {

ShrinkageCoefficients make_coefficients(Vector c) {
    if ((c.array() < 0.0).any()) {
        throw std::invalid_argument("shrinkage coefficients must be nonnegative");
    }
    return ShrinkageCoefficients{std::move(c)};
}

EstimatorSpec EstimatorSpec::make_mle() {
    EstimatorSpec spec;
    spec.kind = Kind::mle;
    spec.label = "mle";
    return spec;
}

EstimatorSpec EstimatorSpec::make_shrinkage(ShrinkageCoefficients c, std::string label) {
    EstimatorSpec spec;
    spec.kind = Kind::shrinkage;
    spec.coefficients = std::move(c);
    spec.label = std::move(label);
    return spec;
}

EstimatorSpec EstimatorSpec::make_positive_part(ShrinkageCoefficients c, std::string label) {
    EstimatorSpec spec;
    spec.kind = Kind::positive_part_shrinkage;
    spec.coefficients = std::move(c);
    spec.label = std::move(label);
    return spec;
}

EstimatorSpec EstimatorSpec::make_pseudo_bayes(InvariantObjective obj, std::string label) {
    EstimatorSpec spec;
    spec.kind = Kind::pseudo_bayes;
    spec.objective = std::move(obj);
    spec.label = std::move(label);
    return spec;
}

Matrix mle(const Matrix& X) {
    return X;
}

Matrix pseudo_bayes(const Matrix& X, const InvariantObjective& obj) {
    return X + matrix_gradient_invariant(X, obj);
}

namespace {

void check_coeff_length(const ShrinkageCoefficients& c, Eigen::Index p, const char* who) {
    if (c.c.size() != p) {
        throw std::invalid_argument(std::string(who) + ": got " + std::to_string(c.c.size()) +
                                    " coefficients for p=" + std::to_string(p));
    }
}

}  // namespace

Matrix spectral_shrinkage(const SvdTriple& svd, const ShrinkageCoefficients& c) {
    const Eigen::Index p = svd.singular_values.size();
    check_coeff_length(c, p, "spectral_shrinkage");
    Vector shrunk(p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const double sigma = svd.singular_values[k];
        if (c.c[k] == 0.0) {
            shrunk[k] = sigma;
        } else if (sigma <= 0.0) {
            throw SingularValueError("spectral_shrinkage: zero singular value with c_" +
                                     std::to_string(k + 1) + " > 0");
        } else {
            shrunk[k] = sigma - c.c[k] / sigma;
        }
    }
    return svd.left * shrunk.asDiagonal() * svd.right.transpose();
}

Matrix spectral_shrinkage(const Matrix& X, const ShrinkageCoefficients& c) {
    return spectral_shrinkage(thin_svd(X), c);
}

Matrix positive_part_shrinkage(const SvdTriple& svd, const ShrinkageCoefficients& c) {
    const Eigen::Index p = svd.singular_values.size();
    check_coeff_length(c, p, "positive_part_shrinkage");
    Vector shrunk(p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const double sigma = svd.singular_values[k];
        shrunk[k] = sigma > 0.0 ? std::max(0.0, sigma - c.c[k] / sigma) : 0.0;
    }
    return svd.left * shrunk.asDiagonal() * svd.right.transpose();
}

Matrix positive_part_shrinkage(const Matrix& X, const ShrinkageCoefficients& c) {
    return positive_part_shrinkage(thin_svd(X), c);
}

ShrinkageCoefficients efron_morris_coeffs(const ProblemDims& dims) {
    validate_dims(dims);
    if (dims.n - dims.p - 1 <= 0) {
        throw InvalidDimsError("efron_morris_coeffs: need n - p - 1 > 0, got n=" +
                               std::to_string(dims.n) + ", p=" + std::to_string(dims.p));
    }
    return ShrinkageCoefficients{
        Vector::Constant(dims.p, static_cast<double>(dims.n - dims.p - 1))};
}

ShrinkageCoefficients stein_coeffs(const ProblemDims& dims) {
    validate_dims(dims);
    if (dims.n < dims.p + 1) {
        throw InvalidDimsError("stein_coeffs: need n >= p + 1, got n=" +
                               std::to_string(dims.n) + ", p=" + std::to_string(dims.p));
    }
    Vector c(dims.p);
    for (int k = 1; k <= dims.p; ++k) {
        c[k - 1] = static_cast<double>(dims.n + dims.p - 2 * k - 1);
    }
    return ShrinkageCoefficients{std::move(c)};
}

InvariantObjective log_objective(const ShrinkageCoefficients& coeffs) {
    const Vector c = coeffs.c;

    const auto check = [c](const Vector& lambda) {
        if (lambda.size() != c.size()) {
            throw std::invalid_argument("log_objective: lambda/coefficient size mismatch");
        }
        for (Eigen::Index k = 0; k < c.size(); ++k) {
            if (c[k] != 0.0 && lambda[k] <= 0.0) {
                throw SingularValueError("log_objective: lambda_" + std::to_string(k + 1) +
                                         " <= 0 with nonzero coefficient");
            }
        }
    };

    InvariantObjective obj;
    obj.value = [c, check](const Vector& lambda) {
        check(lambda);
        double h = 0.0;
        for (Eigen::Index k = 0; k < c.size(); ++k) {
            if (c[k] != 0.0) h -= 0.5 * c[k] * std::log(lambda[k]);
        }
        return h;
    };
    obj.grad = [c, check](const Vector& lambda) {
        check(lambda);
        Vector g = Vector::Zero(c.size());
        for (Eigen::Index k = 0; k < c.size(); ++k) {
            if (c[k] != 0.0) g[k] = -0.5 * c[k] / lambda[k];
        }
        return g;
    };
    obj.hess_diag = [c, check](const Vector& lambda) {
        check(lambda);
        Vector h = Vector::Zero(c.size());
        for (Eigen::Index k = 0; k < c.size(); ++k) {
            if (c[k] != 0.0) h[k] = 0.5 * c[k] / (lambda[k] * lambda[k]);
        }
        return h;
    };
    obj.label = "log";
    return obj;
}

namespace {

ShrinkageCoefficients parse_custom(const std::string& body, const ProblemDims& dims) {
    std::vector<double> values;
    std::stringstream stream(body);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            size_t pos = 0;
            const double v = std::stod(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            values.push_back(v);
        } catch (const std::exception&) {
            throw UnknownEstimatorError("custom estimator: bad coefficient '" + item + "'");
        }
    }
    if (static_cast<int>(values.size()) != dims.p) {
        throw UnknownEstimatorError("custom estimator: expected " + std::to_string(dims.p) +
                                    " coefficients, got " + std::to_string(values.size()));
    }
    Vector c(dims.p);
    for (int k = 0; k < dims.p; ++k) c[k] = values[k];
    if ((c.array() < 0.0).any()) {
        throw UnknownEstimatorError("custom estimator: coefficients must be nonnegative");
    }
    return ShrinkageCoefficients{std::move(c)};
}

}  // namespace

EstimatorSpec parse_estimator(const std::string& label, const ProblemDims& dims) {
    if (label == "mle") return EstimatorSpec::make_mle();
    if (label == "em") return EstimatorSpec::make_shrinkage(efron_morris_coeffs(dims), "em");
    if (label == "stein") return EstimatorSpec::make_shrinkage(stein_coeffs(dims), "stein");
    if (label == "em+") {
        return EstimatorSpec::make_positive_part(efron_morris_coeffs(dims), "em+");
    }
    if (label == "stein+") {
        return EstimatorSpec::make_positive_part(stein_coeffs(dims), "stein+");
    }
    constexpr std::string_view kCustom = "custom:";
    if (label.rfind(kCustom, 0) == 0) {
        return EstimatorSpec::make_shrinkage(
            parse_custom(label.substr(kCustom.size()), dims), label);
    }
    std::string msg = "unknown estimator '" + label + "'; valid labels:";
    for (const auto& l : estimator_label_help()) msg += " " + l;
    throw UnknownEstimatorError(msg);
}

std::vector<std::string> estimator_label_help() {
    return {"mle", "em", "stein", "em+", "stein+", "custom:c1,...,cp"};
}

Matrix apply_estimator(const EstimatorSpec& est, const Matrix& X, const SvdTriple& svd) {
    switch (est.kind) {
        case EstimatorSpec::Kind::mle:
            return X;
        case EstimatorSpec::Kind::shrinkage:
            return spectral_shrinkage(svd, est.coefficients);
        case EstimatorSpec::Kind::positive_part_shrinkage:
            return positive_part_shrinkage(svd, est.coefficients);
        case EstimatorSpec::Kind::pseudo_bayes: {
            // 2 sum_i H'_i X v_i v_i^T, with X v_i = sigma_i u_i.
            const Vector lambda = gram_eigenvalues(svd);
            require_distinct_spectrum(lambda);
            const Vector g = est.objective.grad(lambda);
            const Vector scaled = 2.0 * g.array() * svd.singular_values.array();
            return X + svd.left * scaled.asDiagonal() * svd.right.transpose();
        }
    }
    throw std::logic_error("apply_estimator: unreachable");
}

Matrix apply_estimator(const EstimatorSpec& est, const Matrix& X) {
    if (est.kind == EstimatorSpec::Kind::mle) return X;
    return apply_estimator(est, X, thin_svd(X));
}

bool has_analytic_sure(const EstimatorSpec& est) {
    return est.kind != EstimatorSpec::Kind::positive_part_shrinkage;
}

}  // namespace orthoshrink
