#pragma once

#include "orthoshrink/objective.hpp"
#include "orthoshrink/spectral.hpp"
#include "orthoshrink/types.hpp"

#include <string>
#include <vector>

namespace orthoshrink {

/// Per-singular-value shrink amounts c_1..c_p >= 0.
struct ShrinkageCoefficients {
    Vector c;
};

/// Throws on negative entries.
ShrinkageCoefficients make_coefficients(Vector c);

/// A named member of the estimator zoo. Immutable and shareable across
/// threads.
struct EstimatorSpec {
    enum class Kind { mle, shrinkage, positive_part_shrinkage, pseudo_bayes };

    Kind kind = Kind::mle;
    ShrinkageCoefficients coefficients;  // shrinkage kinds
    InvariantObjective objective;        // pseudo_bayes
    std::string label;

    static EstimatorSpec make_mle();
    static EstimatorSpec make_shrinkage(ShrinkageCoefficients c, std::string label);
    static EstimatorSpec make_positive_part(ShrinkageCoefficients c, std::string label);
    static EstimatorSpec make_pseudo_bayes(InvariantObjective obj, std::string label);
};

/// The maximum likelihood estimator: identity map.
Matrix mle(const Matrix& X);

/// X + matrix_gradient_invariant(X, obj).
Matrix pseudo_bayes(const Matrix& X, const InvariantObjective& obj);

/// U diag(sigma_k - c_k / sigma_k) V^T. Errors when some sigma_k = 0 has
/// c_k > 0 (the shrink amount divides by sigma_k).
Matrix spectral_shrinkage(const Matrix& X, const ShrinkageCoefficients& c);
Matrix spectral_shrinkage(const SvdTriple& svd, const ShrinkageCoefficients& c);

/// U diag((sigma_k - c_k / sigma_k)_+) V^T. A zero singular value maps to 0,
/// the limit of the clipped value as sigma decreases to 0.
Matrix positive_part_shrinkage(const Matrix& X, const ShrinkageCoefficients& c);
Matrix positive_part_shrinkage(const SvdTriple& svd, const ShrinkageCoefficients& c);

/// c_k = n - p - 1 for all k; requires n - p - 1 > 0.
ShrinkageCoefficients efron_morris_coeffs(const ProblemDims& dims);

/// c_k = n + p - 2k - 1 (k 1-based); requires n >= p + 1 so that c_p >= 0.
ShrinkageCoefficients stein_coeffs(const ProblemDims& dims);

/// H(lambda) = -1/2 sum_k c_k log lambda_k, with
/// dH/dlambda_k = -c_k / (2 lambda_k) and d^2H/dlambda_k^2 = c_k / (2 lambda_k^2).
/// Terms with c_k = 0 contribute nothing and place no constraint on lambda_k.
InvariantObjective log_objective(const ShrinkageCoefficients& c);

/// CLI estimator registry: "mle", "em", "stein", "em+", "stein+",
/// "custom:c1,...,cp". Throws UnknownEstimatorError for anything else.
EstimatorSpec parse_estimator(const std::string& label, const ProblemDims& dims);

/// The labels parse_estimator accepts, for error messages.
std::vector<std::string> estimator_label_help();

class UnknownEstimatorError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

Matrix apply_estimator(const EstimatorSpec& est, const Matrix& X);
/// Hot path: reuses a decomposition of X computed by the caller.
Matrix apply_estimator(const EstimatorSpec& est, const Matrix& X, const SvdTriple& svd);

/// True when a closed-form per-sample risk matrix exists for this estimator
/// (everything except the positive-part kinds).
bool has_analytic_sure(const EstimatorSpec& est);

}  // namespace orthoshrink
