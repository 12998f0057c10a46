#pragma once

#include "orthoshrink/types.hpp"

#include <functional>
#include <string>

namespace orthoshrink {

/// Orthogonally invariant scalar function h(X) = H(lambda) of the eigenvalues
/// of X^T X, together with the partial derivatives the derivative and risk
/// formulas consume. Only diagonal second partials are needed: the cross
/// terms contract against lambda_k * delta_kl and drop out of the matrix
/// Laplacian.
///
/// Callables must be safe to invoke from multiple threads at once.
struct InvariantObjective {
    std::function<double(const Vector&)> value;      // H(lambda)
    std::function<Vector(const Vector&)> grad;       // dH/dlambda_k
    std::function<Vector(const Vector&)> hess_diag;  // d^2H/dlambda_k^2
    std::string label;
};

/// H identically zero (the maximum likelihood estimator's objective).
InvariantObjective zero_objective();

}  // namespace orthoshrink
