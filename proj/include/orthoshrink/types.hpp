#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace orthoshrink {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Shape of the observation problem: X is n x p with n >= p >= 1
/// (tall-or-square convention, one unit-variance normal per entry).
struct ProblemDims {
    int n = 0;  // rows
    int p = 0;  // columns
};

class InvalidDimsError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite inputs or failed decompositions.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Eigenvalue spectrum too close to degeneracy (repeated or near-zero
/// eigenvalues) for formulas with (lambda_k - lambda_l) or 1/lambda_k factors.
class DegenerateSpectrumError : public NumericError {
  public:
    DegenerateSpectrumError(const std::string& what, int first, int second)
        : NumericError(what), first_(first), second_(second) {}

    // Offending eigenvalue indices (0-based). first == second marks a
    // near-zero trailing eigenvalue rather than a repeated pair.
    int first() const { return first_; }
    int second() const { return second_; }

  private:
    int first_;
    int second_;
};

/// Zero singular value where a formula divides by it.
class SingularValueError : public NumericError {
  public:
    using NumericError::NumericError;
};

inline void validate_dims(const ProblemDims& dims) {
    if (dims.p < 1 || dims.n < dims.p) {
        throw InvalidDimsError("need n >= p >= 1, got n=" + std::to_string(dims.n) +
                               ", p=" + std::to_string(dims.p));
    }
}

inline void require_finite(const Matrix& X, const char* who) {
    if (!X.allFinite()) {
        throw NumericError(std::string(who) + ": input has non-finite entries");
    }
}

}  // namespace orthoshrink
