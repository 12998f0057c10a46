#pragma once

#include "orthoshrink/estimators.hpp"
#include "orthoshrink/rng.hpp"
#include "orthoshrink/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace orthoshrink {

// Monte Carlo estimation of matrix quadratic risk. Replications are split
// into fixed-size blocks; each block accumulates its partial sums in
// replication order and blocks are reduced in index order afterwards, so a
// run is bit-identical for a given (spec, reps, seed) no matter how many
// OpenMP threads execute it. Exec::serial is the plain-loop reference
// implementation kept for testing and benchmarking against the parallel path.

enum class Exec { serial, parallel };

/// Mean matrix specified through its singular values (risk depends on M only
/// through them, by orthogonal invariance).
struct MeanSpec {
    ProblemDims dims;
    Vector singular_values;  // descending, >= 0, length p
};

struct MatrixRiskEstimate {
    Matrix mean;              // p x p symmetric average loss matrix
    Matrix stderr_entries;    // entrywise standard errors
    Vector eigenvalues;       // of mean, descending
    Vector eigenvalue_se;     // first-order proxy: SE of w_k^T L w_k
    double frobenius = 0.0;   // trace of mean
    double frobenius_se = 0.0;
    long reps = 0;
    std::uint64_t seed = 0;
    long rejects = 0;  // redrawn observations (degenerate spectrum etc.)
};

/// Paired per-draw comparison of the loss matrix against the analytic
/// per-sample risk matrix.
struct SureAgreement {
    Matrix mean_diff;  // average of loss - sure
    Matrix diff_se;    // entrywise SE of the paired differences
    Matrix mean_sure;  // average analytic per-sample risk matrix
    long reps = 0;
    std::uint64_t seed = 0;
    long rejects = 0;
};

struct SweepSpec {
    ProblemDims dims;
    std::vector<std::string> estimators;  // registry labels
    int axis = 0;         // 0-based index of the sigma_i(M) that varies
    Vector fixed_sigma;   // length p; entry `axis` is replaced per grid point
    std::vector<double> grid;
    long reps = 100000;
    std::uint64_t seed = 42;
};

struct SweepRow {
    double sweep_value = 0.0;
    std::string estimator;
    MatrixRiskEstimate estimate;
};

struct AppendixRow {
    int n = 0;
    double max_eigenvalue = 0.0;
    double max_eigenvalue_se = 0.0;
    bool below_n = false;    // max eigenvalue < n (domination indication)
    bool bound_ok = false;   // n >= p + 2, the conjectured sufficient bound
    long reps = 0;
    std::uint64_t seed = 0;
    long rejects = 0;
};

/// Rejection rate exceeded 1% or a single replication exhausted its redraw
/// budget.
class RejectionOverflowError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Diagonal embedding of the singular values into an n x p matrix.
Matrix mean_from_singular_values(const MeanSpec& spec);

/// M plus one standard normal per entry, drawn in column-major order.
Matrix sample_observation(const Matrix& M, GaussianStream& stream);

MatrixRiskEstimate mc_matrix_risk(const MeanSpec& spec, const EstimatorSpec& est, long reps,
                                  std::uint64_t seed, Exec exec = Exec::parallel);
/// General mean matrix (used e.g. to check invariance under M -> P M Q).
MatrixRiskEstimate mc_matrix_risk(const Matrix& M, const ProblemDims& dims,
                                  const EstimatorSpec& est, long reps, std::uint64_t seed,
                                  Exec exec = Exec::parallel);

SureAgreement mc_sure_agreement(const MeanSpec& spec, const EstimatorSpec& est, long reps,
                                std::uint64_t seed, Exec exec = Exec::parallel);
SureAgreement mc_sure_agreement(const MeanSpec& spec, const InvariantObjective& obj,
                                long reps, std::uint64_t seed, Exec exec = Exec::parallel);

/// One MatrixRiskEstimate per (grid point, estimator), streams keyed by
/// point_seed(seed, point index, label). Rows ordered grid-major.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, Exec exec = Exec::parallel);

/// Largest risk eigenvalue of Stein's estimator at sigma_i(M) = sigma for
/// each n in [n_begin, n_end]. Rows with n < p + 1 (no valid coefficients)
/// carry NaN values; bound_ok records whether n >= p + 2.
std::vector<AppendixRow> appendix_sweep(int p, int n_begin, int n_end, double sigma,
                                        long reps, std::uint64_t seed,
                                        Exec exec = Exec::parallel);

void validate_mean_spec(const MeanSpec& spec);
void validate_sweep_spec(const SweepSpec& spec);

}  // namespace orthoshrink
