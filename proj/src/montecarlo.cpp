#include "orthoshrink/montecarlo.hpp"

#include "orthoshrink/risk.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace orthoshrink {

namespace {

constexpr long kBlockSize = 1024;
constexpr int kMaxAttemptsPerRep = 1000;
constexpr double kMaxRejectRate = 0.01;

// Draws until the spectrum passes the degeneracy guard and `work` accepts the
// draw (estimator formulas may still reject an X by throwing NumericError).
// All redraws consume the replication's own substream.
template <class Work>
void run_replication(const Matrix& M, std::uint64_t point, long rep, long& rejects,
                     Work&& work) {
    GaussianStream stream(replication_key(point, static_cast<std::uint64_t>(rep)));
    for (int attempt = 0; attempt < kMaxAttemptsPerRep; ++attempt) {
        const Matrix X = sample_observation(M, stream);
        const SvdTriple svd = thin_svd(X);
        if (!eigen_gap_check(gram_eigenvalues(svd)).ok) {
            ++rejects;
            continue;
        }
        try {
            work(X, svd);
            return;
        } catch (const NumericError&) {
            ++rejects;
        }
    }
    throw RejectionOverflowError("replication " + std::to_string(rep) +
                                 " exhausted its redraw budget (" +
                                 std::to_string(kMaxAttemptsPerRep) + " attempts)");
}

// Runs `per_rep` for every replication, accumulating into per-block partials
// that the caller reduces in block order. The parallel path distributes
// blocks over OpenMP threads; within a block, replications always run in
// increasing index order, so results do not depend on the thread count.
template <class Accum, class PerRep>
std::vector<Accum> run_blocked(long reps, Exec exec, const Accum& proto, PerRep per_rep) {
    if (reps < 2) {
        throw std::invalid_argument("monte carlo: need reps >= 2");
    }
    const long nblocks = (reps + kBlockSize - 1) / kBlockSize;
    std::vector<Accum> blocks(static_cast<size_t>(nblocks), proto);

    if (exec == Exec::serial) {
        for (long b = 0; b < nblocks; ++b) {
            const long lo = b * kBlockSize;
            const long hi = std::min(reps, lo + kBlockSize);
            for (long r = lo; r < hi; ++r) per_rep(blocks[static_cast<size_t>(b)], r);
        }
        return blocks;
    }

    std::atomic<bool> failed{false};
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (long b = 0; b < nblocks; ++b) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            const long lo = b * kBlockSize;
            const long hi = std::min(reps, lo + kBlockSize);
            for (long r = lo; r < hi; ++r) per_rep(blocks[static_cast<size_t>(b)], r);
        } catch (...) {
#pragma omp critical(orthoshrink_mc_error)
            {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        }
    }
    if (error) std::rethrow_exception(error);
    return blocks;
}

inline Eigen::Index vec_index(int i, int j, int p) {
    return static_cast<Eigen::Index>(j) * p + i;  // column-major, matches Matrix storage
}

struct RiskAccum {
    Matrix sum;  // p x p running sum of loss matrices
    Matrix m2;   // p^2 x p^2 running sum of vec(L) vec(L)^T
    long rejects = 0;

    static RiskAccum zero(int p) {
        return RiskAccum{Matrix::Zero(p, p), Matrix::Zero(p * p, p * p), 0};
    }

    void add(const Matrix& loss) {
        sum += loss;
        Eigen::Map<const Vector> v(loss.data(), loss.size());
        m2.noalias() += v * v.transpose();
    }
};

double sample_variance(double second_moment_sum, double mean, long reps) {
    const double var = (second_moment_sum - static_cast<double>(reps) * mean * mean) /
                       static_cast<double>(reps - 1);
    return std::max(var, 0.0);
}

MatrixRiskEstimate finalize_risk(const RiskAccum& total, long reps, std::uint64_t seed) {
    const int p = static_cast<int>(total.sum.rows());
    MatrixRiskEstimate out;
    out.reps = reps;
    out.seed = seed;
    out.rejects = total.rejects;

    const Matrix raw_mean = total.sum / static_cast<double>(reps);
    out.mean = 0.5 * (raw_mean + raw_mean.transpose());

    out.stderr_entries.resize(p, p);
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < p; ++i) {
            const Eigen::Index idx = vec_index(i, j, p);
            const double var = sample_variance(total.m2(idx, idx), raw_mean(i, j), reps);
            out.stderr_entries(i, j) = std::sqrt(var / static_cast<double>(reps));
        }
    }

    out.frobenius = out.mean.trace();
    double trace_m2 = 0.0;
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            trace_m2 += total.m2(vec_index(i, i, p), vec_index(j, j, p));
        }
    }
    out.frobenius_se =
        std::sqrt(sample_variance(trace_m2, out.frobenius, reps) / static_cast<double>(reps));

    Eigen::SelfAdjointEigenSolver<Matrix> solver(out.mean);
    if (solver.info() != Eigen::Success) {
        throw NumericError("mc_matrix_risk: eigendecomposition of mean failed");
    }
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvalue_se.resize(p);
    for (int k = 0; k < p; ++k) {
        // First-order proxy: the eigenvalue moves like the quadratic form
        // w_k^T L w_k at the mean's eigenvector, whose per-draw variance is a
        // contraction of the stored second moment.
        const Vector w = solver.eigenvectors().col(p - 1 - k);
        const Matrix proj = w * w.transpose();
        Eigen::Map<const Vector> u(proj.data(), proj.size());
        const double q2 = u.dot(total.m2 * u);
        const double qm = w.dot(raw_mean * w);
        out.eigenvalue_se[k] =
            std::sqrt(sample_variance(q2, qm, reps) / static_cast<double>(reps));
    }
    return out;
}

void check_reject_rate(long rejects, long reps) {
    if (static_cast<double>(rejects) > kMaxRejectRate * static_cast<double>(reps)) {
        throw RejectionOverflowError("rejection rate " + std::to_string(rejects) + "/" +
                                     std::to_string(reps) + " exceeds 1%");
    }
}

}  // namespace

Matrix mean_from_singular_values(const MeanSpec& spec) {
    validate_mean_spec(spec);
    Matrix M = Matrix::Zero(spec.dims.n, spec.dims.p);
    for (int k = 0; k < spec.dims.p; ++k) {
        M(k, k) = spec.singular_values[k];
    }
    return M;
}

Matrix sample_observation(const Matrix& M, GaussianStream& stream) {
    Matrix X(M.rows(), M.cols());
    stream.fill(X);
    X += M;
    return X;
}

MatrixRiskEstimate mc_matrix_risk(const Matrix& M, const ProblemDims& dims,
                                  const EstimatorSpec& est, long reps, std::uint64_t seed,
                                  Exec exec) {
    validate_dims(dims);
    if (M.rows() != dims.n || M.cols() != dims.p) {
        throw std::invalid_argument("mc_matrix_risk: mean matrix shape mismatch");
    }

    auto blocks = run_blocked<RiskAccum>(
        reps, exec, RiskAccum::zero(dims.p), [&](RiskAccum& acc, long rep) {
            run_replication(M, seed, rep, acc.rejects,
                            [&](const Matrix& X, const SvdTriple& svd) {
                                acc.add(matrix_quadratic_loss(apply_estimator(est, X, svd), M));
                            });
        });

    RiskAccum total = RiskAccum::zero(dims.p);
    for (const auto& b : blocks) {
        total.sum += b.sum;
        total.m2 += b.m2;
        total.rejects += b.rejects;
    }
    check_reject_rate(total.rejects, reps);
    return finalize_risk(total, reps, seed);
}

MatrixRiskEstimate mc_matrix_risk(const MeanSpec& spec, const EstimatorSpec& est, long reps,
                                  std::uint64_t seed, Exec exec) {
    return mc_matrix_risk(mean_from_singular_values(spec), spec.dims, est, reps, seed, exec);
}

namespace {

struct SureAccum {
    Matrix sum_diff;
    Matrix sumsq_diff;
    Matrix sum_sure;
    long rejects = 0;

    static SureAccum zero(int p) {
        return SureAccum{Matrix::Zero(p, p), Matrix::Zero(p, p), Matrix::Zero(p, p), 0};
    }
};

}  // namespace

SureAgreement mc_sure_agreement(const MeanSpec& spec, const EstimatorSpec& est, long reps,
                                std::uint64_t seed, Exec exec) {
    if (!has_analytic_sure(est)) {
        throw std::invalid_argument("mc_sure_agreement: estimator '" + est.label +
                                    "' has no analytic per-sample risk matrix");
    }
    const Matrix M = mean_from_singular_values(spec);
    const ProblemDims dims = spec.dims;

    auto blocks = run_blocked<SureAccum>(
        reps, exec, SureAccum::zero(dims.p), [&](SureAccum& acc, long rep) {
            run_replication(M, seed, rep, acc.rejects,
                            [&](const Matrix& X, const SvdTriple& svd) {
                                const Matrix loss =
                                    matrix_quadratic_loss(apply_estimator(est, X, svd), M);
                                const Matrix sure = *analytic_sure(est, svd, dims);
                                const Matrix diff = loss - sure;
                                acc.sum_diff += diff;
                                acc.sumsq_diff += diff.cwiseProduct(diff);
                                acc.sum_sure += sure;
                            });
        });

    SureAccum total = SureAccum::zero(dims.p);
    for (const auto& b : blocks) {
        total.sum_diff += b.sum_diff;
        total.sumsq_diff += b.sumsq_diff;
        total.sum_sure += b.sum_sure;
        total.rejects += b.rejects;
    }
    check_reject_rate(total.rejects, reps);

    SureAgreement out;
    out.reps = reps;
    out.seed = seed;
    out.rejects = total.rejects;
    out.mean_diff = total.sum_diff / static_cast<double>(reps);
    out.mean_sure = total.sum_sure / static_cast<double>(reps);
    out.diff_se.resize(dims.p, dims.p);
    for (int j = 0; j < dims.p; ++j) {
        for (int i = 0; i < dims.p; ++i) {
            const double var =
                sample_variance(total.sumsq_diff(i, j), out.mean_diff(i, j), reps);
            out.diff_se(i, j) = std::sqrt(var / static_cast<double>(reps));
        }
    }
    return out;
}

SureAgreement mc_sure_agreement(const MeanSpec& spec, const InvariantObjective& obj,
                                long reps, std::uint64_t seed, Exec exec) {
    return mc_sure_agreement(
        spec, EstimatorSpec::make_pseudo_bayes(obj, "pseudo_bayes:" + obj.label), reps, seed,
        exec);
}

void validate_mean_spec(const MeanSpec& spec) {
    validate_dims(spec.dims);
    if (spec.singular_values.size() != spec.dims.p) {
        throw std::invalid_argument("mean spec: expected " + std::to_string(spec.dims.p) +
                                    " singular values");
    }
    for (int k = 0; k < spec.dims.p; ++k) {
        if (!(spec.singular_values[k] >= 0.0)) {
            throw std::invalid_argument("mean spec: singular values must be nonnegative");
        }
        if (k > 0 && spec.singular_values[k] > spec.singular_values[k - 1]) {
            throw std::invalid_argument("mean spec: singular values must be descending");
        }
    }
}

void validate_sweep_spec(const SweepSpec& spec) {
    validate_dims(spec.dims);
    if (spec.grid.empty()) {
        throw std::invalid_argument("sweep spec: empty grid");
    }
    if (spec.estimators.empty()) {
        throw std::invalid_argument("sweep spec: no estimators");
    }
    if (spec.axis < 0 || spec.axis >= spec.dims.p) {
        throw std::invalid_argument("sweep spec: axis out of range");
    }
    if (spec.fixed_sigma.size() != spec.dims.p) {
        throw std::invalid_argument("sweep spec: fixed sigma length mismatch");
    }
    for (const auto& label : spec.estimators) {
        (void)parse_estimator(label, spec.dims);  // throws on bad labels
    }
    for (double value : spec.grid) {
        MeanSpec point{spec.dims, spec.fixed_sigma};
        point.singular_values[spec.axis] = value;
        validate_mean_spec(point);
    }
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, Exec exec) {
    validate_sweep_spec(spec);
    std::vector<SweepRow> rows;
    rows.reserve(spec.grid.size() * spec.estimators.size());
    for (size_t g = 0; g < spec.grid.size(); ++g) {
        MeanSpec point{spec.dims, spec.fixed_sigma};
        point.singular_values[spec.axis] = spec.grid[g];
        for (const auto& label : spec.estimators) {
            const EstimatorSpec est = parse_estimator(label, spec.dims);
            const std::uint64_t pt = point_seed(spec.seed, g, label);
            rows.push_back(SweepRow{spec.grid[g], label,
                                    mc_matrix_risk(point, est, spec.reps, pt, exec)});
        }
    }
    return rows;
}

std::vector<AppendixRow> appendix_sweep(int p, int n_begin, int n_end, double sigma,
                                        long reps, std::uint64_t seed, Exec exec) {
    if (p < 1) throw std::invalid_argument("appendix_sweep: need p >= 1");
    if (n_begin > n_end) throw std::invalid_argument("appendix_sweep: empty n range");
    if (!(sigma >= 0.0)) throw std::invalid_argument("appendix_sweep: sigma must be >= 0");

    std::vector<AppendixRow> rows;
    rows.reserve(static_cast<size_t>(n_end - n_begin + 1));
    for (int n = n_begin; n <= n_end; ++n) {
        AppendixRow row;
        row.n = n;
        row.reps = reps;
        row.bound_ok = n >= p + 2;
        row.seed = point_seed(seed, static_cast<std::uint64_t>(n - n_begin), "stein");
        if (n < p + 1) {
            // Stein's coefficients do not exist here; keep the row, flagged.
            row.max_eigenvalue = std::numeric_limits<double>::quiet_NaN();
            row.max_eigenvalue_se = std::numeric_limits<double>::quiet_NaN();
            row.below_n = false;
        } else {
            const ProblemDims dims{n, p};
            const EstimatorSpec est =
                EstimatorSpec::make_shrinkage(stein_coeffs(dims), "stein");
            const MeanSpec spec{dims, Vector::Constant(p, sigma)};
            const MatrixRiskEstimate estimate =
                mc_matrix_risk(spec, est, reps, row.seed, exec);
            row.max_eigenvalue = estimate.eigenvalues[0];
            row.max_eigenvalue_se = estimate.eigenvalue_se[0];
            row.below_n = estimate.eigenvalues[0] < static_cast<double>(n);
            row.rejects = estimate.rejects;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace orthoshrink
