// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here. Running a single criterion:
// `acceptance <id>`. `--quick` cuts replication counts for development only;
// the configuration of record is the default one.

#include "orthoshrink/calculus.hpp"
#include "orthoshrink/estimators.hpp"
#include "orthoshrink/montecarlo.hpp"
#include "orthoshrink/risk.hpp"
#include "orthoshrink/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

using namespace orthoshrink;

namespace {

constexpr std::uint64_t kSeed = 42;

long g_mc_reps = 100000;
long g_chain_inputs = 10000;
int g_fd_trials = 100;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const auto start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

struct Timer {
    double begin = now_seconds();
    double elapsed() const { return now_seconds() - begin; }
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

double scale_err(const Matrix& a, const Matrix& b) {
    const double scale = 1.0 + std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

Matrix random_gap_matrix(int n, int p, GaussianStream& stream, double gap_tol) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Matrix X(n, p);
        stream.fill(X);
        if (eigen_gap_check(gram_spectral(X).eigenvalues, gap_tol).ok) return X;
    }
    throw NumericError("acceptance: no gap-separated draw");
}

// ---------------------------------------------------------------- criterion 1

Outcome criterion1_fd_suite() {
    Timer timer;
    VerifyConfig config;
    config.trials = g_fd_trials;
    config.seed = kSeed;
    const auto results = run_verify(config);

    const std::vector<std::string> required = {
        "eigenvalue_gradient_fd", "projector_jacobian_fd", "invariant_gradient_fd",
        "matrix_laplacian_fd"};
    bool pass = true;
    double worst_ratio = 0.0;
    std::string failing;
    for (const auto& r : results) {
        if (!r.pass) {
            pass = false;
            failing += (failing.empty() ? "" : ", ") + r.name;
        }
        if (std::find(required.begin(), required.end(), r.name) != required.end()) {
            worst_ratio = std::max(worst_ratio, r.max_error / r.tolerance);
        }
    }
    const double secs = timer.elapsed();
    if (secs >= 30.0) pass = false;

    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "FD checks on %dx{10x3,8x5}: worst error %.2e x tolerance; "
                  "suite %.1f s (< 30 s)%s%s",
                  g_fd_trials, worst_ratio, secs, failing.empty() ? "" : "; FAILED: ",
                  failing.c_str());
    return {pass, buf};
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion2_identity_chain() {
    Timer timer;
    const ProblemDims dims{10, 3};
    double worst_matrix = 0.0;
    double worst_lambda = 0.0;

    GaussianStream stream(point_seed(kSeed, 2, "identity_chain"));
    for (long i = 0; i < g_chain_inputs; ++i) {
        const Matrix X = random_gap_matrix(dims.n, dims.p, stream, 1e-4);
        const SpectralPair sp = gram_spectral(X);

        Vector c(dims.p);
        for (int k = 0; k < dims.p; ++k) c[k] = 8.0 * std::abs(stream.normal());
        const InvariantObjective obj = log_objective({c});

        const Matrix grad = matrix_gradient_invariant(X, sp, obj);
        worst_matrix = std::max(
            worst_matrix, scale_err(grad.transpose() * grad, gradient_gram(X, sp, obj)));

        const Matrix lap = matrix_laplacian_invariant(X, sp, obj);
        worst_matrix = std::max(
            worst_matrix,
            std::abs(scalar_laplacian_invariant(X, sp, obj) - lap.trace()) /
                (1.0 + std::abs(lap.trace())));

        const Matrix general_sure = sure_matrix_general(X, sp, obj, dims);
        const Matrix assembled = dims.n * Matrix::Identity(dims.p, dims.p) + 2.0 * lap +
                                 gradient_gram(X, sp, obj);
        worst_matrix = std::max(worst_matrix, scale_err(general_sure, assembled));

        const Matrix shrinkage_sure = sure_matrix_shrinkage(X, sp, ShrinkageCoefficients{c}, dims);
        worst_matrix = std::max(worst_matrix, scale_err(shrinkage_sure, general_sure));

        const Matrix stein_sure = sure_matrix_stein(X, sp, dims);
        const Matrix stein_reference = sure_matrix_shrinkage(X, sp, stein_coeffs(dims), dims);
        worst_matrix = std::max(worst_matrix, scale_err(stein_sure, stein_reference));
    }

    GaussianStream lstream(point_seed(kSeed, 2, "lambda_sum"));
    for (long i = 0; i < g_chain_inputs; ++i) {
        const int p = 2 + static_cast<int>(i % 9);
        Vector lambda(p);
        bool ok = false;
        for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
            for (int k = 0; k < p; ++k) lambda[k] = 5.0 * std::exp(lstream.normal());
            std::sort(lambda.data(), lambda.data() + p, std::greater<double>());
            ok = eigen_gap_check(lambda, 1e-4).ok;
        }
        const auto [lhs, rhs] = lambda_pair_identity(lambda);
        worst_lambda = std::max(worst_lambda, (lhs - rhs).cwiseAbs().maxCoeff());
    }

    const double secs = timer.elapsed();
    const bool pass = worst_matrix <= 1e-10 && worst_lambda <= 1e-10 && secs < 10.0;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "10^4 inputs: matrix identities max %.2e (<= 1e-10), pairwise-sum "
                  "identity max %.2e (<= 1e-10); %.1f s (< 10 s)",
                  worst_matrix, worst_lambda, secs);
    return {pass, buf};
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion3_em_zero_mean() {
    Timer timer;
    const MeanSpec spec{{10, 3}, Vector::Zero(3)};
    const auto est =
        mc_matrix_risk(spec, parse_estimator("em", {10, 3}), g_mc_reps, kSeed);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(est.eigenvalues[k] - 4.0));
    const double secs = timer.elapsed();
    const bool pass = worst <= 0.05 && secs < 60.0;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "EM risk eigenvalues at M=0: {%.4f, %.4f, %.4f}, max |eig - 4| = %.4f "
                  "(<= 0.05); %.1f s (< 60 s)",
                  est.eigenvalues[0], est.eigenvalues[1], est.eigenvalues[2], worst, secs);
    return {pass, buf};
}

// ----------------------------------------------------- shared figure tables

struct FigureTables {
    std::vector<SweepRow> left;   // sigma_1 sweeps, sigma_2 = sigma_3 = 0
    std::vector<SweepRow> right;  // sigma_2 sweeps, sigma_1 = 20, sigma_3 = 0
};

const FigureTables& figure_tables() {
    static const FigureTables tables = [] {
        SweepSpec spec;
        spec.dims = {10, 3};
        spec.estimators = {"em", "stein", "em+", "stein+"};
        spec.reps = g_mc_reps;
        spec.seed = kSeed;
        spec.grid.clear();
        for (int v = 0; v <= 20; ++v) spec.grid.push_back(v);

        FigureTables t;
        spec.axis = 0;
        spec.fixed_sigma = Vector::Zero(3);
        t.left = run_sweep(spec);

        spec.axis = 1;
        spec.fixed_sigma = Vector::Zero(3);
        spec.fixed_sigma[0] = 20.0;
        t.right = run_sweep(spec);
        return t;
    }();
    return tables;
}

const SweepRow& table_row(const std::vector<SweepRow>& rows, double value,
                          const std::string& estimator) {
    for (const auto& row : rows) {
        if (row.sweep_value == value && row.estimator == estimator) return row;
    }
    throw std::logic_error("acceptance: missing table row");
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion4_figure1_anchors() {
    struct Anchor {
        double sigma1;
        const char* estimator;
        double value;
    };
    // Reference Monte Carlo values for the 1-left sweep at sigma_1 = 0, 5, 20.
    const std::vector<Anchor> anchors = {
        {0.0, "stein", 7.6561},  {5.0, "stein", 14.4254}, {20.0, "stein", 16.4070},
        {0.0, "em", 12.0064},    {5.0, "em", 16.4985},    {20.0, "em", 17.8934},
    };
    bool pass = true;
    double worst = 0.0;
    std::string detail;
    for (const auto& anchor : anchors) {
        const auto& row = table_row(figure_tables().left, anchor.sigma1, anchor.estimator);
        const double dev = std::abs(row.estimate.frobenius - anchor.value);
        worst = std::max(worst, dev);
        if (dev > 0.15) {
            pass = false;
            detail += std::string(" ") + anchor.estimator + "@" +
                      std::to_string(static_cast<int>(anchor.sigma1)) + " off by " +
                      std::to_string(dev);
        }
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "Frobenius risk anchors (stein/em at sigma_1 = 0, 5, 20): max deviation "
                  "%.4f (<= 0.15)%s",
                  worst, detail.c_str());
    return {pass, buf};
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion5_positive_part_anchors() {
    const auto& steinp = table_row(figure_tables().left, 0.0, "stein+");
    const auto& emp = table_row(figure_tables().left, 0.0, "em+");
    const double dev_stein = std::abs(steinp.estimate.frobenius - 3.9709);
    const double dev_em = std::abs(emp.estimate.frobenius - 8.6756);
    const bool pass = dev_stein <= 0.15 && dev_em <= 0.15;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "positive-part anchors at sigma(M)=0: stein+ %.4f (ref 3.9709), em+ %.4f "
                  "(ref 8.6756), deviations %.4f/%.4f (<= 0.15)",
                  steinp.estimate.frobenius, emp.estimate.frobenius, dev_stein, dev_em);
    return {pass, buf};
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion6_appendix_anchors() {
    Timer timer;
    struct Anchor {
        int p;
        int n;
        double value;
    };
    const std::vector<Anchor> anchors = {{3, 5, 4.9489}, {3, 10, 9.9469}, {10, 12, 11.5728}};
    bool pass = true;
    std::string detail;
    for (const auto& anchor : anchors) {
        const auto rows =
            appendix_sweep(anchor.p, anchor.n, anchor.n, 50.0, g_mc_reps, kSeed);
        const double value = rows.at(0).max_eigenvalue;
        const double dev = std::abs(value - anchor.value);
        const bool below = value < static_cast<double>(anchor.n);
        if (dev > 0.10 || !below) pass = false;
        char item[128];
        std::snprintf(item, sizeof(item), " (p=%d,n=%d): %.4f vs %.4f%s", anchor.p, anchor.n,
                      value, anchor.value, below ? "" : " NOT below n");
        detail += item;
    }
    char buf[320];
    std::snprintf(buf, sizeof(buf),
                  "largest Stein risk eigenvalue at sigma_i(M)=50:%s; tol 0.10, all < n; "
                  "%.1f s",
                  detail.c_str(), timer.elapsed());
    return {pass, buf};
}

// ---------------------------------------------------------------- criterion 7

Outcome criterion7_sure_unbiasedness() {
    Timer timer;
    const ProblemDims dims{10, 3};
    const std::vector<std::string> estimators = {"em", "stein", "custom:3,2,1"};
    std::vector<Vector> means;
    {
        Vector a = Vector::Zero(3);
        Vector b = Vector::Zero(3);
        b[0] = 20.0;
        Vector c = Vector::Zero(3);
        c[0] = 20.0;
        c[1] = 10.0;
        means = {a, b, c};
    }

    bool pass = true;
    double worst_ratio = 0.0;
    std::string detail;
    std::uint64_t combo = 0;
    for (const auto& label : estimators) {
        for (const auto& sigma : means) {
            const auto run =
                mc_sure_agreement(MeanSpec{dims, sigma}, parse_estimator(label, dims),
                                  g_mc_reps, point_seed(kSeed, combo++, label));
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    const double ratio =
                        std::abs(run.mean_diff(i, j)) / (4.0 * run.diff_se(i, j));
                    worst_ratio = std::max(worst_ratio, ratio);
                    if (ratio > 1.0) {
                        pass = false;
                        char item[96];
                        std::snprintf(item, sizeof(item), " %s sigma1=%g entry(%d,%d)",
                                      label.c_str(), sigma[0], i, j);
                        detail += item;
                    }
                }
            }
        }
    }
    char buf[320];
    std::snprintf(buf, sizeof(buf),
                  "paired loss-minus-SURE means over 9 runs: worst |mean| = %.2f x (4 SE) "
                  "(<= 1)%s; %.1f s",
                  worst_ratio, detail.c_str(), timer.elapsed());
    return {pass, buf};
}

// ---------------------------------------------------------------- criterion 8

Outcome criterion8_domination() {
    // (a) certificate on random spectra
    GaussianStream stream(point_seed(kSeed, 8, "certificate"));
    double worst_diag = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < g_chain_inputs; ++i) {
        const Matrix X = random_gap_matrix(10, 3, stream, kDefaultGapTol);
        const Vector lambda = gram_spectral(X).eigenvalues;
        worst_diag = std::max(worst_diag, sure_diagonal_stein(lambda, {10, 3}).d.maxCoeff());
    }
    const bool pass_a = worst_diag <= 1e-12;

    // (b) largest risk eigenvalue below n at every grid point, within MC error
    bool pass_b = true;
    double worst_eig_margin = -std::numeric_limits<double>::infinity();
    for (const auto* table : {&figure_tables().left, &figure_tables().right}) {
        for (const auto& row : *table) {
            if (row.estimator != "em" && row.estimator != "stein") continue;
            const double margin =
                row.estimate.eigenvalues[0] - 4.0 * row.estimate.eigenvalue_se[0] - 10.0;
            worst_eig_margin = std::max(worst_eig_margin, margin);
            if (margin >= 0.0) pass_b = false;
        }
    }

    // (c) positive part no worse than raw, within MC error, at every point
    bool pass_c = true;
    double worst_pp_margin = -std::numeric_limits<double>::infinity();
    for (const auto* table : {&figure_tables().left, &figure_tables().right}) {
        for (const auto& row : *table) {
            if (row.estimator != "em" && row.estimator != "stein") continue;
            const auto& pp = table_row(*table, row.sweep_value, row.estimator + "+");
            const double allowance =
                4.0 * std::hypot(row.estimate.frobenius_se, pp.estimate.frobenius_se);
            const double margin =
                pp.estimate.frobenius - row.estimate.frobenius - allowance;
            worst_pp_margin = std::max(worst_pp_margin, margin);
            if (margin > 0.0) pass_c = false;
        }
    }

    char buf[320];
    std::snprintf(buf, sizeof(buf),
                  "(a) max Stein D_kk = %.2e (<= 1e-12); (b) max eig margin vs n = %.3f "
                  "(< 0); (c) max positive-part excess = %.3f (<= 0)",
                  worst_diag, worst_eig_margin, worst_pp_margin);
    return {pass_a && pass_b && pass_c, buf};
}

}  // namespace

int main(int argc, char** argv) {
    std::optional<int> only;
    bool quick = false;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--quick") {
            quick = true;
        } else {
            only = std::atoi(argv[i]);
        }
    }
    if (quick) {
        g_mc_reps = 2000;
        g_chain_inputs = 500;
        g_fd_trials = 10;
        std::printf("QUICK MODE: reduced replication; not the acceptance configuration\n");
    }

    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "derivative verification suite", criterion1_fd_suite},
        {2, "algebraic identity chain", criterion2_identity_chain},
        {3, "EM exact zero-mean risk", criterion3_em_zero_mean},
        {4, "risk sweep anchors (preset 1-left)", criterion4_figure1_anchors},
        {5, "positive-part anchors (preset 3-left)", criterion5_positive_part_anchors},
        {6, "appendix largest-eigenvalue anchors", criterion6_appendix_anchors},
        {7, "SURE unbiasedness", criterion7_sure_unbiasedness},
        {8, "domination properties", criterion8_domination},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (only && *only != criterion.id) continue;
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failures;
        std::printf("%s  criterion %d: %s: %s\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.id, criterion.name, outcome.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
