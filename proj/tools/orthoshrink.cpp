#include "orthoshrink/estimators.hpp"
#include "orthoshrink/montecarlo.hpp"
#include "orthoshrink/risk.hpp"
#include "orthoshrink/sweep_io.hpp"
#include "orthoshrink/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace orthoshrink;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

Vector parse_sigma_list(const std::string& text, int p) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            size_t pos = 0;
            values.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad sigma entry '" + item + "'");
        }
    }
    if (static_cast<int>(values.size()) != p) {
        throw ConfigError("expected " + std::to_string(p) + " sigma values, got " +
                          std::to_string(values.size()));
    }
    Vector sigma(p);
    for (int k = 0; k < p; ++k) sigma[k] = values[k];
    return sigma;
}

ProblemDims parse_dims(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) throw ConfigError("dims must look like 10x3");
    try {
        return ProblemDims{std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
    } catch (const std::exception&) {
        throw ConfigError("bad dims '" + text + "'");
    }
}

std::pair<int, int> parse_n_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const int n = std::stoi(text);
            return {n, n};
        }
        return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
    } catch (const std::exception&) {
        throw ConfigError("bad n range '" + text + "' (use e.g. 5..10)");
    }
}

std::vector<double> parse_grid(const std::string& text) {
    double start = 0.0, stop = 0.0, step = 1.0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0.0) {
        throw ConfigError("bad grid '" + text + "' (use start:stop:step with step > 0)");
    }
    std::vector<double> grid;
    for (double v = start; v <= stop + 0.5 * step; v += step) grid.push_back(v);
    if (grid.empty()) throw ConfigError("grid '" + text + "' is empty");
    return grid;
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

// Writes through a temporary ostream choice: file when --out given.
int with_output(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path.empty()) {
        writer(std::cout);
        return kExitOk;
    }
    std::ofstream file(path);
    if (!file) {
        std::cerr << "error: cannot open output path '" << path << "'\n";
        return kExitFailure;
    }
    writer(file);
    if (!file.good()) {
        std::cerr << "error: write to '" << path << "' failed\n";
        return kExitFailure;
    }
    return kExitOk;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

void print_matrix(std::ostream& out, const Matrix& m, const char* indent = "  ") {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << indent;
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%12.6g", m(i, j));
            out << buf;
        }
        out << '\n';
    }
}

struct VerifyOptions {
    int trials = 100;
    std::uint64_t seed = 42;
    int threads = 0;
    std::string dims;
    std::string corrupt;
};

int cmd_verify(const VerifyOptions& opt) {
    apply_threads(opt.threads);
    VerifyConfig config;
    config.trials = opt.trials;
    config.seed = opt.seed;
    config.corrupt = opt.corrupt;
    if (!opt.dims.empty()) {
        config.dims_list = {parse_dims(opt.dims)};
    }
    for (const auto& dims : config.dims_list) {
        validate_dims(dims);
        if (dims.n - dims.p - 1 <= 0) {
            throw ConfigError("verify needs n - p - 1 > 0 (Efron-Morris checks); got " +
                              std::to_string(dims.n) + "x" + std::to_string(dims.p));
        }
    }

    const auto results = run_verify(config);
    int failures = 0;
    std::printf("%-32s %12s %12s  %s\n", "check", "max_error", "tolerance", "status");
    for (const auto& r : results) {
        std::printf("%-32s %12.3e %12.1e  %s\n", r.name.c_str(), r.max_error, r.tolerance,
                    r.pass ? "PASS" : "FAIL");
        if (!r.pass) ++failures;
    }
    std::printf("verify: %zu/%zu checks passed (trials %d, seed %llu)\n",
                results.size() - failures, results.size(), config.trials,
                static_cast<unsigned long long>(config.seed));
    return failures == 0 ? kExitOk : kExitFailure;
}

struct RiskOptions {
    int n = 10;
    int p = 3;
    std::string sigma = "0,0,0";
    std::string estimator = "em";
    long reps = 100000;
    std::uint64_t seed = 42;
    int threads = 0;
    std::string out;
    std::string format = "text";
};

int cmd_risk(const RiskOptions& opt) {
    apply_threads(opt.threads);
    if (opt.reps < 2) throw ConfigError("risk: need --reps >= 2");
    const ProblemDims dims{opt.n, opt.p};
    validate_dims(dims);
    const MeanSpec spec{dims, parse_sigma_list(opt.sigma, dims.p)};
    try {
        validate_mean_spec(spec);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const EstimatorSpec est = parse_estimator(opt.estimator, dims);

    const MatrixRiskEstimate risk = mc_matrix_risk(spec, est, opt.reps, opt.seed);
    std::optional<SureAgreement> sure;
    if (has_analytic_sure(est)) {
        // Same seed: the SURE pass replays the identical draws, so the
        // comparison is exactly paired.
        sure = mc_sure_agreement(spec, est, opt.reps, opt.seed);
    }

    if (opt.format == "json") {
        json record{{"n", dims.n},
                    {"p", dims.p},
                    {"sigma", vector_json(spec.singular_values)},
                    {"estimator", est.label},
                    {"frobenius", risk.frobenius},
                    {"frobenius_se", risk.frobenius_se},
                    {"eigenvalues", vector_json(risk.eigenvalues)},
                    {"eigenvalue_se", vector_json(risk.eigenvalue_se)},
                    {"mean", matrix_json(risk.mean)},
                    {"stderr", matrix_json(risk.stderr_entries)},
                    {"reps", risk.reps},
                    {"seed", risk.seed},
                    {"rejects", risk.rejects}};
        if (sure) {
            record["sure_mean"] = matrix_json(sure->mean_sure);
            record["sure_diff_mean"] = matrix_json(sure->mean_diff);
            record["sure_diff_se"] = matrix_json(sure->diff_se);
        }
        return with_output(opt.out, [&](std::ostream& os) { os << record.dump(2) << '\n'; });
    }
    if (opt.format == "csv") {
        const std::vector<SweepRow> rows{{spec.singular_values[0], est.label, risk}};
        return with_output(opt.out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
    }
    if (opt.format != "text") {
        throw ConfigError("risk: format must be text, csv or json");
    }

    return with_output(opt.out, [&](std::ostream& os) {
        os << "dims: n=" << dims.n << " p=" << dims.p << "\n";
        os << "sigma(M):";
        for (int k = 0; k < dims.p; ++k) os << ' ' << spec.singular_values[k];
        os << "\nestimator: " << est.label << "\n";
        os << "reps: " << risk.reps << "  seed: " << risk.seed
           << "  rejects: " << risk.rejects << "\n";
        char buf[128];
        std::snprintf(buf, sizeof(buf), "frobenius: %.6g  (se %.3g)\n", risk.frobenius,
                      risk.frobenius_se);
        os << buf;
        os << "eigenvalues:";
        for (int k = 0; k < dims.p; ++k) os << ' ' << csv_number(risk.eigenvalues[k]);
        os << "\neigenvalue_se (first-order proxy):";
        for (int k = 0; k < dims.p; ++k) os << ' ' << csv_number(risk.eigenvalue_se[k]);
        os << "\nmean loss matrix:\n";
        print_matrix(os, risk.mean);
        if (sure) {
            os << "analytic SURE, averaged over the same draws:\n";
            print_matrix(os, sure->mean_sure);
            os << "paired (loss - SURE) mean, should be ~0 within SE:\n";
            print_matrix(os, sure->mean_diff);
        } else {
            os << "analytic SURE: not available for estimator '" << est.label << "'\n";
        }
    });
}

struct SweepOptions {
    std::string figure;
    int n = 10;
    int p = 3;
    int axis = 1;  // 1-based index of the varying sigma_i(M)
    std::string sigma;
    std::string grid = "0:20:1";
    std::vector<std::string> estimators;
    long reps = 100000;
    std::uint64_t seed = 42;
    int threads = 0;
    std::string out;
    std::string format = "csv";
};

SweepSpec figure_preset(const std::string& name, long reps, std::uint64_t seed) {
    SweepSpec spec;
    spec.dims = {10, 3};
    spec.reps = reps;
    spec.seed = seed;
    spec.grid.clear();
    for (int v = 0; v <= 20; ++v) spec.grid.push_back(v);

    const bool left = name.size() > 2 && name.substr(1) == "-left";
    const bool right = name.size() > 2 && name.substr(1) == "-right";
    if (name.size() < 2 || (!left && !right) || name[0] < '1' || name[0] > '4') {
        throw ConfigError("unknown figure preset '" + name +
                          "' (use 1-left .. 4-right; appendix presets live under "
                          "the appendix subcommand)");
    }
    if (left) {
        spec.axis = 0;
        spec.fixed_sigma = Vector::Zero(3);
    } else {
        spec.axis = 1;
        spec.fixed_sigma = Vector::Zero(3);
        spec.fixed_sigma[0] = 20.0;
    }
    const bool positive_part = name[0] == '3' || name[0] == '4';
    spec.estimators = positive_part ? std::vector<std::string>{"em+", "stein+"}
                                    : std::vector<std::string>{"em", "stein"};
    return spec;
}

int cmd_sweep(const SweepOptions& opt) {
    apply_threads(opt.threads);
    if (opt.reps < 2) throw ConfigError("sweep: need --reps >= 2");

    SweepSpec spec;
    if (!opt.figure.empty()) {
        spec = figure_preset(opt.figure, opt.reps, opt.seed);
    } else {
        spec.dims = {opt.n, opt.p};
        validate_dims(spec.dims);
        if (opt.axis < 1 || opt.axis > spec.dims.p) {
            throw ConfigError("sweep: axis must be in 1.." + std::to_string(spec.dims.p));
        }
        spec.axis = opt.axis - 1;
        if (opt.sigma.empty()) {
            spec.fixed_sigma = Vector::Zero(spec.dims.p);
        } else {
            spec.fixed_sigma = parse_sigma_list(opt.sigma, spec.dims.p);
        }
        spec.grid = parse_grid(opt.grid);
        if (opt.estimators.empty()) {
            throw ConfigError("sweep: give at least one --estimator (or use --figure)");
        }
        spec.estimators = opt.estimators;
        spec.reps = opt.reps;
        spec.seed = opt.seed;
    }

    try {
        validate_sweep_spec(spec);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const auto rows = run_sweep(spec);
    if (opt.format == "json") {
        return with_output(opt.out, [&](std::ostream& os) { write_sweep_json(os, rows); });
    }
    if (opt.format != "csv") {
        throw ConfigError("sweep: format must be csv or json");
    }
    return with_output(opt.out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
}

struct AppendixOptions {
    std::string figure;
    int p = 3;
    std::string n_range = "5..10";
    double sigma = 50.0;
    long reps = 100000;
    std::uint64_t seed = 42;
    int threads = 0;
    std::string out;
    std::string format = "csv";
};

int cmd_appendix(const AppendixOptions& opt) {
    apply_threads(opt.threads);
    if (opt.reps < 2) throw ConfigError("appendix: need --reps >= 2");

    int p = opt.p;
    auto [n_begin, n_end] = parse_n_range(opt.n_range);
    double sigma = opt.sigma;
    if (!opt.figure.empty()) {
        if (opt.figure == "appendix-left") {
            p = 3;
            n_begin = 5;
            n_end = 10;
            sigma = 50.0;
        } else if (opt.figure == "appendix-right") {
            p = 10;
            n_begin = 12;
            n_end = 20;
            sigma = 50.0;
        } else {
            throw ConfigError("unknown appendix preset '" + opt.figure + "'");
        }
    }
    if (n_begin > n_end) {
        throw ConfigError("appendix: empty n range");
    }

    std::vector<AppendixRow> rows;
    try {
        rows = appendix_sweep(p, n_begin, n_end, sigma, opt.reps, opt.seed);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (opt.format == "json") {
        return with_output(opt.out, [&](std::ostream& os) { write_appendix_json(os, rows); });
    }
    if (opt.format != "csv") {
        throw ConfigError("appendix: format must be csv or json");
    }
    return with_output(opt.out, [&](std::ostream& os) { write_appendix_csv(os, rows); });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Singular value shrinkage estimators of a normal mean matrix: "
                 "exact per-sample risk formulas and a Monte Carlo risk harness"};
    app.require_subcommand(1);

    VerifyOptions verify_opt;
    auto* verify = app.add_subcommand(
        "verify", "Run the derivative/identity verification suite");
    verify->add_option("--trials", verify_opt.trials, "Random trials per check")
        ->capture_default_str();
    verify->add_option("--seed", verify_opt.seed, "Master seed")
        ->envname("ORTHOSHRINK_SEED")
        ->capture_default_str();
    verify->add_option("--dims", verify_opt.dims,
                       "Single dims like 8x5 (default: 10x3 and 8x5)");
    verify->add_option("--threads", verify_opt.threads, "OpenMP thread count");
    verify->add_option("--corrupt", verify_opt.corrupt, "Force a named check to fail")
        ->group("");  // hidden test hook

    RiskOptions risk_opt;
    auto* risk = app.add_subcommand("risk", "Monte Carlo risk of one estimator at one mean");
    risk->add_option("--n", risk_opt.n, "Rows")->capture_default_str();
    risk->add_option("--p", risk_opt.p, "Columns")->capture_default_str();
    risk->add_option("--sigma", risk_opt.sigma, "sigma(M), comma list of length p")
        ->capture_default_str();
    risk->add_option("--estimator", risk_opt.estimator,
                     "mle | em | stein | em+ | stein+ | custom:c1,...,cp")
        ->capture_default_str();
    risk->add_option("--reps", risk_opt.reps, "Replications")->capture_default_str();
    risk->add_option("--seed", risk_opt.seed, "Master seed")
        ->envname("ORTHOSHRINK_SEED")
        ->capture_default_str();
    risk->add_option("--threads", risk_opt.threads, "OpenMP thread count");
    risk->add_option("--out", risk_opt.out, "Output path (default stdout)");
    risk->add_option("--format", risk_opt.format, "text | csv | json")
        ->capture_default_str();

    SweepOptions sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "Risk sweep over one sigma_i(M) axis");
    auto* fig = sweep->add_option("--figure", sweep_opt.figure,
                                  "Preset: 1-left, 1-right, 2-left, 2-right, 3-left, "
                                  "3-right, 4-left, 4-right");
    sweep->add_option("--n", sweep_opt.n, "Rows")->excludes(fig)->capture_default_str();
    sweep->add_option("--p", sweep_opt.p, "Columns")->excludes(fig)->capture_default_str();
    sweep->add_option("--axis", sweep_opt.axis, "Which sigma_i varies (1-based)")
        ->excludes(fig)
        ->capture_default_str();
    sweep->add_option("--sigma", sweep_opt.sigma,
                      "Fixed sigma(M) values, comma list (axis entry is replaced)")
        ->excludes(fig);
    sweep->add_option("--grid", sweep_opt.grid, "start:stop:step for the swept value")
        ->excludes(fig)
        ->capture_default_str();
    sweep->add_option("--estimator", sweep_opt.estimators,
                      "Estimator label; repeat the flag for several")
        ->excludes(fig);
    sweep->add_option("--reps", sweep_opt.reps, "Replications per point")
        ->capture_default_str();
    sweep->add_option("--seed", sweep_opt.seed, "Master seed")
        ->envname("ORTHOSHRINK_SEED")
        ->capture_default_str();
    sweep->add_option("--threads", sweep_opt.threads, "OpenMP thread count");
    sweep->add_option("--out", sweep_opt.out, "Output path (default stdout)");
    sweep->add_option("--format", sweep_opt.format, "csv | json")->capture_default_str();

    AppendixOptions appendix_opt;
    auto* appendix = app.add_subcommand(
        "appendix", "Largest risk eigenvalue of Stein's estimator over an n range");
    auto* afig = appendix->add_option("--figure", appendix_opt.figure,
                                      "Preset: appendix-left (p=3) or appendix-right (p=10)");
    appendix->add_option("--p", appendix_opt.p, "Columns")->excludes(afig)->capture_default_str();
    appendix->add_option("--n", appendix_opt.n_range, "n range like 5..10")
        ->excludes(afig)
        ->capture_default_str();
    appendix->add_option("--sigma", appendix_opt.sigma, "Common sigma_i(M) value")
        ->excludes(afig)
        ->capture_default_str();
    appendix->add_option("--reps", appendix_opt.reps, "Replications per point")
        ->capture_default_str();
    appendix->add_option("--seed", appendix_opt.seed, "Master seed")
        ->envname("ORTHOSHRINK_SEED")
        ->capture_default_str();
    appendix->add_option("--threads", appendix_opt.threads, "OpenMP thread count");
    appendix->add_option("--out", appendix_opt.out, "Output path (default stdout)");
    appendix->add_option("--format", appendix_opt.format, "csv | json")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (verify->parsed()) return cmd_verify(verify_opt);
        if (risk->parsed()) return cmd_risk(risk_opt);
        if (sweep->parsed()) return cmd_sweep(sweep_opt);
        if (appendix->parsed()) return cmd_appendix(appendix_opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UnknownEstimatorError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidDimsError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
