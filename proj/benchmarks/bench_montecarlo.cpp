// Times the serial reference path against the OpenMP path of the Monte Carlo
// risk kernel and confirms they produce identical tables.

#include "orthoshrink/montecarlo.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace orthoshrink;

namespace {

double time_run(Exec exec, const MeanSpec& spec, const EstimatorSpec& est, long reps,
                MatrixRiskEstimate& out) {
    const auto start = std::chrono::steady_clock::now();
    out = mc_matrix_risk(spec, est, reps, 42, exec);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    long reps = 200000;
    if (argc > 1) reps = std::atol(argv[1]);

    struct Config {
        int n;
        int p;
        const char* estimator;
    };
    const Config configs[] = {{10, 3, "stein"}, {10, 3, "em+"}, {20, 10, "stein"}};

#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("reps = %ld, threads = %d\n", reps, threads);
    std::printf("%8s %10s %12s %12s %9s %6s\n", "dims", "estimator", "serial (s)",
                "parallel (s)", "speedup", "match");

    for (const auto& config : configs) {
        const ProblemDims dims{config.n, config.p};
        Vector sigma = Vector::Zero(dims.p);
        sigma[0] = 10.0;
        const MeanSpec spec{dims, sigma};
        const EstimatorSpec est = parse_estimator(config.estimator, dims);

        MatrixRiskEstimate serial_out, parallel_out;
        const double serial_s = time_run(Exec::serial, spec, est, reps, serial_out);
        const double parallel_s = time_run(Exec::parallel, spec, est, reps, parallel_out);
        const bool match = serial_out.mean == parallel_out.mean &&
                           serial_out.frobenius == parallel_out.frobenius &&
                           serial_out.eigenvalues == parallel_out.eigenvalues;

        char dims_str[16];
        std::snprintf(dims_str, sizeof(dims_str), "%dx%d", config.n, config.p);
        std::printf("%8s %10s %12.3f %12.3f %8.2fx %6s\n", dims_str, config.estimator,
                    serial_s, parallel_s, serial_s / parallel_s, match ? "yes" : "NO");
        if (!match) return 1;
    }
    return 0;
}
