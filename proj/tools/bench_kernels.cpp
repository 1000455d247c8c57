// Timing harness comparing the OpenMP kernels against their serial reference
// twins: covariance assembly, path sampling, and the Monte Carlo solver loop.

#include "fsde/model.hpp"
#include "fsde/noise.hpp"
#include "fsde/parallel.hpp"
#include "fsde/solver.hpp"

#include <cstdio>
#include <omp.h>
#include <vector>

using namespace fsde;

namespace {

struct Timed {
    double seconds;
};

template <class Fn>
Timed timeit(const Fn& fn) {
    const double t0 = omp_get_wtime();
    fn();
    return {omp_get_wtime() - t0};
}

void report(const char* name, Timed serial, Timed parallel, int threads) {
    std::printf("%-28s serial %8.3fs   omp(%d) %8.3fs   speedup %.2fx\n", name, serial.seconds,
                threads, parallel.seconds, serial.seconds / parallel.seconds);
}

} // namespace

int main(int argc, char** argv) {
    int M = 256, K = 32, paths = 64;
    if (argc > 1) M = std::atoi(argv[1]);
    if (argc > 2) K = std::atoi(argv[2]);
    if (argc > 3) paths = std::atoi(argv[3]);
    const int threads = resolve_threads(0);
    std::printf("benchmark: M=%d K=%d paths=%d threads=%d\n", M, K, paths, threads);

    ModelSpec spec;
    spec.alpha = 0.5;
    spec.beta = 1.0;
    spec.gamma = 0.5;
    spec.L = 1.0;
    spec.K = K;
    spec.T = 1.0;
    spec.f.kind = Nonlinearity::Kind::LinearDiagonal;
    spec.f.c = 1.0;
    validate(spec);

    const SpectralBasis basis = build_basis(spec.L, spec.K);
    const TimeGrid grid = TimeGrid::uniform(spec.T, M);
    const auto mps = mode_params(spec, basis);

    std::vector<ModeCovariance> covs_s, covs_p;
    const Timed t_cov_s = timeit([&] { covs_s = assemble_covariances_serial(mps, grid); });
    const Timed t_cov_p = timeit([&] { covs_p = assemble_covariances(mps, grid, threads); });
    report("covariance assembly", t_cov_s, t_cov_p, threads);

    NoiseEnsemble ens_s, ens_p;
    const Timed t_smp_s = timeit([&] { ens_s = sample_paths_serial(covs_p, grid, paths, 7); });
    const Timed t_smp_p = timeit([&] { ens_p = sample_paths(covs_p, grid, paths, 7, threads); });
    report("path sampling", t_smp_s, t_smp_p, threads);

    const SchemeTables tables = build_scheme_tables(spec, basis, grid);
    const SpectralField y0 = spec.x0.coefficients(basis, spec.beta);
    std::vector<double> sink_s(static_cast<std::size_t>(paths)), sink_p(sink_s);
    auto run_one = [&](std::vector<double>& sink, std::size_t p) {
        const Trajectory tr = mle_run(spec, basis, grid, tables, y0, ens_p, static_cast<int>(p));
        sink[p] = tr.at(grid.M)[0];
    };
    const Timed t_mc_s = timeit([&] {
        serial_for(static_cast<std::size_t>(paths), [&](std::size_t p) { run_one(sink_s, p); });
    });
    const Timed t_mc_p = timeit([&] {
        parallel_for(static_cast<std::size_t>(paths), threads,
                     [&](std::size_t p) { run_one(sink_p, p); });
    });
    report("Monte Carlo MLE runs", t_mc_s, t_mc_p, threads);

    // identical results are part of the contract, not just a nicety
    bool same = ens_s.values == ens_p.values && sink_s == sink_p;
    std::printf("serial/parallel outputs identical: %s\n", same ? "yes" : "NO");
    return same ? 0 : 1;
}
