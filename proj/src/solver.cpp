#include "fsde/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fsde {

Control Control::prolonged(int rep) const {
    if (rep < 1) throw std::invalid_argument("Control::prolonged: rep must be >= 1");
    Control out;
    out.intervals = intervals * rep;
    out.K = K;
    out.values.resize(static_cast<std::size_t>(out.intervals) * K);
    for (int j = 0; j < out.intervals; ++j)
        for (int k = 0; k < K; ++k) out.at(j, k) = at(j / rep, k);
    return out;
}

SchemeTables build_scheme_tables(const ModelSpec& spec, const SpectralBasis& basis,
                                 const TimeGrid& grid) {
    SchemeTables t;
    t.propagator = build_propagator_table(grid, basis, spec.alpha, spec.beta);
    t.drift_weights = build_weight_table(grid, basis, spec.alpha, spec.beta, 0.0);
    return t;
}

namespace {

void check_finite(const double* y, int K, int m) {
    for (int k = 0; k < K; ++k)
        if (!std::isfinite(y[k]))
            throw std::runtime_error("solver: nonfinite state at step " + std::to_string(m));
}

// Shared recursion core. `extra(m, out)` adds the per-step forcing
// (stochastic convolution sample or exact Pi_h of the control).
template <class Extra>
Trajectory run_scheme(const ModelSpec& spec, const SpectralBasis& basis, const TimeGrid& grid,
                      const SchemeTables& tables, const SpectralField& y0, const Extra& extra) {
    const int K = basis.K;
    const int M = grid.M;
    if (static_cast<int>(y0.size()) != K)
        throw std::invalid_argument("solver: initial field has wrong mode count");

    Trajectory traj;
    traj.grid = grid;
    traj.K = K;
    traj.states.resize((static_cast<std::size_t>(M) + 1) * K);
    for (int k = 0; k < K; ++k) traj.at(0)[k] = y0[static_cast<std::size_t>(k)];

    const bool no_drift = spec.f.kind == Nonlinearity::Kind::Zero;
    std::vector<double> fhist;
    if (!no_drift) fhist.resize(static_cast<std::size_t>(M) * K);
    std::vector<double> acc(static_cast<std::size_t>(K));

    for (int m = 1; m <= M; ++m) {
        if (!no_drift) {
            // F at the left endpoint Y_{m-1}
            const SpectralField fy =
                apply_F(traj.field(m - 1), spec.f, basis, spec.collocation());
            double* slot = fhist.data() + static_cast<std::size_t>(m - 1) * K;
            for (int k = 0; k < K; ++k) slot[k] = fy[static_cast<std::size_t>(k)];
        }
        double* y = traj.at(m);
        const double* prop = tables.propagator.s.data() + static_cast<std::size_t>(m) * K;
        for (int k = 0; k < K; ++k) y[k] = prop[k] * y0[static_cast<std::size_t>(k)];
        if (!no_drift) {
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int j = 0; j < m; ++j) {
                const double* wrow =
                    tables.drift_weights.w.data() + static_cast<std::size_t>(m - j - 1) * K;
                const double* frow = fhist.data() + static_cast<std::size_t>(j) * K;
                for (int k = 0; k < K; ++k) acc[static_cast<std::size_t>(k)] += wrow[k] * frow[k];
            }
            for (int k = 0; k < K; ++k) y[k] += acc[static_cast<std::size_t>(k)];
        }
        extra(m, y);
        check_finite(y, K, m);
    }
    return traj;
}

} // namespace

Trajectory mle_run(const ModelSpec& spec, const SpectralBasis& basis, const TimeGrid& grid,
                   const SchemeTables& tables, const SpectralField& y0,
                   const NoiseEnsemble& ensemble, int path) {
    if (ensemble.grid.M != grid.M)
        throw std::invalid_argument("mle_run: noise path not defined on this grid");
    const int K = basis.K;
    return run_scheme(spec, basis, grid, tables, y0, [&](int m, double* y) {
        for (int k = 0; k < K; ++k) y[k] += ensemble.path_mode(path, k)[m];
    });
}

Trajectory mle_run_forcing(const ModelSpec& spec, const SpectralBasis& basis, const TimeGrid& grid,
                           const SchemeTables& tables, const SpectralField& y0,
                           const std::vector<double>& forcing) {
    const int K = basis.K;
    if (forcing.size() != (static_cast<std::size_t>(grid.M) + 1) * K)
        throw std::invalid_argument("mle_run_forcing: forcing has wrong shape");
    return run_scheme(spec, basis, grid, tables, y0, [&](int m, double* y) {
        const double* f = forcing.data() + static_cast<std::size_t>(m) * K;
        for (int k = 0; k < K; ++k) y[k] += f[k];
    });
}

Trajectory skeleton_run(const ModelSpec& spec, const SpectralBasis& basis, const TimeGrid& grid,
                        const SchemeTables& tables, const WeightTable& gamma_weights,
                        const SpectralField& x0, const Control& v) {
    if (v.intervals != grid.M)
        throw std::invalid_argument("skeleton_run: control not defined on this grid");
    const int K = basis.K;
    std::vector<double> acc(static_cast<std::size_t>(K));
    return run_scheme(spec, basis, grid, tables, x0, [&](int m, double* y) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int j = 0; j < m; ++j) {
            const double* wrow = gamma_weights.w.data() + static_cast<std::size_t>(m - j - 1) * K;
            for (int k = 0; k < K; ++k) acc[static_cast<std::size_t>(k)] += wrow[k] * v.at(j, k);
        }
        for (int k = 0; k < K; ++k) y[k] += acc[static_cast<std::size_t>(k)];
    });
}

Trajectory pi_operator(const ModelSpec& spec, const SpectralBasis& basis, const TimeGrid& grid,
                       const WeightTable& gamma_weights, const Control& g) {
    ModelSpec zero = spec;
    zero.f.kind = Nonlinearity::Kind::Zero;
    SchemeTables tables; // propagator unused with zero initial state
    tables.propagator = build_propagator_table(grid, basis, spec.alpha, spec.beta);
    tables.drift_weights = gamma_weights; // unused (F = 0)
    SpectralField x0(static_cast<std::size_t>(basis.K), 0.0);
    return skeleton_run(zero, basis, grid, tables, gamma_weights, x0, g);
}

double rate_function_value(const Control& v, const std::vector<double>& q, double h) {
    double s = 0.0;
    for (int j = 0; j < v.intervals; ++j) {
        for (int k = 0; k < v.K; ++k) {
            const double val = v.at(j, k);
            if (val == 0.0) continue;
            const double qk = q[static_cast<std::size_t>(k)];
            if (qk <= 0.0) return std::numeric_limits<double>::infinity();
            s += val * val / qk;
        }
    }
    return 0.5 * h * s;
}

} // namespace fsde
