#pragma once

#include "fsde/grid.hpp"
#include "fsde/model.hpp"
#include "fsde/noise.hpp"
#include "fsde/solution_ops.hpp"

#include <vector>

namespace fsde {

// Dense state history Y_0..Y_M; the non-Markov convolution needs all of it.
struct Trajectory {
    TimeGrid grid;
    int K = 0;
    std::vector<double> states; // [m*K + k]

    const double* at(int m) const { return states.data() + static_cast<std::size_t>(m) * K; }
    double* at(int m) { return states.data() + static_cast<std::size_t>(m) * K; }
    SpectralField field(int m) const {
        return SpectralField(at(m), at(m) + K);
    }
};

// Piecewise-constant control in H_0 coordinates: v_{j,k} on [t_j, t_{j+1}).
struct Control {
    int intervals = 0;
    int K = 0;
    std::vector<double> values; // [j*K + k]

    double at(int j, int k) const { return values[static_cast<std::size_t>(j) * K + k]; }
    double& at(int j, int k) { return values[static_cast<std::size_t>(j) * K + k]; }

    // repetition onto a grid with rep times more intervals
    Control prolonged(int rep) const;
};

// Precomputed per-grid ingredients shared by every path on that grid.
struct SchemeTables {
    PropagatorTable propagator; // s_{1-alpha,k}(t_m)
    WeightTable drift_weights;  // eta = 0 weights
};

SchemeTables build_scheme_tables(const ModelSpec& spec, const SpectralBasis& basis,
                                 const TimeGrid& grid);

// Mittag-Leffler Euler integrator on one noise path:
//   Y_m = S_{1-alpha}(t_m) Y_0 + sum_{j<m} w_{m-j} . F(Y_j) + Lambda(t_m).
// `noise` points at the (M+1)-long Lambda block of one (path, mode) slice per
// mode, i.e. the layout of NoiseEnsemble. Aborts on nonfinite states.
Trajectory mle_run(const ModelSpec& spec, const SpectralBasis& basis, const TimeGrid& grid,
                   const SchemeTables& tables, const SpectralField& y0,
                   const NoiseEnsemble& ensemble, int path);

// Same recursion with a caller-supplied deterministic forcing Lambda~(t_m)
// (used by the skeleton consistency check and the zero-noise paths).
Trajectory mle_run_forcing(const ModelSpec& spec, const SpectralBasis& basis, const TimeGrid& grid,
                           const SchemeTables& tables, const SpectralField& y0,
                           const std::vector<double>& forcing /* [(m)*K + k], m = 0..M */);

// Discrete skeleton equation
//   Z_m = S_{1-alpha}(t_m) X_0 + sum_{j<m} w_{m-j} . F(Z_j) + Pi_h(v)(t_m)
// with Pi_h applied exactly through the eta = gamma weights. With a fine grid
// this doubles as the continuous-Z^v reference.
Trajectory skeleton_run(const ModelSpec& spec, const SpectralBasis& basis, const TimeGrid& grid,
                        const SchemeTables& tables, const WeightTable& gamma_weights,
                        const SpectralField& x0, const Control& v);

// Pi(g)(t_m) = sum_{j<m} conv_weight(alpha,beta,gamma, ., t_m-t_{j+1}, t_m-t_j) g_{j,.}
Trajectory pi_operator(const ModelSpec& spec, const SpectralBasis& basis, const TimeGrid& grid,
                       const WeightTable& gamma_weights, const Control& g);

// 1/2 sum_j h |v_j|_0^2 with |v|_0^2 = sum_k v_k^2 / q_k; +inf when the
// control loads a q_k = 0 mode.
double rate_function_value(const Control& v, const std::vector<double>& q, double h);

} // namespace fsde
