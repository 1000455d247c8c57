#pragma once

#include "fsde/grid.hpp"
#include "fsde/model.hpp"
#include "fsde/special.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace fsde {

// Per-mode ingredients of the stochastic convolution
//   Lambda_k(t) = sqrt(q_k) int_0^t s_{gamma,k}(t-u) dW_k(u).
// Kept independent of ModelSpec so classical sanity points (alpha = 1
// Ornstein-Uhlenbeck) stay expressible.
struct ModeParams {
    double alpha = 0.5;
    double gamma = 0.5;
    double lambda_beta = 1.0; // lambda_k^beta
    double q = 1.0;
};

// Certified covariance entry
//   C(m,n) = q int_0^{t_min} s_gamma(t_m-u) s_gamma(t_n-u) du
// by adaptive quadrature on the exact kernel; the oracle-grade slow path.
double cov_entry(const ModeParams& mp, double t_m, double t_n, double rel_tol = 1e-9);

// E|Lambda(t)-Lambda(s)|^2 for one mode, from certified covariance entries.
double increment_second_moment(const ModeParams& mp, double t, double s, double rel_tol = 1e-9);

// Assembled covariance matrix of one mode on the grid (M x M, row-major,
// entry (m,n) for grid points t_{m+1}, t_{n+1}) using the incremental
// recurrence C(m,n) = G(min,|m-n|) with fixed-order panel quadrature and a
// graded first panel. `table` (optional) supplies the tabulated
// E_{alpha,alpha+gamma} fast path.
std::vector<double> assemble_mode_cov(const ModeParams& mp, const TimeGrid& grid,
                                      const MLTable* table = nullptr);

// Lower-triangular factor with the applied jitter; rows packed consecutively
// (row i holds i+1 entries at offset i(i+1)/2).
struct ModeCovariance {
    int M = 0;
    double jitter = 0.0;
    bool zero_mode = false; // covariance below factorization noise, samples are 0
    std::vector<double> chol;
};

ModeCovariance factorize_mode_cov(std::vector<double> cov, int M);

// Sampled values Lambda_k(t_m) for all (path, mode, grid point), exact in law
// up to factorization jitter. Deterministic function of (spec, grid, master
// seed, path index) whatever the worker count.
struct NoiseEnsemble {
    TimeGrid grid;
    int n_paths = 0;
    int K = 0;
    std::uint64_t master_seed = 0;
    std::vector<double> values; // [(p*K + k)*(M+1) + m], entry m=0 is 0

    const double* path_mode(int p, int k) const {
        return values.data() + (static_cast<std::size_t>(p) * K + k) * (grid.M + 1);
    }
    double* path_mode(int p, int k) {
        return values.data() + (static_cast<std::size_t>(p) * K + k) * (grid.M + 1);
    }
};

// Mode parameter vector for a model spec (lambda_k^beta and q_k resolved).
std::vector<ModeParams> mode_params(const ModelSpec& spec, const SpectralBasis& basis);

// Covariance assembly + factorization for all modes; OpenMP-parallel over
// modes, with a serial reference twin.
std::vector<ModeCovariance> assemble_covariances(const std::vector<ModeParams>& mps,
                                                 const TimeGrid& grid, int threads,
                                                 bool use_table = true);
std::vector<ModeCovariance> assemble_covariances_serial(const std::vector<ModeParams>& mps,
                                                        const TimeGrid& grid,
                                                        bool use_table = true);

// Path sampling; OpenMP-parallel over (path, mode) blocks, serial twin.
NoiseEnsemble sample_paths(const std::vector<ModeCovariance>& covs, const TimeGrid& grid,
                           int n_paths, std::uint64_t master_seed, int threads);
NoiseEnsemble sample_paths_serial(const std::vector<ModeCovariance>& covs, const TimeGrid& grid,
                                  int n_paths, std::uint64_t master_seed);

// Keeps entries at t_{c j}; restriction of an exact-in-law fine sample is an
// exact-in-law coarse sample of the same path.
NoiseEnsemble restrict_ensemble(const NoiseEnsemble& fine, int c);

} // namespace fsde
