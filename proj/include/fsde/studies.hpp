#pragma once

#include "fsde/model.hpp"
#include "fsde/noise.hpp"
#include "fsde/solver.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fsde {

struct ErrorRow {
    int M = 0;
    double h = 0.0;
    double value = 0.0;     // rms strong error / mean-square increment / sup-norm error
    double std_error = 0.0; // sample standard error propagated to `value`
    int n_paths = 0;
};

struct StudyResult {
    std::string study;
    std::vector<ErrorRow> rows;
    double fitted_order = 0.0;
    double fitted_order_stderr = 0.0; // weighted-regression CI half-width basis
    double r_squared = 0.0;
    double predicted_order = 0.0;
    std::string verdict; // "pass" / "fail" / "exact" / "n/a"
    std::vector<std::string> notes;
    std::vector<double> extra; // study-specific payload (rate function values, ...)
};

struct StudyOptions {
    int threads = 0;           // 0: resolve from environment / OpenMP
    bool serial_kernels = false; // serial reference path, for determinism tests
};

// Ordinary least squares on (ln h, ln err); rows with zero error are excluded
// with a note. Also returns the weighted-regression slope stderr when row
// standard errors are supplied.
struct OrderFit {
    double slope = 0.0;
    double stderr_weighted = 0.0;
    double r_squared = 0.0;
    std::vector<std::string> notes;
    int used_rows = 0;
};
OrderFit fit_order(const std::vector<ErrorRow>& rows);

// Optional stand-in for the coarse/reference solver; receives the grid and
// path index and must fill Y(T). Used to validate the regression machinery.
using SolverOverride =
    std::function<void(int M, const TimeGrid& grid, int path, SpectralField& out)>;

// Monte Carlo strong-error study on coupled noise: one ensemble on the
// reference grid, restriction onto each coarse grid, rms of ||Y_ref(T) -
// Y_M(T)||_H over paths, log-log order fit against the predicted exponent.
StudyResult strong_error_study(ModelSpec spec, const std::vector<int>& coarse_Ms, int M_ref,
                               int n_paths, std::uint64_t seed, const StudyOptions& opts = {},
                               const SolverOverride& solver_override = nullptr);

// Increment-variance slope ln E||X(T) - X(T - l h)||^2 vs ln(l h) at base
// point T, plus the singular-type variant at base point T/2 when its larger
// exponent applies.
struct HolderResult {
    StudyResult at_T;
    std::optional<StudyResult> singular_at_half_T;
};
HolderResult holder_study(ModelSpec spec, int M_ref, int n_paths, const std::vector<int>& lags,
                          std::uint64_t seed, const StudyOptions& opts = {});

// Deterministic skeleton refinement study: sup-norm over shared grid points of
// ||Z_M^v - Z_ref^v||_H against M, with the rate-function value per row.
StudyResult gamma_convergence_study(ModelSpec spec, const Control& base_control,
                                    const std::vector<int>& Ms, int M_ref,
                                    const StudyOptions& opts = {});

} // namespace fsde
