#pragma once

#include "fsde/grid.hpp"
#include "fsde/model.hpp"
#include "fsde/special.hpp"

#include <vector>

namespace fsde {

// Diagonal scalars of the solution operator S_eta(t):
//   s_{eta,k}(t) = t^{alpha+eta-1} E_{alpha,alpha+eta}(-lambda_k^beta t^alpha).
double s_eta_scalar(double alpha, double beta, double eta, double lambda, double t,
                    const MLConfig& cfg = MLConfig{});

// (S_eta(t) u)_k = s_{eta,k}(t) u_k
SpectralField apply_S(double alpha, double beta, double eta, double t, const SpectralField& u,
                      const SpectralBasis& basis, const MLConfig& cfg = MLConfig{});

// Exact integral of the operator scalar over [a,b]:
//   conv_weight = int_a^b s_{eta,.}(tau) dtau
//               = Phi(b) - Phi(a),   Phi(t) = t^{alpha+eta} E_{alpha,alpha+eta+1}(-lambda^beta t^alpha).
// Deep in the damped regime the raw difference cancels, so the two
// antiderivatives are replaced by a termwise difference of their asymptotic
// expansions, which is positive by construction.
double conv_weight(double alpha, double beta, double eta, double lambda, double a, double b,
                   const MLConfig& cfg = MLConfig{});

// Per-(m-j) weights of the MLE convolution on a uniform grid: on t_m = m h the
// weight over [t_m - t_{j+1}, t_m - t_j] depends only on i = m - j, so one
// column of M weights per mode covers the whole scheme.
//   w(i,k) = int_{t_{i-1}}^{t_i} s_{eta,k}(tau) dtau
struct WeightTable {
    int M = 0;
    int K = 0;
    std::vector<double> w; // [(i-1)*K + k], i = 1..M

    double at(int i, int k) const { return w[static_cast<std::size_t>(i - 1) * K + k]; }
};

WeightTable build_weight_table(const TimeGrid& grid, const SpectralBasis& basis, double alpha,
                               double beta, double eta, const MLConfig& cfg = MLConfig{});

// s_{1-alpha,k}(t_m) = E_{alpha,1}(-lambda_k^beta t_m^alpha) for every grid
// point and mode; the initial-datum propagator of the scheme.
struct PropagatorTable {
    int M = 0;
    int K = 0;
    std::vector<double> s; // [m*K + k], m = 0..M (s(0,k) = 1)

    double at(int m, int k) const { return s[static_cast<std::size_t>(m) * K + k]; }
};

PropagatorTable build_propagator_table(const TimeGrid& grid, const SpectralBasis& basis,
                                       double alpha, double beta,
                                       const MLConfig& cfg = MLConfig{});

// Log-log slope of t -> max_k lambda_k^{rho/2} s_{eta,k}(t) over a log-spaced
// t grid; compared against alpha+eta-1-(alpha/2beta) rho^+ in tests.
struct SlopeFit {
    double slope = 0.0;
    double r_squared = 0.0;
    double intercept = 0.0;
};

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

SlopeFit operator_bound_slope(const SpectralBasis& basis, double alpha, double beta, double eta,
                              double rho, double t_min = 1e-4, double t_max = 1e-1,
                              int n_points = 25, const MLConfig& cfg = MLConfig{});

} // namespace fsde
