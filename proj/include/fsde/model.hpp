#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace fsde {

// One-dimensional Dirichlet spectral problem on (0, L):
//   eigenvalues lambda_k = (k pi / L)^2, eigenfunctions sqrt(2/L) sin(k pi x / L).
struct SpectralBasis {
    double L = 1.0;
    int K = 0;
    std::vector<double> eigenvalues; // lambda_1..lambda_K, strictly increasing

    double lambda(int k) const { return eigenvalues[static_cast<std::size_t>(k)]; } // 0-based
};

SpectralBasis build_basis(double L, int K);

// Mode coefficients <u, phi_k>, k = 1..K.
using SpectralField = std::vector<double>;

// ||u||_w = sqrt(sum lambda_k^w u_k^2)
double frac_norm(const SpectralField& u, const SpectralBasis& basis, double w);

// (A^p u)_k = lambda_k^p u_k
SpectralField apply_A_power(const SpectralField& u, const SpectralBasis& basis, double p);

// Sine synthesis at interior nodes x_i = i L / N_x (i = 1..N_x-1) and its
// inverse projection. Alias-free round trip needs N_x >= 2K.
std::vector<double> synthesize(const SpectralField& u, const SpectralBasis& basis, int N_x);
SpectralField project(const std::vector<double>& samples, const SpectralBasis& basis, int K);

struct QSpectrum {
    enum class Kind { White, PowerLaw };
    Kind kind = Kind::White;
    double exponent = 0.0; // q_k = lambda_k^{-exponent} for PowerLaw

    std::vector<double> values(const SpectralBasis& basis) const;
};

struct Nonlinearity {
    enum class Kind { Zero, LinearDiagonal, Nemytskii };
    enum class Pointwise { SinScaled, TanhScaled, Affine };

    Kind kind = Kind::Zero;
    double c = 0.0;           // scale for LinearDiagonal / SinScaled / TanhScaled; c1 for Affine
    double c0 = 0.0;          // Affine offset
    Pointwise f = Pointwise::SinScaled;
    int collocation_points = 0; // 0: use the model default N_x

    double lipschitz_bound() const; // |f'| bound (Assumption-2 style)
};

// zero -> 0; linear_diagonal(c) -> c u; nemytskii -> project(f(synthesize(u)))
SpectralField apply_F(const SpectralField& u, const Nonlinearity& nl, const SpectralBasis& basis,
                      int default_N_x);

struct InitialDatum {
    enum class Kind { Zero, Mode, SmoothDecay };
    Kind kind = Kind::SmoothDecay;
    int k0 = 1;             // Mode
    double amplitude = 1.0; // Mode
    double p = 0.0;         // SmoothDecay: x0_k = k^{-p}; 0 means "model default"

    SpectralField coefficients(const SpectralBasis& basis, double beta) const;
};

// All continuous-problem parameters plus derived quantities.
struct ModelSpec {
    double alpha = 0.5; // Caputo order, (0,1)
    double beta = 1.0;  // spectral Laplacian power, (0,1]
    double gamma = 0.5; // fractional noise integration, [0,1]
    double L = 1.0;
    int K = 32;
    double T = 1.0;
    QSpectrum q;
    Nonlinearity f;
    InitialDatum x0;
    double r_target = -1.0; // <= 0: derive the default
    double epsilon0 = 1e-3;
    int N_x = 0; // 0: default 4K

    double kappa() const {
        return std::min((alpha + gamma - 0.5) * 2.0 * beta / alpha, 2.0 * beta) - epsilon0;
    }
    int collocation() const { return N_x > 0 ? N_x : 4 * K; }
    double lambda_beta(const SpectralBasis& basis, int k) const {
        return std::pow(basis.lambda(k), beta);
    }
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;
    double kappa = 0.0;
    double r_admissible_sup = 0.0; // white noise: -1/2 + kappa; power law: kappa + rho_q - 1/2
    double r_target = 0.0;
    double predicted_holder = 0.0;
    double predicted_order_linear = 0.0;
    double predicted_order_nonlinear = 0.0;
};

// Checks the ModelSpec invariants (Assumption-1 arithmetic included) and
// reports kappa, the admissible r range and the predicted exponents. Fills
// r_target into the spec when a default is requested.
ValidationReport validate(ModelSpec& spec);

// Resolved default r_target without mutating the spec.
double default_r_target(const ModelSpec& spec);

// Predicted exponents at r = r_target with the arbitrarily-small epsilons set
// to zero. Linear: min{alpha + alpha r/(2 beta) + (gamma-1/2)^+, alpha+gamma, 1}.
double predicted_order_linear(const ModelSpec& spec);
// Nonlinear, beta in (1/2,1]: the alpha+gamma = 1 branch reads
// alpha r / beta + min{1/2 - alpha kappa/(2 beta), 2 (gamma-1/2)^+}; otherwise
// min{(alpha/2beta) min{kappa, 2r} + (gamma-1/2)^+, 1}.
double predicted_order_nonlinear(const ModelSpec& spec);
// Holder: min{alpha, alpha r/(2 beta) + (gamma-1/2)^+}.
double predicted_holder_exponent(const ModelSpec& spec);

} // namespace fsde
