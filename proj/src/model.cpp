#include "fsde/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fsde {

namespace {
constexpr double kPi = 3.141592653589793238462643383279503;
double pos_part(double x) { return x > 0.0 ? x : 0.0; }
} // namespace

SpectralBasis build_basis(double L, int K) {
    if (!(L > 0.0)) throw std::invalid_argument("build_basis: L must be positive");
    if (K < 1) throw std::invalid_argument("build_basis: K must be >= 1");
    SpectralBasis b;
    b.L = L;
    b.K = K;
    b.eigenvalues.resize(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) {
        const double r = static_cast<double>(k) * kPi / L;
        b.eigenvalues[static_cast<std::size_t>(k - 1)] = r * r;
    }
    return b;
}

double frac_norm(const SpectralField& u, const SpectralBasis& basis, double w) {
    double s = 0.0;
    const std::size_t n = std::min(u.size(), basis.eigenvalues.size());
    for (std::size_t k = 0; k < n; ++k) {
        const double wgt = (w == 0.0) ? 1.0 : std::pow(basis.eigenvalues[k], w);
        s += wgt * u[k] * u[k];
    }
    return std::sqrt(s);
}

SpectralField apply_A_power(const SpectralField& u, const SpectralBasis& basis, double p) {
    SpectralField out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        out[k] = (p == 0.0) ? u[k] : std::pow(basis.eigenvalues[k], p) * u[k];
    return out;
}

std::vector<double> synthesize(const SpectralField& u, const SpectralBasis& basis, int N_x) {
    if (N_x < 2) throw std::invalid_argument("synthesize: N_x must be >= 2");
    const int K = static_cast<int>(u.size());
    const double norm = std::sqrt(2.0 / basis.L);
    std::vector<double> out(static_cast<std::size_t>(N_x - 1), 0.0);
    for (int i = 1; i < N_x; ++i) {
        double s = 0.0;
        for (int k = 1; k <= K; ++k)
            s += u[static_cast<std::size_t>(k - 1)] *
                 std::sin(kPi * static_cast<double>(k) * i / N_x);
        out[static_cast<std::size_t>(i - 1)] = norm * s;
    }
    return out;
}

SpectralField project(const std::vector<double>& samples, const SpectralBasis& basis, int K) {
    const int N_x = static_cast<int>(samples.size()) + 1;
    const double norm = std::sqrt(2.0 / basis.L) * basis.L / N_x; // (L/N) * phi_k(x_i) factor
    SpectralField out(static_cast<std::size_t>(K), 0.0);
    for (int k = 1; k <= K; ++k) {
        double s = 0.0;
        for (int i = 1; i < N_x; ++i)
            s += samples[static_cast<std::size_t>(i - 1)] *
                 std::sin(kPi * static_cast<double>(k) * i / N_x);
        out[static_cast<std::size_t>(k - 1)] = norm * s;
    }
    return out;
}

std::vector<double> QSpectrum::values(const SpectralBasis& basis) const {
    std::vector<double> q(basis.eigenvalues.size(), 1.0);
    if (kind == Kind::PowerLaw)
        for (std::size_t k = 0; k < q.size(); ++k)
            q[k] = std::pow(basis.eigenvalues[k], -exponent);
    return q;
}

double Nonlinearity::lipschitz_bound() const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::LinearDiagonal: return std::abs(c);
        case Kind::Nemytskii:
            switch (f) {
                case Pointwise::SinScaled: return std::abs(c);   // |d/du c sin(u)| <= |c|
                case Pointwise::TanhScaled: return std::abs(c);  // |d/du c tanh(u)| <= |c|
                case Pointwise::Affine: return std::abs(c);      // f(u) = c0 + c u
            }
    }
    return 0.0;
}

SpectralField apply_F(const SpectralField& u, const Nonlinearity& nl, const SpectralBasis& basis,
                      int default_N_x) {
    switch (nl.kind) {
        case Nonlinearity::Kind::Zero: return SpectralField(u.size(), 0.0);
        case Nonlinearity::Kind::LinearDiagonal: {
            SpectralField out(u.size());
            for (std::size_t k = 0; k < u.size(); ++k) out[k] = nl.c * u[k];
            return out;
        }
        case Nonlinearity::Kind::Nemytskii: {
            const int N_x = nl.collocation_points > 0 ? nl.collocation_points : default_N_x;
            std::vector<double> vals = synthesize(u, basis, N_x);
            for (double& v : vals) {
                switch (nl.f) {
                    case Nonlinearity::Pointwise::SinScaled: v = nl.c * std::sin(v); break;
                    case Nonlinearity::Pointwise::TanhScaled: v = nl.c * std::tanh(v); break;
                    case Nonlinearity::Pointwise::Affine: v = nl.c0 + nl.c * v; break;
                }
            }
            return project(vals, basis, static_cast<int>(u.size()));
        }
    }
    return SpectralField(u.size(), 0.0);
}

SpectralField InitialDatum::coefficients(const SpectralBasis& basis, double beta) const {
    SpectralField out(basis.eigenvalues.size(), 0.0);
    switch (kind) {
        case Kind::Zero: break;
        case Kind::Mode:
            if (k0 >= 1 && k0 <= basis.K) out[static_cast<std::size_t>(k0 - 1)] = amplitude;
            break;
        case Kind::SmoothDecay: {
            const double pp = p > 0.0 ? p : 2.0 * beta + 0.6;
            for (int k = 1; k <= basis.K; ++k)
                out[static_cast<std::size_t>(k - 1)] = std::pow(static_cast<double>(k), -pp);
            break;
        }
    }
    return out;
}

double default_r_target(const ModelSpec& spec) {
    const double kap = spec.kappa();
    if (spec.q.kind == QSpectrum::Kind::White) return -0.5 + kap - 0.1;
    // power law: truncated sum is finite at any K; keep the K->inf bound
    return std::min(kap, kap + spec.q.exponent - 0.5 - 0.1);
}

ValidationReport validate(ModelSpec& spec) {
    ValidationReport rep;
    auto fail = [&rep](const std::string& msg) {
        rep.ok = false;
        rep.violations.push_back(msg);
    };

    if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) fail("alpha must lie in (0,1)");
    if (!(spec.beta > 0.0 && spec.beta <= 1.0)) fail("beta must lie in (0,1]");
    if (!(spec.gamma >= 0.0 && spec.gamma <= 1.0)) fail("gamma must lie in [0,1]");
    if (!(spec.L > 0.0)) fail("L must be positive");
    if (spec.K < 1) fail("K must be >= 1");
    if (!(spec.T > 0.0)) fail("T must be positive");
    if (!(spec.epsilon0 > 0.0 && spec.epsilon0 < 0.1)) fail("epsilon0 must be a small positive real");
    if (rep.ok && !(spec.alpha + spec.gamma > 0.5))
        fail("noise admissibility requires alpha + gamma > 1/2");
    if (spec.x0.kind == InitialDatum::Kind::SmoothDecay && spec.x0.p > 0.0 &&
        !(spec.x0.p > 2.0 * spec.beta + 0.5))
        fail("smooth_decay initial datum needs p > 2 beta + 1/2");
    if (!rep.ok) return rep;

    rep.kappa = spec.kappa();
    if (!(rep.kappa > 0.0)) fail("kappa must be positive (shrink epsilon0?)");

    if (spec.r_target <= 0.0) spec.r_target = default_r_target(spec);
    rep.r_target = spec.r_target;

    if (spec.q.kind == QSpectrum::Kind::White) {
        rep.r_admissible_sup = -0.5 + rep.kappa;
        if (!(spec.r_target < rep.r_admissible_sup))
            fail("white noise admissibility violated: need r < -1/2 + kappa");
    } else {
        rep.r_admissible_sup = rep.kappa + spec.q.exponent - 0.5;
    }
    if (!(spec.r_target <= rep.kappa)) fail("r_target must satisfy r <= kappa");
    if (spec.collocation() < 2 * spec.K)
        rep.violations.push_back("warning: N_x < 2K aliases the nonlinear term");

    if (rep.ok) {
        rep.predicted_holder = predicted_holder_exponent(spec);
        rep.predicted_order_linear = predicted_order_linear(spec);
        rep.predicted_order_nonlinear = predicted_order_nonlinear(spec);
    }
    return rep;
}

double predicted_order_linear(const ModelSpec& spec) {
    const double r = spec.r_target;
    return std::min({spec.alpha + spec.alpha * r / (2.0 * spec.beta) + pos_part(spec.gamma - 0.5),
                     spec.alpha + spec.gamma, 1.0});
}

double predicted_order_nonlinear(const ModelSpec& spec) {
    const double r = spec.r_target;
    const double kap = spec.kappa();
    if (spec.alpha + spec.gamma == 1.0) {
        return spec.alpha * r / spec.beta +
               std::min(0.5 - spec.alpha * kap / (2.0 * spec.beta),
                        2.0 * pos_part(spec.gamma - 0.5));
    }
    return std::min(spec.alpha / (2.0 * spec.beta) * std::min(kap, 2.0 * r) +
                        pos_part(spec.gamma - 0.5),
                    1.0);
}

double predicted_holder_exponent(const ModelSpec& spec) {
    return std::min(spec.alpha,
                    spec.alpha * spec.r_target / (2.0 * spec.beta) + pos_part(spec.gamma - 0.5));
}

} // namespace fsde
