#include "fsde/solution_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace fsde {

double s_eta_scalar(double alpha, double beta, double eta, double lambda, double t,
                    const MLConfig& cfg) {
    if (!(t > 0.0)) throw std::invalid_argument("s_eta_scalar: t must be positive");
    if (!(lambda >= 0.0)) throw std::invalid_argument("s_eta_scalar: lambda must be >= 0");
    const double x = std::pow(lambda, beta) * std::pow(t, alpha);
    return std::pow(t, alpha + eta - 1.0) * ml_value(alpha, alpha + eta, -x, cfg);
}

SpectralField apply_S(double alpha, double beta, double eta, double t, const SpectralField& u,
                      const SpectralBasis& basis, const MLConfig& cfg) {
    SpectralField out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        out[k] = s_eta_scalar(alpha, beta, eta, basis.eigenvalues[k], t, cfg) * u[k];
    return out;
}

namespace {

// Termwise difference of the asymptotic expansions of Phi(b) and Phi(a):
//   Phi(t) = sum_{k>=1} (-1)^{k+1} lam_b^{-k} t^{c - alpha k} / Gamma(c+1-alpha k),
// c = alpha + eta. The k = 1 power difference is computed through expm1, so
// nearby endpoints do not cancel.
double weight_asymptotic_diff(double alpha, double c, double lam_b, double a, double b) {
    double sum = 0.0;
    double lp = 1.0;
    for (int k = 1; k <= 200; ++k) {
        lp /= lam_b;
        const double p = c - alpha * k;
        const double rg = rgamma(c + 1.0 - alpha * k);
        double dpow;
        if (p == 0.0 || rg == 0.0) {
            dpow = 0.0;
        } else {
            // b^p - a^p = a^p expm1(p ln(b/a))
            dpow = std::pow(a, p) * std::expm1(p * std::log(b / a));
        }
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        const double term = sign * lp * dpow * rg;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum) && k >= 3) break;
    }
    return sum;
}

} // namespace

double conv_weight(double alpha, double beta, double eta, double lambda, double a, double b,
                   const MLConfig& cfg) {
    if (!(a >= 0.0 && b > a)) throw std::invalid_argument("conv_weight: need 0 <= a < b");
    const double c = alpha + eta;
    const double lam_b = std::pow(lambda, beta);
    // both endpoints deep in the damped regime: stable termwise form
    if (a > 0.0 && lam_b * std::pow(a, alpha) >= cfg.asymptotic_cutoff)
        return weight_asymptotic_diff(alpha, c, lam_b, a, b);
    const double hi = ml_antiderivative_scalar(alpha, c, lam_b, b, cfg);
    const double lo = a == 0.0 ? 0.0 : ml_antiderivative_scalar(alpha, c, lam_b, a, cfg);
    return hi - lo;
}

WeightTable build_weight_table(const TimeGrid& grid, const SpectralBasis& basis, double alpha,
                               double beta, double eta, const MLConfig& cfg) {
    WeightTable tab;
    tab.M = grid.M;
    tab.K = basis.K;
    tab.w.resize(static_cast<std::size_t>(grid.M) * basis.K);
    const double c = alpha + eta;
    for (int k = 0; k < basis.K; ++k) {
        const double lam = basis.eigenvalues[static_cast<std::size_t>(k)];
        const double lam_b = std::pow(lam, beta);
        double prev = 0.0;
        bool asym = false;
        for (int i = 1; i <= grid.M; ++i) {
            const double ti = grid.times[static_cast<std::size_t>(i)];
            const double tim1 = grid.times[static_cast<std::size_t>(i - 1)];
            double wi;
            if (asym) {
                wi = weight_asymptotic_diff(alpha, c, lam_b, tim1, ti);
            } else {
                const double cur = std::pow(ti, c) * ml_value(alpha, c + 1.0, -lam_b * std::pow(ti, alpha), cfg);
                wi = cur - prev;
                prev = cur;
                if (lam_b * std::pow(ti, alpha) >= cfg.asymptotic_cutoff) asym = true;
            }
            tab.w[static_cast<std::size_t>(i - 1) * basis.K + k] = wi;
        }
    }
    return tab;
}

PropagatorTable build_propagator_table(const TimeGrid& grid, const SpectralBasis& basis,
                                       double alpha, double beta, const MLConfig& cfg) {
    PropagatorTable tab;
    tab.M = grid.M;
    tab.K = basis.K;
    tab.s.resize((static_cast<std::size_t>(grid.M) + 1) * basis.K);
    for (int k = 0; k < basis.K; ++k) {
        const double lam_b = std::pow(basis.eigenvalues[static_cast<std::size_t>(k)], beta);
        tab.s[static_cast<std::size_t>(k)] = 1.0;
        for (int m = 1; m <= grid.M; ++m) {
            const double t = grid.times[static_cast<std::size_t>(m)];
            tab.s[static_cast<std::size_t>(m) * basis.K + k] =
                ml_value(alpha, 1.0, -lam_b * std::pow(t, alpha), cfg);
        }
    }
    return tab;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_loglog: need >= 2 matched points");
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double d = n * sxx - sx * sx;
    SlopeFit f;
    f.slope = (n * sxy - sx * sy) / d;
    f.intercept = (sy - f.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::log(y[i]) - (f.intercept + f.slope * std::log(x[i]));
        ss_res += r * r;
    }
    f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

SlopeFit operator_bound_slope(const SpectralBasis& basis, double alpha, double beta, double eta,
                              double rho, double t_min, double t_max, int n_points,
                              const MLConfig& cfg) {
    if (n_points < 4) throw std::invalid_argument("operator_bound_slope: need >= 4 points");
    if (!(rho <= 2.0 * beta)) throw std::invalid_argument("operator_bound_slope: need rho <= 2 beta");
    std::vector<double> ts(static_cast<std::size_t>(n_points)), gs(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double t =
            std::exp(std::log(t_min) + (std::log(t_max) - std::log(t_min)) * i / (n_points - 1));
        double g = 0.0;
        for (int k = 0; k < basis.K; ++k) {
            const double lam = basis.eigenvalues[static_cast<std::size_t>(k)];
            const double v = std::pow(lam, 0.5 * rho) * s_eta_scalar(alpha, beta, eta, lam, t, cfg);
            g = std::max(g, v);
        }
        ts[static_cast<std::size_t>(i)] = t;
        gs[static_cast<std::size_t>(i)] = g;
    }
    return fit_loglog(ts, gs);
}

} // namespace fsde
