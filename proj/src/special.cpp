#include "fsde/special.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace fsde {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kGammaOverflowX = 171.624; // tgamma overflows past here

bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x) && std::abs(x) < 1e15;
}

} // namespace

double gamma_fn(double x) {
    if (is_nonpositive_integer(x))
        throw std::domain_error("gamma_fn: pole at nonpositive integer x=" + std::to_string(x));
    if (x > kGammaOverflowX)
        throw std::overflow_error("gamma_fn: overflow for x=" + std::to_string(x));
    return std::tgamma(x);
}

double rgamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    if (x > kGammaOverflowX) {
        // 1/Gamma underflows smoothly
        return std::exp(-std::lgamma(x));
    }
    if (x < -171.0) {
        // reflection in log form: 1/Gamma(x) = Gamma(1-x) sin(pi x)/pi
        const double s = std::sin(kPi * x);
        if (s == 0.0) return 0.0;
        const double ln_mag = std::lgamma(1.0 - x) + std::log(std::abs(s) / kPi);
        return std::copysign(std::exp(ln_mag), s);
    }
    return 1.0 / std::tgamma(x);
}

namespace {

// ---- power series: sum_k z^k / Gamma(ak+b) -------------------------------

// Largest |term| along the series, in ln scale, from the stationary point of
// k ln(x) - lnGamma(ak+b). Predicts how many digits cancellation costs.
double series_ln_max_term(double a, double b, double x) {
    if (x <= 1.0) return 0.0;
    const double target = std::log(x) / a; // digamma(ak+b) at the stationary point
    if (target > 80.0) return std::numeric_limits<double>::infinity();
    const double y_star = std::exp(target); // digamma(y) ~ ln(y)
    const double k_star = (y_star - b) / a;
    if (k_star <= 1.0) return std::log(x);
    if (k_star > 2e6) return std::numeric_limits<double>::infinity();
    return k_star * std::log(x) - std::lgamma(a * k_star + b);
}

MLResult ml_series(double a, double b, double z, const MLConfig& cfg) {
    double sum = rgamma(b);
    double comp = 0.0; // Kahan compensation
    double abs_acc = std::abs(sum);
    double term_abs = 0.0, prev_abs = std::numeric_limits<double>::infinity();
    double zp = 1.0;
    int k = 1;
    bool done = false;
    const int kmax = std::max(cfg.max_terms, 2000);
    for (; k <= kmax; ++k) {
        zp *= z;
        const double term = zp * rgamma(a * k + b);
        term_abs = std::abs(term);
        abs_acc += term_abs;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (k >= 4 && term_abs < prev_abs &&
            term_abs <= 0.2 * std::abs(sum) * cfg.target_rel_err) {
            done = true;
            break;
        }
        prev_abs = term_abs;
    }
    const double denom = std::max(std::abs(sum), 1e-300);
    // every term carries ~eps of itself plus the accumulated power error
    const double round_err = abs_acc * (2.0 + 0.25 * std::sqrt(static_cast<double>(k))) * 1e-16 / denom;
    const double trunc_err = term_abs / denom;
    return {sum, round_err + trunc_err, done};
}

// ---- asymptotic expansion: -sum_{k>=1} z^{-k} / Gamma(b-ak) ---------------

struct AsymScan {
    bool usable = false;
    int n_terms = 0;
    double est_rel_err = std::numeric_limits<double>::infinity();
};

// ln |x^{-k} / Gamma(b-ak)| in log scale so pole regions cannot overflow.
// `ln_env` strips the |sin(pi arg)| factor of the reflection formula: an
// upper envelope immune to the isolated dips at the poles of Gamma, the
// right evidence for truncation remainders.
struct TermLn {
    double ln_term;
    double ln_env;
};
TermLn ln_abs_term(double a, double b, double x, int k) {
    const double arg = b - a * k;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    if (arg > 0.5) {
        const double v = -k * std::log(x) - std::lgamma(arg);
        return {v, v};
    }
    const double base = -k * std::log(x) + std::lgamma(1.0 - arg) - std::log(kPi);
    if (is_nonpositive_integer(arg)) return {neg_inf, base};
    const double s = std::abs(std::sin(kPi * arg));
    if (s == 0.0) return {neg_inf, base};
    return {base + std::log(s), base};
}

AsymScan asymptotic_scan(double a, double b, double x, const MLConfig& cfg) {
    // Truncation evidence is a short windowed envelope of the sin-free term
    // magnitudes past the cut, measured against the scale of the leading
    // terms (the magnitude of the sum itself).
    const int kmax = std::min(cfg.max_terms, 400);
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> lt(static_cast<std::size_t>(kmax) + 1, neg_inf);
    std::vector<double> le(static_cast<std::size_t>(kmax) + 1, neg_inf);
    double ln_scale = neg_inf; // max over the leading terms only
    double run_min_env = std::numeric_limits<double>::infinity();
    int last = kmax;
    for (int k = 1; k <= kmax; ++k) {
        const TermLn t = ln_abs_term(a, b, x, k);
        lt[static_cast<std::size_t>(k)] = t.ln_term;
        le[static_cast<std::size_t>(k)] = t.ln_env;
        if (k <= 8) ln_scale = std::max(ln_scale, t.ln_term);
        if (k >= 8) {
            double env = neg_inf;
            for (int j = k - 3; j <= k; ++j) env = std::max(env, le[static_cast<std::size_t>(j)]);
            run_min_env = std::min(run_min_env, env);
            if (env > run_min_env + 30.0) { // divergent tail reached
                last = k;
                break;
            }
            if (std::isfinite(ln_scale) && env - ln_scale < -46.0) {
                last = k;
                break;
            }
        }
    }
    AsymScan out;
    if (!std::isfinite(ln_scale)) return out;
    const int window = 6;
    // when the divergence onset k ~ x^{1/a}/a lies far beyond the scan, the
    // tail keeps shrinking and a window clipped at `last` stays valid
    const bool tail_shrinks = std::log(x) / a - std::log(a) > std::log(4.0 * last);
    double best = std::numeric_limits<double>::infinity();
    int best_k = 0;
    const int k_hi = tail_shrinks ? last - 1 : last - window;
    for (int k = 1; k <= k_hi; ++k) {
        double env = neg_inf;
        for (int j = k + 1; j <= std::min(last, k + window); ++j)
            env = std::max(env, le[static_cast<std::size_t>(j)]);
        if (env < best) {
            best = env;
            best_k = k;
        }
    }
    if (best_k == 0) return out;
    out.n_terms = best_k;
    out.est_rel_err = 3.0 * std::exp(best - ln_scale) + 2e-16; // remainder ~ omitted envelope
    out.usable = out.est_rel_err <= 0.5 * cfg.target_rel_err;
    return out;
}

MLResult ml_asymptotic(double a, double b, double x, int n_terms, double est_rel) {
    double sum = 0.0, comp = 0.0;
    double xp = 1.0;
    for (int k = 1; k <= n_terms; ++k) {
        xp /= x;
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        const double term = sign * xp * rgamma(b - a * k);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return {sum, est_rel, true};
}

// ---- Hankel-contour quadrature --------------------------------------------
//
// E_{a,b}(z) = (1/2 pi i) \int_C e^s s^{a-b} / (s^a - z) ds on the parabola
// s(u) = mu (iu+1)^2 wrapping the negative axis. For z < 0 and a < 1 the
// poles of 1/(s^a - z) sit off the principal sheet, so the trapezoid rule
// converges geometrically in 1/h. mu stays moderate: the e^mu scale is the
// roundoff floor of the sum.
double contour_sum(double a, double b, double z, double mu, int n, double u_max) {
    using cplx = std::complex<double>;
    const double h = u_max / n;
    const cplx I(0.0, 1.0);
    auto integrand = [&](double u) -> cplx {
        const cplx iu1 = cplx(1.0, u);
        const cplx s = mu * iu1 * iu1;
        const cplx ds = 2.0 * mu * I * iu1;
        const cplx sa = std::pow(s, a);
        return std::exp(s) * std::pow(s, a - b) / (sa - z) * ds;
    };
    // with the 1/(2 pi i) prefactor and g(-u) = -conj(g(u)), the surviving
    // combination is the imaginary part
    double acc = integrand(0.0).imag();
    for (int k = 1; k <= n; ++k) acc += 2.0 * integrand(k * h).imag();
    return acc * h / (2.0 * kPi);
}

MLResult ml_contour(double a, double b, double z, const MLConfig& cfg) {
    const double mu = 6.0;
    const double u_max = std::sqrt(1.0 + 44.0 / mu);
    double prev = contour_sum(a, b, z, mu, 64, u_max);
    double best_diff = std::numeric_limits<double>::infinity();
    for (int n = 96; n <= 1500; n = (3 * n) / 2) {
        const double cur = contour_sum(a, b, z, mu, n, u_max);
        const double mag = std::max(std::abs(cur), 1e-300);
        const double diff = std::abs(cur - prev) / mag;
        const double floor = std::exp(mu) * 2.2e-16 / mag;
        best_diff = std::min(best_diff, diff);
        if (diff <= std::max(0.2 * cfg.target_rel_err, 2.0 * floor))
            return {cur, diff + floor, true};
        prev = cur;
    }
    return {prev, best_diff, false};
}

// ---- a == 1 ----------------------------------------------------------------
//
// E_{1,b}(-x) = rgamma(b) [ e^{-x} + (b-1) E[1/(b-1+N)] ], N ~ Poisson(x):
// all-positive inner sum; for large x only a window of Poisson weights
// matters, exponentiated termwise so nothing overflows.
MLResult ml_a_equals_1(double b, double x, const MLConfig& cfg) {
    if (x == 0.0) return {rgamma(b), 1e-16, true};
    double inner; // = e^{-x} + (b-1) sum_k pois(k;x)/(b-1+k), k >= 1
    if (x < 30.0) {
        double s = 0.0, term = 1.0;
        for (int k = 1; k <= 4000; ++k) {
            term *= x / k;
            const double contrib = term / (b - 1.0 + k);
            s += contrib;
            if (k > x && contrib <= 1e-18 * std::max(s, 1.0)) break;
        }
        inner = std::exp(-x) * (1.0 + (b - 1.0) * s);
    } else {
        const double w = 12.0 * std::sqrt(x) + 30.0;
        const long k_lo = std::max(1L, static_cast<long>(x - w));
        const long k_hi = static_cast<long>(x + w);
        double s = 0.0;
        for (long k = k_lo; k <= k_hi; ++k) {
            const double ln_p = -x + k * std::log(x) - std::lgamma(static_cast<double>(k) + 1.0);
            s += std::exp(ln_p) / (b - 1.0 + static_cast<double>(k));
        }
        inner = (x < 740.0 ? std::exp(-x) : 0.0) + (b - 1.0) * s;
    }
    (void)cfg;
    return {inner * rgamma(b), 1e-14, true};
}

} // namespace

MLResult ml(double a, double b, double z, const MLConfig& cfg) {
    cfg.check();
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("ml: need a in (0,1]");
    if (!(z <= 0.0)) throw std::invalid_argument("ml: need z <= 0");
    if (!std::isfinite(b) || !std::isfinite(z)) throw std::invalid_argument("ml: nonfinite input");

    const double x = -z;
    if (x == 0.0) return {rgamma(b), 1e-16, true};
    if (a == 1.0) return ml_a_equals_1(b, x, cfg);

    if (x <= cfg.series_cutoff) {
        // cancellation guard: skip the series when its largest term already
        // costs more digits than double precision can spare
        if (series_ln_max_term(a, b, x) < 34.5) {
            MLResult r = ml_series(a, b, z, cfg);
            if (r.converged && r.rel_err <= cfg.target_rel_err) return r;
        }
    }
    const AsymScan scan = asymptotic_scan(a, b, x, cfg);
    if (scan.usable) return ml_asymptotic(a, b, x, scan.n_terms, scan.est_rel_err);

    MLResult r = ml_contour(a, b, z, cfg);
    if (r.converged) return r;
    // pick the best achieved estimate among the fallbacks
    MLResult s = ml_series(a, b, z, cfg);
    if (s.rel_err < r.rel_err) r = s;
    if (scan.n_terms > 0) {
        MLResult as = ml_asymptotic(a, b, x, scan.n_terms, scan.est_rel_err);
        if (as.rel_err < r.rel_err) r = as;
    }
    r.converged = r.rel_err <= cfg.target_rel_err;
    return r;
}

double ml_value(double a, double b, double z, const MLConfig& cfg) {
    const MLResult r = ml(a, b, z, cfg);
    if (!r.converged && r.rel_err > cfg.target_rel_err)
        throw MLNoConvergence("ml: did not reach target_rel_err, achieved " +
                                  std::to_string(r.rel_err),
                              r.rel_err);
    return r.value;
}

double ml_antiderivative_scalar(double a, double b, double lambda, double t, const MLConfig& cfg) {
    if (!(lambda >= 0.0 && t >= 0.0))
        throw std::invalid_argument("ml_antiderivative_scalar: need lambda >= 0, t >= 0");
    if (t == 0.0) return 0.0;
    return std::pow(t, b) * ml_value(a, b + 1.0, -lambda * std::pow(t, a), cfg);
}

MLTable::MLTable(double a, double b, double x_min, double x_max, int points_per_decade)
    : a_(a), b_(b), x_min_(x_min), x_max_(x_max) {
    if (b < a) throw std::invalid_argument("MLTable: needs b >= a (positive values)");
    cfg_.target_rel_err = 1e-12;
    ln_x_min_ = std::log(x_min);
    const double ln_x_max = std::log(x_max);
    const int n =
        static_cast<int>(std::ceil((ln_x_max - ln_x_min_) / std::log(10.0) * points_per_decade)) +
        8;
    inv_dln_ = (n - 1) / (ln_x_max - ln_x_min_);
    ln_vals_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = std::exp(ln_x_min_ + i / inv_dln_);
        const double v = ml_value(a, b, -x, cfg_);
        if (!(v > 0.0)) throw std::runtime_error("MLTable: nonpositive value met while building");
        ln_vals_[i] = std::log(v);
    }
}

double MLTable::operator()(double x) const {
    if (x < x_min_) {
        // three-term series; relative error ~ (x_min)^3
        return rgamma(b_) - x * rgamma(a_ + b_) + x * x * rgamma(2.0 * a_ + b_);
    }
    if (x > x_max_) return ml_value(a_, b_, -x, cfg_);
    const double y = (std::log(x) - ln_x_min_) * inv_dln_;
    int i0 = static_cast<int>(y) - 2;
    i0 = std::clamp(i0, 0, static_cast<int>(ln_vals_.size()) - 6);
    const double t = y - i0;
    // degree-5 Lagrange on equispaced nodes 0..5
    static const double denom[6] = {-120.0, 24.0, -12.0, 12.0, -24.0, 120.0};
    double w_all = 1.0;
    for (int j = 0; j < 6; ++j) w_all *= (t - j);
    if (w_all == 0.0) return std::exp(ln_vals_[i0 + static_cast<int>(t + 0.5)]);
    double acc = 0.0;
    for (int j = 0; j < 6; ++j) acc += (w_all / (t - j)) / denom[j] * ln_vals_[i0 + j];
    return std::exp(acc);
}

} // namespace fsde
