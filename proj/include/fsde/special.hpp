#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fsde {

// Gamma function wrappers.
//
// gamma_fn throws on poles and signals overflow for x > 171.62; rgamma is the
// reciprocal variant: defined for every real x, returns 0 at the poles of
// Gamma so that asymptotic series terms vanish cleanly.
double gamma_fn(double x);
double rgamma(double x);

// Evaluation controls for the two-parameter Mittag-Leffler function.
struct MLConfig {
    double series_cutoff = 5.0;      // |z| below which the power series is considered
    double asymptotic_cutoff = 50.0; // |z| above which the asymptotic expansion is forced
    double target_rel_err = 1e-10;
    int max_terms = 600;

    void check() const {
        if (!(series_cutoff < asymptotic_cutoff))
            throw std::invalid_argument("MLConfig: series_cutoff must be < asymptotic_cutoff");
        if (!(target_rel_err > 0.0 && target_rel_err <= 1e-6))
            throw std::invalid_argument("MLConfig: target_rel_err must lie in (0, 1e-6]");
        if (max_terms <= 0) throw std::invalid_argument("MLConfig: max_terms must be positive");
    }
};

struct MLResult {
    double value = 0.0;
    double rel_err = 0.0; // achieved error estimate
    bool converged = true;
};

// E_{a,b}(z) for a in (0,1], z <= 0. Three regimes: power series where
// cancellation stays below target, asymptotic expansion where its smallest
// term certifies the target, and a Hankel-contour quadrature on the
// intermediate band. b may be any real (the derivative identity needs
// b <= 0); model code only uses b > 0.
MLResult ml(double a, double b, double z, const MLConfig& cfg = MLConfig{});

// Value-only variant; throws on non-convergence (carries the achieved error).
double ml_value(double a, double b, double z, const MLConfig& cfg = MLConfig{});

class MLNoConvergence : public std::runtime_error {
  public:
    MLNoConvergence(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_rel_err(achieved) {}
    double achieved_rel_err;
};

// t^b * E_{a,b+1}(-lambda t^a) == integral_0^t tau^{b-1} E_{a,b}(-lambda tau^a) dtau.
double ml_antiderivative_scalar(double a, double b, double lambda, double t,
                                const MLConfig& cfg = MLConfig{});

// Tabulated x -> E_{a,b}(-x) on a log-spaced grid with local degree-5
// interpolation of ln E; the fast path for covariance assembly (~1e8 calls).
// Requires b >= a so values are positive. Outside the grid it falls back to
// the exact evaluator.
class MLTable {
  public:
    MLTable(double a, double b, double x_min = 1e-10, double x_max = 1e15,
            int points_per_decade = 64);
    double operator()(double x) const;
    double a() const { return a_; }
    double b() const { return b_; }

  private:
    double a_, b_;
    double ln_x_min_, inv_dln_;
    std::vector<double> ln_vals_;
    double x_min_, x_max_;
    MLConfig cfg_;
};

} // namespace fsde
