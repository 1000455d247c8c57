#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fsde {

// Gauss-Legendre nodes/weights on [-1,1], 8 point rule (panel quadrature in
// the covariance assembly) and adaptive Gauss-Kronrod 7-15 (oracles, slow
// certified paths).

struct GaussLegendre8 {
    static constexpr int n = 8;
    static constexpr double x[8] = {
        -0.9602898564975362316835609, -0.7966664774136267395915539,
        -0.5255324099163289858177390, -0.1834346424956498049394761,
        0.1834346424956498049394761,  0.5255324099163289858177390,
        0.7966664774136267395915539,  0.9602898564975362316835609};
    static constexpr double w[8] = {
        0.1012285362903762591525314, 0.2223810344533744705443560,
        0.3137066458778872873379622, 0.3626837833783619829651504,
        0.3626837833783619829651504, 0.3137066458778872873379622,
        0.2223810344533744705443560, 0.1012285362903762591525314};
};

template <class F>
double gauss8(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < GaussLegendre8::n; ++i)
        s += GaussLegendre8::w[i] * f(mid + half * GaussLegendre8::x[i]);
    return s * half;
}

namespace detail {
// Kronrod 15 / Gauss 7 pair
constexpr double kr_x[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
constexpr double kr_w[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
constexpr double g7_w[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};
} // namespace detail

struct QuadResult {
    double value = 0.0;
    double abs_err = 0.0;
    bool converged = true;
};

// Adaptive GK15 with a worst-interval-first queue. `splits` seeds extra
// subdivision points (graded meshes near endpoint singularities).
template <class F>
QuadResult integrate_adaptive(const F& f, double a, double b, double rel_tol, double abs_tol,
                              int max_intervals = 4000, const std::vector<double>& splits = {}) {
    struct Seg {
        double a, b, val, err;
    };
    auto gk = [&f](double lo, double hi) {
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double k = 0.0, g = 0.0;
        for (int i = 0; i < 15; ++i) {
            const double fv = f(mid + half * detail::kr_x[i]);
            k += detail::kr_w[i] * fv;
            if (i % 2 == 1) g += detail::g7_w[i / 2] * fv;
        }
        const double val = k * half;
        double err = std::abs((k - g) * half);
        err = std::pow(200.0 * err, 1.5); // Kronrod error model
        return Seg{lo, hi, val, std::min(err, std::abs(val) + 1e-300)};
    };

    std::vector<Seg> segs;
    std::vector<double> pts;
    pts.push_back(a);
    for (double s : splits)
        if (s > a && s < b) pts.push_back(s);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) segs.push_back(gk(pts[i], pts[i + 1]));

    auto total = [&segs] {
        double v = 0.0, e = 0.0;
        for (const auto& s : segs) {
            v += s.val;
            e += s.err;
        }
        return std::pair<double, double>(v, e);
    };

    while (static_cast<int>(segs.size()) < max_intervals) {
        auto [v, e] = total();
        if (e <= abs_tol || e <= rel_tol * std::abs(v)) return {v, e, true};
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].err > segs[worst].err) worst = i;
        const Seg s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        if (mid <= s.a || mid >= s.b) break; // interval at floating point resolution
        segs[worst] = gk(s.a, mid);
        segs.push_back(gk(mid, s.b));
    }
    auto [v, e] = total();
    return {v, e, e <= abs_tol || e <= rel_tol * std::abs(v)};
}

// Geometric grading toward `a`, ratio in (0,1); used to seed adaptive or panel
// rules where the integrand behaves like (x-a)^mu with mu > -1.
inline std::vector<double> graded_splits(double a, double b, double ratio, int levels) {
    std::vector<double> out;
    double w = (b - a);
    for (int j = 1; j <= levels; ++j) {
        w *= ratio;
        const double p = a + w;
        if (p <= a || p >= b) break;
        out.push_back(p);
    }
    return out;
}

} // namespace fsde
