#include "fsde/noise.hpp"

#include "fsde/parallel.hpp"
#include "fsde/quadrature.hpp"
#include "fsde/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fsde {

namespace {

// s_gamma kernel of one mode: g(tau) = tau^{alpha+gamma-1} E_{alpha,alpha+gamma}(-lambda_beta tau^alpha)
struct Kernel {
    const ModeParams& mp;
    const MLTable* table;
    MLConfig cfg;

    double operator()(double tau) const {
        const double x = mp.lambda_beta * std::pow(tau, mp.alpha);
        const double e = table ? (*table)(x) : ml_value(mp.alpha, mp.alpha + mp.gamma, -x, cfg);
        const double c = mp.alpha + mp.gamma - 1.0;
        return (c == 0.0 ? 1.0 : std::pow(tau, c)) * e;
    }
};

} // namespace

double cov_entry(const ModeParams& mp, double t_m, double t_n, double rel_tol) {
    if (!(mp.alpha + mp.gamma > 0.5))
        throw std::invalid_argument("cov_entry: need alpha + gamma > 1/2");
    const double lo = std::min(t_m, t_n), hi = std::max(t_m, t_n);
    if (!(lo > 0.0)) return 0.0;
    const double gap = hi - lo;
    MLConfig cfg;
    cfg.target_rel_err = std::min(1e-10, 0.05 * rel_tol);
    Kernel g{mp, nullptr, cfg};
    // tau = t_min - u; integrand singular (integrably) at tau = 0
    auto f = [&](double tau) { return g(tau + gap) * g(tau); };
    const auto splits = graded_splits(0.0, lo, 0.12, 24);
    const QuadResult r = integrate_adaptive(f, 0.0, lo, 0.2 * rel_tol, 0.0, 6000, splits);
    if (!r.converged)
        throw std::runtime_error("cov_entry: quadrature did not reach the requested tolerance");
    return mp.q * r.value;
}

double increment_second_moment(const ModeParams& mp, double t, double s, double rel_tol) {
    const double cmm = cov_entry(mp, t, t, rel_tol);
    const double cnn = cov_entry(mp, s, s, rel_tol);
    const double cmn = cov_entry(mp, t, s, rel_tol);
    return cmm + cnn - 2.0 * cmn;
}

namespace {

// Panel integral of g(tau + t_d) g(tau) over [a,b] with n equal subpanels.
double panel_gl8(const Kernel& g, double t_d, double a, double b, int nsub) {
    double total = 0.0;
    const double w = (b - a) / nsub;
    for (int s = 0; s < nsub; ++s) {
        const double lo = a + s * w;
        total += gauss8([&](double tau) { return g(tau + t_d) * g(tau); }, lo, lo + w);
    }
    return total;
}

// First panel [0, t_1]: geometric grading toward the tau = 0 endpoint where
// the integrand behaves like tau^{2(alpha+gamma-1)} (d = 0) or
// tau^{alpha+gamma-1} (d > 0), plus an explicit power-law stub below the
// deepest level.
double first_panel(const Kernel& g, const ModeParams& mp, double t_d, double t1) {
    const double c = mp.alpha + mp.gamma - 1.0;
    double total = 0.0;
    double hi = t1;
    // gentle ratio: the integrand has tau^(fractional) cusps at 0, and the
    // Gauss error on a geometric panel decays like a power of the ratio
    const double ratio = 0.45;
    int levels = 0;
    while (levels < 90) {
        const double lo = hi * ratio;
        total += gauss8([&](double tau) { return g(tau + t_d) * g(tau); }, lo, hi);
        hi = lo;
        ++levels;
        // stop once the kernel argument is flat: remaining piece is a pure power
        if (mp.lambda_beta * std::pow(hi, mp.alpha) < 1e-6 || hi < 1e-290) break;
    }
    const double e0 = rgamma(mp.alpha + mp.gamma);
    if (t_d == 0.0) {
        const double p = 2.0 * c + 1.0; // > 0 since alpha+gamma > 1/2
        total += e0 * e0 * std::pow(hi, p) / p;
    } else {
        total += e0 * g(t_d) * std::pow(hi, c + 1.0) / (c + 1.0);
    }
    return total;
}

} // namespace

std::vector<double> assemble_mode_cov(const ModeParams& mp, const TimeGrid& grid,
                                      const MLTable* table) {
    if (!(mp.alpha + mp.gamma > 0.5))
        throw std::invalid_argument("assemble_mode_cov: need alpha + gamma > 1/2");
    const int M = grid.M;
    Kernel g{mp, table, MLConfig{}};
    std::vector<double> C(static_cast<std::size_t>(M) * M);
    std::vector<double> G(static_cast<std::size_t>(M)); // running G(p,d) over p for fixed d
    for (int d = 0; d < M; ++d) {
        const double t_d = grid.times[static_cast<std::size_t>(d)];
        double acc = 0.0;
        const int pmax = M - d;
        for (int p = 1; p <= pmax; ++p) {
            const double a = grid.times[static_cast<std::size_t>(p - 1)];
            const double b = grid.times[static_cast<std::size_t>(p)];
            double I;
            if (p == 1) {
                I = first_panel(g, mp, t_d, b);
            } else {
                const int nsub = p <= 2 ? 8 : (p <= 4 ? 6 : (p <= 8 ? 4 : (p <= 16 ? 2 : 1)));
                I = panel_gl8(g, t_d, a, b, nsub);
            }
            acc += I;
            G[static_cast<std::size_t>(p - 1)] = acc;
        }
        for (int p = 1; p <= pmax; ++p) {
            const double v = mp.q * G[static_cast<std::size_t>(p - 1)];
            C[static_cast<std::size_t>(p - 1) * M + (p + d - 1)] = v;
            C[static_cast<std::size_t>(p + d - 1) * M + (p - 1)] = v;
        }
    }
    return C;
}

ModeCovariance factorize_mode_cov(std::vector<double> cov, int M) {
    ModeCovariance out;
    out.M = M;
    double max_diag = 0.0;
    for (int i = 0; i < M; ++i)
        max_diag = std::max(max_diag, cov[static_cast<std::size_t>(i) * M + i]);
    if (max_diag < 1e-30) {
        out.zero_mode = true;
        return out;
    }
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
        cov.data(), M, M);
    Eigen::MatrixXd work;
    for (double jit : {1e-12, 1e-10, 1e-8}) {
        work = A;
        work.diagonal().array() += jit * max_diag;
        Eigen::LLT<Eigen::MatrixXd> llt(work);
        if (llt.info() == Eigen::Success) {
            out.jitter = jit * max_diag;
            Eigen::MatrixXd Lmat = llt.matrixL();
            out.chol.resize(static_cast<std::size_t>(M) * (M + 1) / 2);
            std::size_t off = 0;
            for (int i = 0; i < M; ++i)
                for (int j = 0; j <= i; ++j) out.chol[off++] = Lmat(i, j);
            return out;
        }
    }
    throw std::runtime_error("factorize_mode_cov: factorization failed after jitter escalation");
}

std::vector<ModeParams> mode_params(const ModelSpec& spec, const SpectralBasis& basis) {
    const std::vector<double> q = spec.q.values(basis);
    std::vector<ModeParams> mps(static_cast<std::size_t>(basis.K));
    for (int k = 0; k < basis.K; ++k) {
        mps[static_cast<std::size_t>(k)] = {spec.alpha, spec.gamma,
                                            std::pow(basis.eigenvalues[static_cast<std::size_t>(k)],
                                                     spec.beta),
                                            q[static_cast<std::size_t>(k)]};
    }
    return mps;
}

namespace {

ModeCovariance assemble_and_factor(const ModeParams& mp, const TimeGrid& grid,
                                   const MLTable* table) {
    return factorize_mode_cov(assemble_mode_cov(mp, grid, table), grid.M);
}

std::unique_ptr<MLTable> shared_table(const std::vector<ModeParams>& mps, bool use_table) {
    if (!use_table || mps.empty()) return nullptr;
    // all modes share (alpha, alpha+gamma); the argument x = lambda^beta tau^alpha varies
    return std::make_unique<MLTable>(mps.front().alpha, mps.front().alpha + mps.front().gamma);
}

} // namespace

std::vector<ModeCovariance> assemble_covariances(const std::vector<ModeParams>& mps,
                                                 const TimeGrid& grid, int threads,
                                                 bool use_table) {
    auto table = shared_table(mps, use_table);
    std::vector<ModeCovariance> out(mps.size());
    parallel_for(mps.size(), threads,
                 [&](std::size_t k) { out[k] = assemble_and_factor(mps[k], grid, table.get()); });
    return out;
}

std::vector<ModeCovariance> assemble_covariances_serial(const std::vector<ModeParams>& mps,
                                                        const TimeGrid& grid, bool use_table) {
    auto table = shared_table(mps, use_table);
    std::vector<ModeCovariance> out(mps.size());
    serial_for(mps.size(),
               [&](std::size_t k) { out[k] = assemble_and_factor(mps[k], grid, table.get()); });
    return out;
}

namespace {

void sample_one_block(const ModeCovariance& cov, NoiseEnsemble& ens, int p, int k,
                      std::vector<double>& xi_scratch) {
    const int M = ens.grid.M;
    double* dst = ens.path_mode(p, k);
    dst[0] = 0.0;
    if (cov.zero_mode) {
        std::fill(dst + 1, dst + M + 1, 0.0);
        return;
    }
    GaussStream gs(ens.master_seed, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(k));
    for (int m = 0; m < M; ++m) xi_scratch[static_cast<std::size_t>(m)] = gs.next();
    const double* L = cov.chol.data();
    for (int i = 0; i < M; ++i) {
        const double* row = L + static_cast<std::size_t>(i) * (i + 1) / 2;
        double acc = 0.0;
        for (int j = 0; j <= i; ++j) acc += row[j] * xi_scratch[static_cast<std::size_t>(j)];
        dst[i + 1] = acc;
    }
}

} // namespace

NoiseEnsemble sample_paths(const std::vector<ModeCovariance>& covs, const TimeGrid& grid,
                           int n_paths, std::uint64_t master_seed, int threads) {
    NoiseEnsemble ens;
    ens.grid = grid;
    ens.n_paths = n_paths;
    ens.K = static_cast<int>(covs.size());
    ens.master_seed = master_seed;
    ens.values.resize(static_cast<std::size_t>(n_paths) * ens.K * (grid.M + 1));
    const std::size_t blocks = static_cast<std::size_t>(n_paths) * ens.K;
    const int nt = resolve_threads(threads);
#pragma omp parallel num_threads(nt)
    {
        std::vector<double> xi(static_cast<std::size_t>(grid.M));
#pragma omp for schedule(static)
        for (long long b = 0; b < static_cast<long long>(blocks); ++b) {
            const int p = static_cast<int>(b / ens.K);
            const int k = static_cast<int>(b % ens.K);
            sample_one_block(covs[static_cast<std::size_t>(k)], ens, p, k, xi);
        }
    }
    return ens;
}

NoiseEnsemble sample_paths_serial(const std::vector<ModeCovariance>& covs, const TimeGrid& grid,
                                  int n_paths, std::uint64_t master_seed) {
    NoiseEnsemble ens;
    ens.grid = grid;
    ens.n_paths = n_paths;
    ens.K = static_cast<int>(covs.size());
    ens.master_seed = master_seed;
    ens.values.resize(static_cast<std::size_t>(n_paths) * ens.K * (grid.M + 1));
    std::vector<double> xi(static_cast<std::size_t>(grid.M));
    for (int p = 0; p < n_paths; ++p)
        for (int k = 0; k < ens.K; ++k)
            sample_one_block(covs[static_cast<std::size_t>(k)], ens, p, k, xi);
    return ens;
}

NoiseEnsemble restrict_ensemble(const NoiseEnsemble& fine, int c) {
    if (c < 1 || fine.grid.M % c != 0)
        throw std::invalid_argument("restrict_ensemble: c must divide M");
    NoiseEnsemble out;
    out.grid = fine.grid.restricted(c);
    out.n_paths = fine.n_paths;
    out.K = fine.K;
    out.master_seed = fine.master_seed;
    out.values.resize(static_cast<std::size_t>(out.n_paths) * out.K * (out.grid.M + 1));
    for (int p = 0; p < out.n_paths; ++p)
        for (int k = 0; k < out.K; ++k) {
            const double* src = fine.path_mode(p, k);
            double* dst = out.path_mode(p, k);
            for (int m = 0; m <= out.grid.M; ++m) dst[m] = src[static_cast<std::size_t>(m) * c];
        }
    return out;
}

} // namespace fsde
