#include "fsde/cli.hpp"

#include "fsde/config.hpp"
#include "fsde/sha1.hpp"
#include "fsde/solver.hpp"
#include "fsde/special.hpp"
#include "fsde/studies.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fsde {

namespace {

constexpr const char* kVersion = "fsde-1.0.0";

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunManifest {
    std::string config_echo;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string command;
    ValidationReport report;
};

RunManifest make_manifest(const ModelSpec& spec, const std::string& config_path,
                          std::uint64_t seed, const std::string& command) {
    RunManifest m;
    m.config_echo = render_config(spec);
    m.config_hash = sha1_hex(config_path.empty() ? m.config_echo : read_file(config_path));
    m.seed = seed;
    m.command = command;
    ModelSpec copy = spec;
    m.report = validate(copy);
    return m;
}

void write_manifest(const RunManifest& m, const std::string& out_path) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write manifest: " + out_path);
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char ts[32];
    std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    out << "# fsde run manifest\n";
    out << "# version = " << kVersion << "\n";
    out << "# config_sha1 = " << m.config_hash << "\n";
    out << "# seed = " << m.seed << "\n";
    out << "# timestamp_utc = " << ts << "\n";
    out << "# command = " << m.command << "\n";
    out << "# kappa = " << fmt17(m.report.kappa) << "\n";
    out << "# r_target = " << fmt17(m.report.r_target) << "\n";
    out << "# r_admissible_sup = " << fmt17(m.report.r_admissible_sup) << "\n";
    out << "# predicted_holder = " << fmt17(m.report.predicted_holder) << "\n";
    out << "# predicted_order_linear = " << fmt17(m.report.predicted_order_linear) << "\n";
    out << "# predicted_order_nonlinear = " << fmt17(m.report.predicted_order_nonlinear) << "\n";
    out << "# resolved configuration below; reusable as a config file\n";
    out << m.config_echo;
}

std::ofstream open_csv(const std::string& path, const RunManifest& m) {
    std::ofstream out(path, std::ios::binary); // LF endings on every platform
    if (!out) throw std::runtime_error("cannot write output: " + path);
    out << "# manifest_hash=" << m.config_hash << " seed=" << m.seed << " version=" << kVersion
        << "\n";
    write_manifest(m, path + ".manifest");
    return out;
}

void write_study_block(std::ofstream& out, const StudyResult& r) {
    for (const auto& row : r.rows)
        out << r.study << "," << row.M << "," << fmt17(row.h) << "," << fmt17(row.value) << ","
            << fmt17(row.std_error) << "\n";
    if (r.study == "gamma-converge")
        for (std::size_t i = 0; i < r.extra.size(); ++i)
            out << "rate_function," << r.rows[i].M << "," << fmt17(r.rows[i].h) << ","
                << fmt17(r.extra[i]) << ",\n";
    if (r.verdict == "exact") {
        out << "verdict,,,exact,\n";
        return;
    }
    out << "fitted_order,,," << fmt17(r.fitted_order) << "," << fmt17(r.fitted_order_stderr)
        << "\n";
    out << "r_squared,,," << fmt17(r.r_squared) << ",\n";
    out << "predicted_order,,," << fmt17(r.predicted_order) << ",\n";
    out << "verdict,,," << r.verdict << ",\n";
}

std::vector<int> parse_grid_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw std::runtime_error("empty grid list");
    return out;
}

Control read_control_csv(const std::string& path, int K) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open control file: " + path);
    struct Entry {
        int j, k;
        double v;
    };
    std::vector<Entry> entries;
    std::string line;
    int max_j = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
            continue;
        try {
            Entry e{std::stoi(a), std::stoi(b), std::stod(c)};
            if (e.k < 1 || e.k > K) throw std::runtime_error("control mode out of range");
            entries.push_back(e);
            max_j = std::max(max_j, e.j);
        } catch (const std::invalid_argument&) {
            continue; // header line
        }
    }
    if (max_j < 0) throw std::runtime_error("control file has no rows: " + path);
    Control v;
    v.intervals = max_j + 1;
    v.K = K;
    v.values.assign(static_cast<std::size_t>(v.intervals) * K, 0.0);
    for (const auto& e : entries) v.at(e.j, e.k - 1) = e.v;
    return v;
}

std::string join_command(int argc, const char* const* argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

ModelSpec load_and_validate(const std::string& config_path, ValidationReport* rep_out = nullptr) {
    ModelSpec spec = parse_config_file(config_path);
    const ValidationReport rep = validate(spec);
    if (rep_out) *rep_out = rep;
    if (!rep.ok) {
        std::ostringstream os;
        os << "invalid configuration:";
        for (const auto& v : rep.violations) os << "\n  " << v;
        throw std::runtime_error(os.str());
    }
    return spec;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Mittag-Leffler Euler laboratory for stochastic space-time fractional diffusion"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    const std::string command = join_command(argc, argv);

    // ml-eval
    auto* ml_cmd = app.add_subcommand("ml-eval", "evaluate E_{a,b}(z), printing value and error estimate");
    double ml_a = 0.5, ml_b = 1.0, ml_z = 0.0;
    ml_cmd->add_option("a", ml_a, "first parameter, (0,1]")->required();
    ml_cmd->add_option("b", ml_b, "second parameter")->required();
    ml_cmd->add_option("z", ml_z, "argument, z <= 0")->required();

    // validate
    auto* val_cmd = app.add_subcommand("validate", "check a configuration and print derived quantities");
    std::string val_config;
    val_cmd->add_option("--config", val_config, "configuration file")->required();

    // sample-noise
    auto* sn_cmd = app.add_subcommand("sample-noise", "sample the stochastic convolution on the grid");
    std::string sn_config, sn_out;
    int sn_m = 64, sn_paths = 1, sn_threads = 0;
    std::uint64_t sn_seed = 0;
    sn_cmd->add_option("--config", sn_config)->required();
    sn_cmd->add_option("--m", sn_m, "grid steps")->required();
    sn_cmd->add_option("--paths", sn_paths)->required();
    sn_cmd->add_option("--seed", sn_seed)->required();
    sn_cmd->add_option("--out", sn_out)->required();
    sn_cmd->add_option("--threads", sn_threads);

    // run-mle
    auto* rm_cmd = app.add_subcommand("run-mle", "run the MLE integrator on one sampled path");
    std::string rm_config, rm_out;
    int rm_m = 64, rm_threads = 0;
    std::uint64_t rm_seed = 0;
    rm_cmd->add_option("--config", rm_config)->required();
    rm_cmd->add_option("--m", rm_m)->required();
    rm_cmd->add_option("--seed", rm_seed)->required();
    rm_cmd->add_option("--out", rm_out)->required();
    rm_cmd->add_option("--threads", rm_threads);

    // skeleton
    auto* sk_cmd = app.add_subcommand("skeleton", "run the deterministic skeleton equation");
    std::string sk_config, sk_out, sk_control;
    int sk_m = 64;
    sk_cmd->add_option("--config", sk_config)->required();
    sk_cmd->add_option("--m", sk_m)->required();
    sk_cmd->add_option("--control", sk_control, "control CSV: interval_index,mode,value")->required();
    sk_cmd->add_option("--out", sk_out)->required();

    // converge
    auto* cv_cmd = app.add_subcommand("converge", "coupled Monte Carlo strong-error study");
    std::string cv_config, cv_out, cv_grids = "8,16,32,64";
    int cv_ref = 1024, cv_paths = 64, cv_threads = 0;
    std::uint64_t cv_seed = 0;
    bool cv_assert = false;
    cv_cmd->add_option("--config", cv_config)->required();
    cv_cmd->add_option("--grids", cv_grids, "comma list of coarse M");
    cv_cmd->add_option("--ref", cv_ref, "reference M");
    cv_cmd->add_option("--paths", cv_paths);
    cv_cmd->add_option("--seed", cv_seed)->required();
    cv_cmd->add_option("--out", cv_out)->required();
    cv_cmd->add_option("--threads", cv_threads);
    cv_cmd->add_flag("--assert", cv_assert, "exit 2 unless the verdict passes");

    // holder
    auto* hl_cmd = app.add_subcommand("holder", "increment-variance slope study");
    std::string hl_config, hl_out, hl_lags = "1,2,3,4";
    int hl_ref = 1024, hl_paths = 64, hl_threads = 0;
    std::uint64_t hl_seed = 0;
    bool hl_assert = false;
    hl_cmd->add_option("--config", hl_config)->required();
    hl_cmd->add_option("--ref", hl_ref);
    hl_cmd->add_option("--paths", hl_paths);
    hl_cmd->add_option("--lags", hl_lags, "comma list of lag multiples of h_ref");
    hl_cmd->add_option("--seed", hl_seed)->required();
    hl_cmd->add_option("--out", hl_out)->required();
    hl_cmd->add_option("--threads", hl_threads);
    hl_cmd->add_flag("--assert", hl_assert);

    // gamma-converge
    auto* gc_cmd = app.add_subcommand("gamma-converge", "skeleton refinement / rate-function study");
    std::string gc_config, gc_out, gc_grids = "8,16,32,64,128,256", gc_control;
    int gc_ref = 2048, gc_threads = 0;
    bool gc_assert = false;
    gc_cmd->add_option("--config", gc_config)->required();
    gc_cmd->add_option("--grids", gc_grids);
    gc_cmd->add_option("--ref", gc_ref);
    gc_cmd->add_option("--control", gc_control, "control CSV on the coarsest grid")->required();
    gc_cmd->add_option("--out", gc_out)->required();
    gc_cmd->add_option("--threads", gc_threads);
    gc_cmd->add_flag("--assert", gc_assert);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e); // usage text; nonzero on errors
    }

    try {
        if (*ml_cmd) {
            const MLResult r = ml(ml_a, ml_b, ml_z);
            std::printf("value = %.17g\nrel_err_est = %.3g\n", r.value, r.rel_err);
            return r.converged ? 0 : 1;
        }
        if (*val_cmd) {
            ModelSpec spec = parse_config_file(val_config);
            const ValidationReport rep = validate(spec);
            if (!rep.ok) {
                std::printf("INVALID\n");
                for (const auto& v : rep.violations) std::printf("  %s\n", v.c_str());
                return 1;
            }
            std::printf("kappa = %.17g\n", rep.kappa);
            std::printf("r_target = %.17g\n", rep.r_target);
            std::printf("r_admissible_sup = %.17g%s\n", rep.r_admissible_sup,
                        spec.q.kind == QSpectrum::Kind::White ? " (white noise: need r < -1/2 + kappa)"
                                                              : "");
            std::printf("predicted_holder_exponent = %.17g\n", rep.predicted_holder);
            std::printf("predicted_order_linear = %.17g\n", rep.predicted_order_linear);
            std::printf("predicted_order_nonlinear = %.17g\n", rep.predicted_order_nonlinear);
            for (const auto& v : rep.violations) std::printf("note: %s\n", v.c_str());
            return 0;
        }
        if (*sn_cmd) {
            const ModelSpec spec = load_and_validate(sn_config);
            const SpectralBasis basis = build_basis(spec.L, spec.K);
            const TimeGrid grid = TimeGrid::uniform(spec.T, sn_m);
            const auto covs = assemble_covariances(mode_params(spec, basis), grid, sn_threads);
            const NoiseEnsemble ens = sample_paths(covs, grid, sn_paths, sn_seed, sn_threads);
            auto out = open_csv(sn_out, make_manifest(spec, sn_config, sn_seed, command));
            out << "path,mode,time_index,value\n";
            for (int p = 0; p < sn_paths; ++p)
                for (int k = 0; k < spec.K; ++k) {
                    const double* v = ens.path_mode(p, k);
                    for (int m = 0; m <= grid.M; ++m)
                        out << p << "," << (k + 1) << "," << m << "," << fmt17(v[m]) << "\n";
                }
            return 0;
        }
        if (*rm_cmd) {
            const ModelSpec spec = load_and_validate(rm_config);
            const SpectralBasis basis = build_basis(spec.L, spec.K);
            const TimeGrid grid = TimeGrid::uniform(spec.T, rm_m);
            const auto covs = assemble_covariances(mode_params(spec, basis), grid, rm_threads);
            const NoiseEnsemble ens = sample_paths(covs, grid, 1, rm_seed, rm_threads);
            const SchemeTables tables = build_scheme_tables(spec, basis, grid);
            const SpectralField y0 = spec.x0.coefficients(basis, spec.beta);
            const Trajectory tr = mle_run(spec, basis, grid, tables, y0, ens, 0);
            auto out = open_csv(rm_out, make_manifest(spec, rm_config, rm_seed, command));
            out << "time_index,mode,value\n";
            for (int m = 0; m <= grid.M; ++m)
                for (int k = 0; k < spec.K; ++k)
                    out << m << "," << (k + 1) << "," << fmt17(tr.at(m)[k]) << "\n";
            return 0;
        }
        if (*sk_cmd) {
            const ModelSpec spec = load_and_validate(sk_config);
            const SpectralBasis basis = build_basis(spec.L, spec.K);
            const TimeGrid grid = TimeGrid::uniform(spec.T, sk_m);
            Control v = read_control_csv(sk_control, spec.K);
            if (sk_m % v.intervals != 0)
                throw std::runtime_error("control intervals must divide --m");
            v = v.prolonged(sk_m / v.intervals);
            const SchemeTables tables = build_scheme_tables(spec, basis, grid);
            const WeightTable gw = build_weight_table(grid, basis, spec.alpha, spec.beta, spec.gamma);
            const SpectralField x0 = spec.x0.coefficients(basis, spec.beta);
            const Trajectory tr = skeleton_run(spec, basis, grid, tables, gw, x0, v);
            auto out = open_csv(sk_out, make_manifest(spec, sk_config, 0, command));
            out << "time_index,mode,value\n";
            for (int m = 0; m <= grid.M; ++m)
                for (int k = 0; k < spec.K; ++k)
                    out << m << "," << (k + 1) << "," << fmt17(tr.at(m)[k]) << "\n";
            return 0;
        }
        if (*cv_cmd) {
            const ModelSpec spec = load_and_validate(cv_config);
            StudyOptions opts;
            opts.threads = cv_threads;
            const StudyResult r =
                strong_error_study(spec, parse_grid_list(cv_grids), cv_ref, cv_paths, cv_seed, opts);
            auto out = open_csv(cv_out, make_manifest(spec, cv_config, cv_seed, command));
            out << "study,M,h,value,std_error\n";
            write_study_block(out, r);
            if (cv_assert && r.verdict != "pass" && r.verdict != "exact") return 2;
            return 0;
        }
        if (*hl_cmd) {
            const ModelSpec spec = load_and_validate(hl_config);
            StudyOptions opts;
            opts.threads = hl_threads;
            const HolderResult r =
                holder_study(spec, hl_ref, hl_paths, parse_grid_list(hl_lags), hl_seed, opts);
            auto out = open_csv(hl_out, make_manifest(spec, hl_config, hl_seed, command));
            out << "study,M,h,value,std_error\n";
            write_study_block(out, r.at_T);
            if (r.singular_at_half_T) write_study_block(out, *r.singular_at_half_T);
            if (hl_assert && r.at_T.verdict != "pass") return 2;
            return 0;
        }
        if (*gc_cmd) {
            const ModelSpec spec = load_and_validate(gc_config);
            const std::vector<int> Ms = parse_grid_list(gc_grids);
            const Control base = read_control_csv(gc_control, spec.K);
            StudyOptions opts;
            opts.threads = gc_threads;
            const StudyResult r = gamma_convergence_study(spec, base, Ms, gc_ref, opts);
            auto out = open_csv(gc_out, make_manifest(spec, gc_config, 0, command));
            out << "study,M,h,value,std_error\n";
            write_study_block(out, r);
            if (gc_assert && r.verdict != "pass" && r.verdict != "exact") return 2;
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}

} // namespace fsde
